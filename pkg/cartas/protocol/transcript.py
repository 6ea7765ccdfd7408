"""
Repartos, parámetros y transcripciones del protocolo
Incluye la lectura/escritura JSON de repartos y transcripciones.
"""

import json
import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple, Union

from cartas import __version__
from cartas.core.colouring import Colouring
from cartas.core.errors import CartasError, InvalidParameters, MalformedTranscript
from cartas.core.finite_geometry import AffineSpace, Field, affine_space, field_for_order
from cartas.core.params import FeasibilityReport, dimension_for, feasible, is_prime_power, search_k


ENCODING_HEADER = (
    "Enteros little-endian: un elemento de GF(p^n) es el entero cuyos dígitos en base p son los "
    "coeficientes del polinomio (dígito j = x^j); un punto es sum(coords[i] * q^i); una recta es "
    "rango_direccion * q^(d-1) + rango_base, con dirección normalizada (primera coordenada no nula = 1) "
    "y base = punto de menor índice. modulus en orden creciente de grado, [] para cuerpos primos. "
    "f[i] es el punto de la carta i+1."
)


def seeded_rng(seed: int, purpose: str) -> random.Random:
    """Flujo aleatorio reproducible e independiente por propósito"""
    return random.Random(f"{purpose}:{seed}")


# ---------------------------------------------------------------------------
# Reparto
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Deal:
    """Partición (A, B, C) del mazo {1..a+b+c}"""

    A: FrozenSet[int]
    B: FrozenSet[int]
    C: FrozenSet[int]

    def __post_init__(self):
        for name in ('A', 'B', 'C'):
            object.__setattr__(self, name, frozenset(int(x) for x in getattr(self, name)))
        if self.A & self.B or self.A & self.C or self.B & self.C:
            raise InvalidParameters("Las manos del reparto no son disjuntas")
        if self.A | self.B | self.C != frozenset(range(1, self.n + 1)):
            raise InvalidParameters(f"El reparto no cubre el mazo 1..{self.n}")

    @property
    def a(self) -> int:
        return len(self.A)

    @property
    def b(self) -> int:
        return len(self.B)

    @property
    def c(self) -> int:
        return len(self.C)

    @property
    def n(self) -> int:
        return len(self.A) + len(self.B) + len(self.C)

    @property
    def deck(self) -> range:
        return range(1, self.n + 1)

    def to_dict(self) -> Dict:
        return {'A': sorted(self.A), 'B': sorted(self.B), 'C': sorted(self.C)}

    @classmethod
    def from_dict(cls, data: Dict) -> 'Deal':
        if not isinstance(data, dict):
            raise MalformedTranscript("El reparto no es un objeto JSON")
        try:
            return cls(A=frozenset(data['A']), B=frozenset(data['B']), C=frozenset(data['C']))
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedTranscript(f"Reparto mal formado: {e}") from e


def deal_random(a: int, b: int, c: int, rng: random.Random) -> Deal:
    """Reparto uniforme de {1..a+b+c} en manos de tamaños (a, b, c)"""
    if min(a, b, c) < 0:
        raise InvalidParameters(f"Tamaños negativos: {(a, b, c)}")
    deck = list(range(1, a + b + c + 1))
    rng.shuffle(deck)
    return Deal(A=frozenset(deck[:a]), B=frozenset(deck[a:a + b]), C=frozenset(deck[a + b:]))


# ---------------------------------------------------------------------------
# Parámetros
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolParams:
    a: int
    b: int
    c: int
    d: int
    k: int
    field: Field

    def __post_init__(self):
        if self.field.q != self.a:
            raise InvalidParameters(f"El cuerpo tiene orden {self.field.q}, se esperaba a={self.a}")
        if self.a + self.b + self.c != self.a ** self.d:
            raise InvalidParameters(
                f"a+b+c = {self.a + self.b + self.c} no es a^d = {self.a ** self.d}"
            )
        if not 0 < self.k < self.a:
            raise InvalidParameters(f"Se requiere 0 < k < a (k={self.k}, a={self.a})")
        if min(self.b, self.c) < 0:
            raise InvalidParameters("b y c no pueden ser negativos")

    @classmethod
    def create(
        cls,
        a: int,
        c: int,
        b: Optional[int] = None,
        d: Optional[int] = None,
        k: Optional[int] = None,
        modulus: Optional[Sequence[int]] = None,
    ) -> 'ProtocolParams':
        """
        Completa los parámetros que falten.

        d sale de a+b+c = a^d (o, sin b, se toma 2); k es el menor factible.
        """
        if not is_prime_power(a):
            raise InvalidParameters(f"a={a} no es potencia de un primo")
        if d is None:
            d = dimension_for(a, b, c) if b is not None else 2
            if d is None:
                raise InvalidParameters(f"a+b+c = {a + b + c} no es una potencia de a={a}")
        if b is None:
            b = a ** d - a - c
        if k is None:
            k = search_k(a, c, d)
            if k is None:
                raise InvalidParameters(f"Ningún k hace factibles (a={a}, c={c}, d={d})")
        return cls(a=a, b=b, c=c, d=d, k=k, field=field_for_order(a, modulus))

    @property
    def space(self) -> AffineSpace:
        return affine_space(self.field, self.d)

    @property
    def n(self) -> int:
        return self.a + self.b + self.c

    def feasibility(self) -> FeasibilityReport:
        return feasible(self.a, self.c, self.d, self.k)

    def to_dict(self) -> Dict:
        return {
            'a': self.a, 'b': self.b, 'c': self.c, 'd': self.d, 'k': self.k,
            'modulus': list(self.field.modulus),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'ProtocolParams':
        if not isinstance(data, dict):
            raise MalformedTranscript("Los parámetros no son un objeto JSON")
        try:
            modulus = data.get('modulus') or None
            return cls.create(
                a=int(data['a']), b=int(data['b']), c=int(data['c']),
                d=int(data['d']), k=int(data['k']), modulus=modulus,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedTranscript(f"Parámetros mal formados: {e}") from e


# ---------------------------------------------------------------------------
# Transcripción
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Transcript:
    """Los cuatro anuncios (f, ξ, color, C) de una ejecución"""

    params: ProtocolParams
    seed: int
    f: Tuple[int, ...]
    xi: Colouring
    colour: int
    claimed_C: Tuple[int, ...]

    @cached_property
    def card_of_point(self) -> Dict[int, int]:
        return {x: card for card, x in enumerate(self.f, start=1)}

    def point_of(self, card: int) -> int:
        return self.f[card - 1]

    def image(self, cards: Iterable[int]) -> FrozenSet[int]:
        return frozenset(self.f[card - 1] for card in cards)

    def to_dict(self) -> Dict:
        return {
            '_encoding': ENCODING_HEADER,
            'version': __version__,
            'params': self.params.to_dict(),
            'seed': self.seed,
            'f': list(self.f),
            'xi': self.xi.to_dict(),
            'colour': self.colour,
            'claimed_C': list(self.claimed_C),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'Transcript':
        """
        Reconstruye una transcripción desde JSON.

        Raises:
            MalformedTranscript: claves ausentes, tipos erróneos, f de longitud o
                rango inválidos, o coloreado no decodificable
        """
        if not isinstance(data, dict):
            raise MalformedTranscript("La transcripción no es un objeto JSON")
        params = ProtocolParams.from_dict(data.get('params', {}))
        try:
            f = tuple(int(x) for x in data['f'])
            colour = int(data['colour'])
            claimed = tuple(sorted(int(x) for x in data['claimed_C']))
            seed = int(data.get('seed', 0))
            xi = Colouring.from_dict(params.space, data['xi'])
        except CartasError as e:
            raise MalformedTranscript(f"Coloreado inválido: {e}") from e
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedTranscript(f"Transcripción mal formada: {e}") from e

        if xi.k != params.k:
            raise MalformedTranscript(f"El coloreado usa k={xi.k} colores, los parámetros k={params.k}")
        if len(f) != params.n or any(not 0 <= x < params.space.size for x in f):
            raise MalformedTranscript(
                f"f debe tener {params.n} entradas en 0..{params.space.size - 1}"
            )
        return cls(params=params, seed=seed, f=f, xi=xi, colour=colour, claimed_C=claimed)


def save_json(data: Dict, filepath: Union[str, Path]) -> Path:
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w', encoding='utf-8') as f:
        json.dump(data, f, ensure_ascii=False, indent=2)
    return filepath


def load_json(filepath: Union[str, Path]) -> Dict:
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise MalformedTranscript(f"No se pudo leer {filepath}: {e}") from e


def load_transcript(filepath: Union[str, Path]) -> Transcript:
    return Transcript.from_dict(load_json(filepath))


def load_deal(filepath: Union[str, Path]) -> Deal:
    return Deal.from_dict(load_json(filepath))
