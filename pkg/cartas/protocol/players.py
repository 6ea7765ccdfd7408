"""
Jugadores del protocolo de coloreado y la máquina de estados de cuatro pasos

    1. Alice anuncia una biyección f: D → F_a^d con f(A) una recta
    2. Bob anuncia un k-coloreado rico y muy distinguido para f(A ∪ C)
    3. Alice anuncia el color de f(A)
    4. Bob anuncia C

Cada anuncio se calcula sólo con la mano del jugador y los anuncios previos.
"""

import random
from abc import ABC, abstractmethod
from typing import Any, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from cartas.core.colouring import Colouring, full_lines, knit_colouring, lines_meeting
from cartas.core.errors import (
    AmbiguousLine,
    NoMatchingLine,
    ProtocolError,
    SizeMismatch,
    TooManyHeavyLines,
)
from cartas.protocol.transcript import Deal, ProtocolParams, Transcript, seeded_rng
from cartas.utils.config import config_value, load_config


Bijection = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Pasos del protocolo
# ---------------------------------------------------------------------------

def alice_map(dealA: Iterable[int], params: ProtocolParams, rng: random.Random) -> Bijection:
    """
    Paso 1: biyección aleatoria con las cartas de Alice sobre una recta.

    Se elige una recta uniforme, una biyección uniforme de A sobre ella y otra
    del resto de cartas sobre el resto de puntos.

    Returns:
        f con f[carta - 1] = índice de punto

    Raises:
        SizeMismatch: si |A| ≠ a
    """
    hand = sorted(dealA)
    if len(hand) != params.a:
        raise SizeMismatch(f"Alice tiene {len(hand)} cartas y el cuerpo tiene orden {params.a}")
    space = params.space

    line = space.line(rng.randrange(space.line_count))
    line_points = sorted(line.points)
    rng.shuffle(line_points)
    rest_points = [x for x in range(space.size) if x not in line.points]
    rng.shuffle(rest_points)

    hand_set = set(hand)
    others = [card for card in range(1, params.n + 1) if card not in hand_set]

    f = [0] * params.n
    for card, x in zip(hand, line_points):
        f[card - 1] = x
    for card, x in zip(others, rest_points):
        f[card - 1] = x
    return tuple(f)


def _outside_hand(f: Sequence[int], hand: FrozenSet[int]) -> FrozenSet[int]:
    return frozenset(x for card, x in enumerate(f, start=1) if card not in hand)


def bob_colouring(
    f: Sequence[int],
    dealB: Iterable[int],
    params: ProtocolParams,
    rng: random.Random,
    leftover: str = 'fixed',
) -> Colouring:
    """
    Paso 2: coloreado knit perfecto para E = f(D ∖ B) con densidad c+2.

    Las rectas (a−k)-pesadas de E se barajan y la i-ésima recibe el color i.

    Raises:
        SizeMismatch, TooManyHeavyLines, NotEnoughDirections
    """
    hand = frozenset(dealB)
    if len(hand) != params.b:
        raise SizeMismatch(f"Bob tiene {len(hand)} cartas, se esperaban {params.b}")
    space = params.space

    E = _outside_hand(f, hand)
    special = lines_meeting(space, E, params.a - params.k)
    rng.shuffle(special)
    if len(special) > params.k:
        raise TooManyHeavyLines(
            f"|L_{params.a - params.k}(E)| = {len(special)} > k = {params.k}: parámetros no ejecutables"
        )
    return knit_colouring(space, special, params.k, params.c + 2, rng, leftover)


def alice_colour(f: Sequence[int], xi: Colouring, dealA: Iterable[int], params: ProtocolParams) -> int:
    """
    Paso 3: el color de la recta f(A).

    Raises:
        NotALine: si f(A) no es una recta
    """
    line = params.space.line_containing(f[card - 1] for card in dealA)
    return xi.colour(line)


def bob_deduce(
    f: Sequence[int],
    xi: Colouring,
    colour: int,
    dealB: Iterable[int],
    params: ProtocolParams,
) -> FrozenSet[int]:
    """
    Paso 4: la única recta del color anunciado dentro de f(D ∖ B) es f(A);
    el resto de D ∖ B es C.

    Raises:
        NoMatchingLine, AmbiguousLine
    """
    hand = frozenset(dealB)
    E = _outside_hand(f, hand)
    matches = [line for line in full_lines(params.space, E) if xi.colour(line) == colour]
    if not matches:
        raise NoMatchingLine(f"Ninguna recta de color {colour} dentro de f(D∖B)")
    if len(matches) > 1:
        raise AmbiguousLine(
            f"{len(matches)} rectas de color {colour} dentro de f(D∖B): {[l.index for l in matches]}"
        )
    line = matches[0]
    return frozenset(
        card for card, x in enumerate(f, start=1)
        if card not in hand and x not in line.points
    )


# ---------------------------------------------------------------------------
# Jugadores
# ---------------------------------------------------------------------------

class Player(ABC):
    """
    Clase base de los jugadores.

    Cada jugador conoce sólo su mano y los anuncios públicos (`run`).
    Los hijos deben implementar announce().
    """

    name = 'player'

    def __init__(self, params: ProtocolParams, hand: Iterable[int], rng: random.Random, verbose: bool = False):
        self.params = params
        self.hand = frozenset(hand)
        self.rng = rng
        self.verbose = verbose
        self.config = load_config('protocolo')

    @abstractmethod
    def announce(self, run: List[Any]) -> Any:
        """
        Siguiente anuncio dado lo anunciado hasta ahora.

        Args:
            run: Anuncios previos en orden (f, ξ, color)

        Returns:
            El anuncio de este turno
        """
        pass

    def _not_my_turn(self, run: List[Any]) -> ProtocolError:
        return ProtocolError(f"No es el turno de {self.name} (paso {len(run) + 1})")

    def _log(self, message: str):
        if self.verbose:
            print(f"   {message}")


class Alice(Player):
    name = 'Alice'

    def announce(self, run: List[Any]) -> Any:
        if len(run) == 0:
            f = alice_map(self.hand, self.params, self.rng)
            self._log("🃏 Alice anuncia f (sus cartas forman una recta)")
            return f
        if len(run) == 2:
            colour = alice_colour(run[0], run[1], self.hand, self.params)
            self._log(f"🎨 Alice anuncia el color {colour}")
            return colour
        raise self._not_my_turn(run)


class Bob(Player):
    name = 'Bob'

    def __init__(self, params: ProtocolParams, hand: Iterable[int], rng: random.Random,
                 leftover: Optional[str] = None, verbose: bool = False):
        super().__init__(params, hand, rng, verbose)
        self.leftover = leftover or self.config.get('leftover', 'fixed')

    def announce(self, run: List[Any]) -> Any:
        if len(run) == 1:
            xi = bob_colouring(run[0], self.hand, self.params, self.rng, self.leftover)
            self._log(f"🎨 Bob anuncia un {self.params.k}-coloreado ({len(xi.exceptions)} excepciones)")
            return xi
        if len(run) == 3:
            C = bob_deduce(run[0], run[1], run[2], self.hand, self.params)
            self._log(f"✅ Bob anuncia C = {sorted(C)}")
            return C
        raise self._not_my_turn(run)


def run_protocol(
    deal: Deal,
    params: ProtocolParams,
    seed: Optional[int] = None,
    leftover: Optional[str] = None,
    verbose: bool = False,
) -> Transcript:
    """
    Ejecuta los cuatro pasos (Alice, Bob, Alice, Bob).

    Cada jugador usa su propio flujo aleatorio derivado de `seed`.

    Raises:
        SizeMismatch si el reparto no casa con los parámetros; el resto de
        errores de cada paso se propagan
    """
    if (deal.a, deal.b, deal.c) != (params.a, params.b, params.c):
        raise SizeMismatch(
            f"Reparto de tamaño {(deal.a, deal.b, deal.c)} para parámetros {(params.a, params.b, params.c)}"
        )
    if seed is None:
        seed = int(config_value('protocolo', 'default_seed', 2025))

    alice = Alice(params, deal.A, seeded_rng(seed, 'alice'), verbose=verbose)
    bob = Bob(params, deal.B, seeded_rng(seed, 'bob'), leftover=leftover, verbose=verbose)

    run: List[Any] = []
    for player in (alice, bob, alice, bob):
        run.append(player.announce(run))

    f, xi, colour, claimed = run
    return Transcript(
        params=params,
        seed=seed,
        f=tuple(f),
        xi=xi,
        colour=colour,
        claimed_C=tuple(sorted(claimed)),
    )
