"""
Geometría afín sobre cuerpos finitos
Aritmética de GF(q) con q = p^n, puntos de F_q^d y rectas canónicas con índice estable.

Convenios de codificación (little-endian en todas partes):
    - elemento de GF(p^n): entero 0..q-1 cuyos dígitos en base p son los
      coeficientes del polinomio (dígito j = coeficiente de x^j)
    - punto de F_q^d: índice = Σ coords[i] · q^i
    - recta: índice = rango_dirección · q^(d-1) + rango_base, donde la base es el
      punto de menor índice de la recta y la dirección está normalizada
      (primera coordenada no nula igual a 1)
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import galois
import numpy as np

from cartas.core.errors import (
    CoincidentPoints,
    FieldError,
    GeometryError,
    NoDefaultModulus,
    NotALine,
    NotPrime,
    ReducibleModulus,
)
from cartas.utils.config import config_value


Modulus = Tuple[int, ...]

# Por encima de este número de puntos no se cachean las coordenadas
_COORDS_CACHE_LIMIT = 1 << 18


def sigma(d: int, n: int) -> int:
    """
    σ_d(n) = n^(d-1) + ... + n + 1 = (n^d - 1) / (n - 1).

    Es el número de direcciones de F_n^d y de rectas por cada punto.
    """
    return sum(n ** i for i in range(d))


# ---------------------------------------------------------------------------
# Cuerpos finitos
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Field:
    """
    GF(q), q = p^n. Los elementos son enteros 0..q-1.

    `modulus` guarda los coeficientes (orden creciente, mónico) del polinomio
    irreducible de grado n; vacío para cuerpos primos.
    """

    p: int
    n: int
    modulus: Modulus = ()
    _add: Tuple[Tuple[int, ...], ...] = field(default=(), repr=False, compare=False)
    _mul: Tuple[Tuple[int, ...], ...] = field(default=(), repr=False, compare=False)
    _neg: Tuple[int, ...] = field(default=(), repr=False, compare=False)
    _inv: Tuple[int, ...] = field(default=(), repr=False, compare=False)
    _gf: object = field(default=None, repr=False, compare=False)

    @property
    def q(self) -> int:
        return self.p ** self.n

    @property
    def elements(self) -> range:
        return range(self.q)

    def add(self, x: int, y: int) -> int:
        if self._add:
            return self._add[x][y]
        if self.n == 1:
            return (x + y) % self.p
        return int(self._gf(x) + self._gf(y))

    def neg(self, x: int) -> int:
        if self._neg:
            return self._neg[x]
        if self.n == 1:
            return (-x) % self.p
        return int(-self._gf(x))

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if self._mul:
            return self._mul[x][y]
        if self.n == 1:
            return (x * y) % self.p
        return int(self._gf(x) * self._gf(y))

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 no tiene inverso en un cuerpo")
        if self._inv:
            return self._inv[x]
        if self.n == 1:
            return pow(x, -1, self.p)
        return int(self._gf(x) ** -1)

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def __str__(self) -> str:
        return f"GF({self.q})"


def _poly_over(p: int, modulus: Sequence[int]) -> galois.Poly:
    """Polinomio de galois a partir de coeficientes en orden creciente"""
    return galois.Poly(list(reversed(list(modulus))), field=galois.GF(p))


def is_irreducible(p: int, modulus: Sequence[int]) -> bool:
    """Irreducibilidad sobre F_p de un polinomio dado en orden creciente"""
    return bool(_poly_over(p, modulus).is_irreducible())


def _normalize_modulus(p: int, n: int, modulus: Sequence[int]) -> Modulus:
    coeffs = [int(c) % p for c in modulus]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) != n + 1:
        raise FieldError(f"El módulo {list(modulus)} no tiene grado {n} sobre F_{p}")
    lead_inv = pow(coeffs[-1], -1, p)
    return tuple((c * lead_inv) % p for c in coeffs)


@lru_cache(maxsize=None)
def default_moduli() -> Dict[int, Modulus]:
    """
    Tabla de módulos por defecto (config/protocolo.yaml → campos.moduli_por_defecto).

    Cada entrada se valida con un test de irreducibilidad al cargarse.
    """
    raw = config_value('campos', 'moduli_por_defecto', None) or {
        4: [1, 1, 1],
        8: [1, 1, 0, 1],
        9: [1, 0, 1],
        16: [1, 1, 0, 0, 1],
        25: [3, 0, 1],
        27: [1, 2, 0, 1],
    }
    table: Dict[int, Modulus] = {}
    for q, coeffs in raw.items():
        q = int(q)
        primes, exps = galois.factors(q)
        if len(primes) != 1:
            raise FieldError(f"Entrada {q} de la tabla de módulos no es potencia de primo")
        p, n = int(primes[0]), int(exps[0])
        modulus = _normalize_modulus(p, n, coeffs)
        if not is_irreducible(p, modulus):
            raise ReducibleModulus(f"Módulo por defecto para q={q} es reducible: {list(coeffs)}")
        table[q] = modulus
    return table


@lru_cache(maxsize=None)
def _build_field(p: int, n: int, modulus: Modulus) -> Field:
    q = p ** n
    table_max = int(config_value('campos', 'tabla_maxima', 1024))

    if n == 1:
        if q > table_max:
            return Field(p=p, n=1)
        add = tuple(tuple((x + y) % p for y in range(p)) for x in range(p))
        mul = tuple(tuple((x * y) % p for y in range(p)) for x in range(p))
        neg = tuple((-x) % p for x in range(p))
        inv = (0,) + tuple(pow(x, -1, p) for x in range(1, p))
        return Field(p=p, n=1, _add=add, _mul=mul, _neg=neg, _inv=inv)

    gf = galois.GF(q, irreducible_poly=_poly_over(p, modulus))
    if q > table_max:
        return Field(p=p, n=n, modulus=modulus, _gf=gf)

    x = gf.elements
    add = (x[:, None] + x[None, :]).view(np.ndarray).tolist()
    mul = (x[:, None] * x[None, :]).view(np.ndarray).tolist()
    neg = (-x).view(np.ndarray).tolist()
    inv = [0] + (x[1:] ** -1).view(np.ndarray).tolist()
    return Field(
        p=p,
        n=n,
        modulus=modulus,
        _add=tuple(tuple(int(v) for v in row) for row in add),
        _mul=tuple(tuple(int(v) for v in row) for row in mul),
        _neg=tuple(int(v) for v in neg),
        _inv=tuple(int(v) for v in inv),
        _gf=gf,
    )


def field_make(p: int, n: int = 1, modulus: Optional[Sequence[int]] = None) -> Field:
    """
    Construye GF(p^n).

    Args:
        p: Característica (debe ser primo)
        n: Grado de la extensión
        modulus: Coeficientes en orden creciente de un polinomio irreducible de
            grado n; si se omite y n > 1 se usa la tabla por defecto

    Raises:
        NotPrime, ReducibleModulus, NoDefaultModulus
    """
    if not galois.is_prime(int(p)):
        raise NotPrime(f"{p} no es primo")
    if n < 1:
        raise FieldError(f"Grado de extensión inválido: {n}")

    if n == 1:
        # Un cuerpo primo no lleva módulo; se ignora [] o un polinomio de grado 1
        if modulus and len(modulus) > 2:
            raise FieldError("Un cuerpo primo no lleva módulo de grado > 1")
        return _build_field(int(p), 1, ())

    q = p ** n
    if modulus is None or len(modulus) == 0:
        table = default_moduli()
        if q not in table:
            raise NoDefaultModulus(f"No hay módulo por defecto para q={q}; indícalo explícitamente")
        normalized = table[q]
    else:
        normalized = _normalize_modulus(p, n, modulus)
        if not is_irreducible(p, normalized):
            raise ReducibleModulus(f"El polinomio {list(modulus)} es reducible sobre F_{p}")
    return _build_field(int(p), int(n), normalized)


def field_for_order(q: int, modulus: Optional[Sequence[int]] = None) -> Field:
    """GF(q) a partir del orden, factorizando q = p^n"""
    if q < 2 or not galois.is_prime_power(int(q)):
        raise NotPrime(f"{q} no es potencia de un primo")
    primes, exps = galois.factors(int(q))
    return field_make(int(primes[0]), int(exps[0]), modulus)


# ---------------------------------------------------------------------------
# Puntos y rectas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    coords: Tuple[int, ...]
    index: int


@dataclass(frozen=True)
class Line:
    """
    Recta afín { base + λ·direction : λ ∈ F_q } en forma canónica.

    `points` son índices de punto; dos Line son iguales sii lo son sus puntos.
    """

    base: Point
    direction: Point
    points: FrozenSet[int]
    index: int

    def __contains__(self, point: Union[int, Point]) -> bool:
        if isinstance(point, Point):
            point = point.index
        return point in self.points

    def __len__(self) -> int:
        return len(self.points)


PointLike = Union[int, Point]


class AffineSpace:
    """
    El espacio afín F_q^d con enumeración canónica de puntos y rectas.

    Todo es inmutable tras la construcción; se puede compartir entre hilos.
    """

    def __init__(self, field: Field, d: int):
        if d < 2:
            raise GeometryError(f"Dimensión no soportada: d={d} (mínimo 2)")
        self.field = field
        self.d = d
        self.q = field.q
        self.size = self.q ** d
        self._pow = [self.q ** i for i in range(d + 1)]

        self._coords: Optional[List[Tuple[int, ...]]] = None
        if self.size <= _COORDS_CACHE_LIMIT:
            self._coords = [t[::-1] for t in product(range(self.q), repeat=d)]

        # Direcciones normalizadas: coordenada pivote = 1, anteriores = 0
        dirs = []
        for j in range(d):
            for rest in range(self.q ** (d - j - 1)):
                dirs.append(self._pow[j] + rest * self._pow[j + 1])
        dirs.sort()
        self.directions: Tuple[int, ...] = tuple(dirs)
        self._dir_rank = {v: r for r, v in enumerate(self.directions)}
        self._dir_coords = [self.coords(v) for v in self.directions]
        self._dir_last = [max(i for i, c in enumerate(yc) if c) for yc in self._dir_coords]
        self._dir_last_inv = [field.inv(yc[t]) for yc, t in zip(self._dir_coords, self._dir_last)]

        self.lines_per_direction = self.q ** (d - 1)
        self.line_count = len(self.directions) * self.lines_per_direction

    def __repr__(self) -> str:
        return f"AffineSpace({self.field}, d={self.d})"

    # --- puntos -----------------------------------------------------------

    def coords(self, index: int) -> Tuple[int, ...]:
        if self._coords is not None:
            return self._coords[index]
        out = []
        for _ in range(self.d):
            index, r = divmod(index, self.q)
            out.append(r)
        return tuple(out)

    def encode(self, coords: Sequence[int]) -> int:
        return sum(c * self._pow[i] for i, c in enumerate(coords))

    def point(self, coords: Sequence[int]) -> Point:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.d or any(not 0 <= c < self.q for c in coords):
            raise GeometryError(f"Coordenadas fuera de F_{self.q}^{self.d}: {coords}")
        return Point(coords=coords, index=self.encode(coords))

    def point_at(self, index: int) -> Point:
        if not 0 <= index < self.size:
            raise GeometryError(f"Índice de punto fuera de rango: {index}")
        return Point(coords=self.coords(index), index=index)

    def label(self, point: PointLike) -> str:
        """Notación de las figuras: '02' para (0,2) cuando q ≤ 10"""
        c = self.coords(_idx(point))
        if self.q <= 10:
            return ''.join(str(v) for v in c)
        return '(' + ','.join(str(v) for v in c) + ')'

    def point_from_label(self, label: str) -> int:
        text = label.strip()
        if text.startswith('('):
            coords = [int(v) for v in text.strip('()').split(',')]
        else:
            coords = [int(ch) for ch in text]
        return self.point(coords).index

    # --- rectas -----------------------------------------------------------

    @property
    def direction_count(self) -> int:
        return len(self.directions)

    def direction_rank(self, line_index: int) -> int:
        return line_index // self.lines_per_direction

    def line_index_through(self, point: PointLike, rank: int) -> int:
        """Índice de la recta por `point` con la dirección de rango `rank`"""
        F = self.field
        xc = self.coords(_idx(point))
        yc = self._dir_coords[rank]
        t = self._dir_last[rank]
        lam = F.neg(F.mul(xc[t], self._dir_last_inv[rank]))
        base_rank = 0
        for i in range(self.d):
            if i == t:
                continue
            ci = F.add(xc[i], F.mul(lam, yc[i])) if yc[i] else xc[i]
            base_rank += ci * (self._pow[i] if i < t else self._pow[i - 1])
        return rank * self.lines_per_direction + base_rank

    def line_index_of(self, x: PointLike, y: PointLike) -> int:
        """Índice de la única recta que pasa por dos puntos distintos"""
        xi, yi = _idx(x), _idx(y)
        if xi == yi:
            raise CoincidentPoints(f"Los puntos coinciden: {self.label(xi)}")
        F = self.field
        diff = [F.sub(b, a) for a, b in zip(self.coords(xi), self.coords(yi))]
        pivot = next(v for v in diff if v)
        inv = F.inv(pivot)
        rank = self._dir_rank[self.encode([F.mul(v, inv) for v in diff])]
        return self.line_index_through(xi, rank)

    def line(self, index: int) -> Line:
        if not 0 <= index < self.line_count:
            raise GeometryError(f"Índice de recta fuera de rango: {index}")
        return self._line(index)

    @lru_cache(maxsize=1 << 16)
    def _line(self, index: int) -> Line:
        rank, base_rank = divmod(index, self.lines_per_direction)
        t = self._dir_last[rank]
        low, high = base_rank % self._pow[t], base_rank // self._pow[t]
        base = low + high * self._pow[t + 1]
        return Line(
            base=self.point_at(base),
            direction=self.point_at(self.directions[rank]),
            points=frozenset(self._points_on(base, rank)),
            index=index,
        )

    def _points_on(self, base: int, rank: int) -> List[int]:
        F = self.field
        bc = self.coords(base)
        yc = self._dir_coords[rank]
        return [
            self.encode([F.add(b, F.mul(lam, y)) for b, y in zip(bc, yc)])
            for lam in F.elements
        ]

    def all_lines(self) -> List[Line]:
        """Todas las rectas, ordenadas por (dirección, base)"""
        return [self.line(i) for i in range(self.line_count)]

    def lines_through(self, point: PointLike) -> List[Line]:
        """Las σ_d(q) rectas que pasan por `point`, en orden de dirección"""
        return [self.line(self.line_index_through(point, r)) for r in range(self.direction_count)]

    def line_from_points(self, x1: PointLike, x2: PointLike) -> Line:
        return self.line(self.line_index_of(x1, x2))

    def line_containing(self, points: Iterable[PointLike]) -> Line:
        """La recta cuyo conjunto de puntos es exactamente `points`"""
        pts = sorted({_idx(x) for x in points})
        if len(pts) != self.q:
            raise NotALine(f"{len(pts)} puntos no forman una recta de F_{self.q}^{self.d}")
        line = self.line_from_points(pts[0], pts[1])
        if line.points != frozenset(pts):
            raise NotALine("Los puntos no están alineados")
        return line


def _idx(point: PointLike) -> int:
    return point.index if isinstance(point, Point) else int(point)


@lru_cache(maxsize=None)
def affine_space(field: Field, d: int) -> AffineSpace:
    """Espacio compartido por (cuerpo, dimensión)"""
    return AffineSpace(field, d)


def all_lines(field: Field, d: int) -> List[Line]:
    return affine_space(field, d).all_lines()
