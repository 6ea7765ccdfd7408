"""
Coloreados de rectas de F_q^d y sus propiedades
Densidad, riqueza, rectas distinguidas, intercambios (hue), líneas críticas,
coloreados perfectos y la construcción "knit" por clases de direcciones.

Los conjuntos de puntos (PointSet) son frozensets de índices de punto.
"""

import random
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np

from cartas.core.errors import (
    ColouringError,
    DuplicateColourInWitness,
    DuplicateSpecialLines,
    GeometryError,
    NotEnoughDirections,
    TooLargeForExhaustive,
    TooManySpecialLines,
)
from cartas.core.finite_geometry import AffineSpace, Line, Point
from cartas.utils.config import config_value


PointSet = FrozenSet[int]
LineLike = Union[int, Line]


def as_point_set(points: Iterable[Union[int, Point]]) -> PointSet:
    return frozenset(p.index if isinstance(p, Point) else int(p) for p in points)


def _line_idx(line: LineLike) -> int:
    return line.index if isinstance(line, Line) else int(line)


# ---------------------------------------------------------------------------
# Colouring
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Colouring:
    """
    Función total ξ: rectas → {1..k}.

    Dos codificaciones:
        - compacta: `by_direction[r]` (0 = usar `default`) más `exceptions`
          {índice de recta: color}, que tienen prioridad
        - densa: `by_line[i]` para cada recta
    """

    space: AffineSpace
    k: int
    by_direction: Tuple[int, ...] = ()
    exceptions: Mapping[int, int] = field(default_factory=dict)
    default: int = 1
    by_line: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.k < 1:
            raise ColouringError(f"Número de colores inválido: k={self.k}")
        if self.by_line:
            if len(self.by_line) != self.space.line_count:
                raise ColouringError(
                    f"by_line tiene {len(self.by_line)} entradas, se esperaban {self.space.line_count}"
                )
            bad = [c for c in self.by_line if not 1 <= c <= self.k]
        else:
            if len(self.by_direction) != self.space.direction_count:
                raise ColouringError(
                    f"by_direction tiene {len(self.by_direction)} entradas, "
                    f"se esperaban {self.space.direction_count}"
                )
            if not 1 <= self.default <= self.k:
                raise ColouringError(f"Color por defecto fuera de rango: {self.default}")
            bad = [c for c in self.by_direction if not 0 <= c <= self.k]
            bad += [c for c in self.exceptions.values() if not 1 <= c <= self.k]
            bad += [i for i in self.exceptions if not 0 <= i < self.space.line_count]
        if bad:
            raise ColouringError(f"Colores o índices fuera de rango: {bad[:5]}")

    # --- constructores ----------------------------------------------------

    @classmethod
    def trivial(cls, space: AffineSpace) -> 'Colouring':
        """El 1-coloreado: todas las rectas con color 1"""
        return cls(space=space, k=1, by_direction=(0,) * space.direction_count)

    @classmethod
    def dense(cls, space: AffineSpace, k: int, by_line: Sequence[int]) -> 'Colouring':
        return cls(space=space, k=k, by_line=tuple(int(c) for c in by_line))

    @classmethod
    def from_function(cls, space: AffineSpace, k: int, fn: Callable[[Line], int]) -> 'Colouring':
        return cls.dense(space, k, [fn(line) for line in space.all_lines()])

    @classmethod
    def from_dict(cls, space: AffineSpace, data: Mapping) -> 'Colouring':
        """Reconstruye desde la forma serializada (compacta o densa)"""
        if 'by_line' in data:
            by_line = [int(c) for c in data['by_line']]
            k = int(data.get('k', max(by_line)))
            return cls.dense(space, k, by_line)
        by_direction = tuple(int(c) for c in data['by_direction'])
        exceptions = {int(i): int(c) for i, c in data.get('exceptions', [])}
        default = int(data.get('default', 1))
        k = int(data.get('k', max([default, *by_direction, *exceptions.values()])))
        return cls(space=space, k=k, by_direction=by_direction, exceptions=exceptions, default=default)

    # --- consulta ---------------------------------------------------------

    @property
    def is_dense(self) -> bool:
        return bool(self.by_line)

    def direction_colour(self, rank: int) -> int:
        return self.by_direction[rank] or self.default

    def colour(self, line: LineLike) -> int:
        idx = _line_idx(line)
        if self.by_line:
            return self.by_line[idx]
        c = self.exceptions.get(idx)
        if c is not None:
            return c
        return self.direction_colour(idx // self.space.lines_per_direction)

    __call__ = colour

    @cached_property
    def lines_by_colour(self) -> Dict[int, List[Line]]:
        """Rectas agrupadas por color (recorre todo el espacio)"""
        groups: Dict[int, List[Line]] = {i: [] for i in range(1, self.k + 1)}
        for line in self.space.all_lines():
            groups[self.colour(line)].append(line)
        return groups

    # --- conversión -------------------------------------------------------

    def to_dense(self) -> 'Colouring':
        if self.is_dense:
            return self
        return Colouring.dense(self.space, self.k, [self.colour(i) for i in range(self.space.line_count)])

    def to_compact(self) -> 'Colouring':
        if not self.is_dense:
            return self
        default = Counter(self.by_line).most_common(1)[0][0]
        exceptions = {i: c for i, c in enumerate(self.by_line) if c != default}
        return Colouring(
            space=self.space,
            k=self.k,
            by_direction=(0,) * self.space.direction_count,
            exceptions=exceptions,
            default=default,
        )

    def to_dict(self) -> Dict:
        if self.is_dense:
            return {'k': self.k, 'by_line': list(self.by_line)}
        return {
            'k': self.k,
            'by_direction': list(self.by_direction),
            'exceptions': [[i, c] for i, c in sorted(self.exceptions.items())],
            'default': self.default,
        }

    def agrees_with(self, other: 'Colouring') -> bool:
        """Comparación recta a recta, con independencia de la codificación"""
        if self.space is not other.space or self.k != other.k:
            return False
        return all(self.colour(i) == other.colour(i) for i in range(self.space.line_count))


@dataclass(frozen=True)
class CriticalWitness:
    """Conjunto de rectas críticas con colores distintos dos a dos"""

    lines: Tuple[Line, ...]

    def colours(self, xi: Colouring) -> List[int]:
        return [xi.colour(line) for line in self.lines]

    @property
    def indices(self) -> List[int]:
        return [line.index for line in self.lines]


@dataclass
class HueClass:
    members: Set[PointSet]
    truncated: bool


@dataclass
class HueReport:
    """Resultado de is_very_distinguished: True/False, o None si se cortó por el tope"""

    very_distinguished: Optional[bool]
    truncated: bool
    bad_member: Optional[PointSet] = None
    members_explored: int = 0


# ---------------------------------------------------------------------------
# Incidencia con conjuntos de puntos
# ---------------------------------------------------------------------------

def line_members(space: AffineSpace, E: Iterable[int]) -> Dict[int, Set[int]]:
    """
    {índice de recta: puntos de E en ella} para las rectas con ≥ 2 puntos de E.

    Se obtiene agrupando los pares de puntos, sin recorrer todas las rectas.
    """
    pts = sorted(as_point_set(E))
    members: Dict[int, Set[int]] = {}
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            members.setdefault(space.line_index_of(x, y), set()).update((x, y))
    return members


def max_line_hit(space: AffineSpace, R: Iterable[int]) -> int:
    """max |h ∩ R| sobre todas las rectas h"""
    R = as_point_set(R)
    if len(R) <= 1:
        return len(R)
    return max(len(s) for s in line_members(space, R).values())


def lines_meeting(space: AffineSpace, E: Iterable[int], m: int) -> List[Line]:
    """
    L_m(E): las rectas ℓ con |ℓ ∩ E| ≥ m, en orden de índice.

    Args:
        space: Espacio afín
        E: Conjunto de puntos
        m: Umbral, 0 ≤ m ≤ q
    """
    E = as_point_set(E)
    if m <= 0:
        return space.all_lines()
    if m > space.q:
        return []
    if m == 1:
        found = {space.line_index_through(x, r) for x in E for r in range(space.direction_count)}
        return [space.line(i) for i in sorted(found)]
    members = line_members(space, E)
    return [space.line(i) for i in sorted(members) if len(members[i]) >= m]


def full_lines(space: AffineSpace, E: Iterable[int]) -> List[Line]:
    """Rectas contenidas por completo en E"""
    return lines_meeting(space, E, space.q)


# ---------------------------------------------------------------------------
# Densidad y riqueza
# ---------------------------------------------------------------------------

def density(xi: Colouring) -> int:
    """
    Mayor m tal que por cada punto pasan al menos m rectas de cada color.
    """
    space, k = xi.space, xi.k

    if xi.is_dense:
        counts = np.zeros((space.size, k + 1), dtype=np.int64)
        for idx, c in enumerate(xi.by_line):
            counts[list(space.line(idx).points), c] += 1
        return int(counts[:, 1:].min())

    base = [0] * (k + 1)
    for r in range(space.direction_count):
        base[xi.direction_colour(r)] += 1

    # Sólo los puntos de las excepciones se apartan del recuento por direcciones
    adjusted: Dict[int, List[int]] = {}
    for idx, c in xi.exceptions.items():
        cd = xi.direction_colour(idx // space.lines_per_direction)
        if c == cd:
            continue
        for x in space.line(idx).points:
            row = adjusted.setdefault(x, base.copy())
            row[cd] -= 1
            row[c] += 1

    candidates = [min(row[1:]) for row in adjusted.values()]
    if len(adjusted) < space.size:
        candidates.append(min(base[1:]))
    return min(candidates)


def is_rich(xi: Colouring, c: int, mode: str = 'density') -> bool:
    """
    ¿Es ξ c-rico?

    Args:
        xi: Coloreado
        c: Tamaño de la mano de Cath
        mode: 'density' (criterio suficiente densidad ≥ c+2) o 'exhaustive'
            (recorre todos los c-conjuntos)

    Raises:
        TooLargeForExhaustive: si el modo exhaustivo excede el límite configurado
    """
    if mode == 'density':
        return density(xi) >= c + 2
    if mode != 'exhaustive':
        raise ValueError(f"Modo de riqueza desconocido: {mode}")

    space = xi.space
    limit = int(config_value('colouring', 'exhaustive_rich_limit', 2_000_000))
    work = comb(space.size, c) * xi.k * space.size
    if work > limit:
        raise TooLargeForExhaustive(
            f"Comprobación exhaustiva demasiado grande ({work} > {limit}); usa mode='density'"
        )

    everything = frozenset(range(space.size))
    lines = {i: [line.points for line in group] for i, group in xi.lines_by_colour.items()}
    for C in combinations(range(space.size), c):
        C = frozenset(C)
        outside = everything - C
        if not outside:
            continue
        for group in lines.values():
            avoiding = [pts for pts in group if pts.isdisjoint(C)]
            if not avoiding:
                return False
            # Una recta de color i por cada x ∉ C
            if not outside <= frozenset().union(*avoiding):
                return False
            # Y otra que evite x: falla si todas las rectas pasan por algún x
            if frozenset.intersection(*avoiding) - C:
                return False
    return True


# ---------------------------------------------------------------------------
# Distinguidos, intercambios y hue
# ---------------------------------------------------------------------------

def is_distinguished(xi: Colouring, E: Iterable[int]) -> bool:
    """Las rectas contenidas en E tienen colores distintos dos a dos"""
    colours = [xi.colour(line) for line in full_lines(xi.space, E)]
    return len(colours) == len(set(colours))


def apply_swap(xi: Colouring, E: Iterable[int], ell: LineLike, h: LineLike) -> Optional[PointSet]:
    """
    Un intercambio E ≈₁ (E∖ℓ)∪h, o None si no es legal.

    Legal: ℓ ⊆ E, ξ(h) = ξ(ℓ) y h no corta E∖ℓ.
    """
    E = as_point_set(E)
    space = xi.space
    ell = space.line(_line_idx(ell))
    h = space.line(_line_idx(h))
    if not ell.points <= E or xi.colour(ell) != xi.colour(h):
        return None
    rest = E - ell.points
    if not h.points.isdisjoint(rest):
        return None
    return frozenset(rest | h.points)


def hue_neighbors(xi: Colouring, E: Iterable[int]) -> Set[PointSet]:
    """Todos los F con E ≈₁ F (incluye F = E con h = ℓ)"""
    E = as_point_set(E)
    out: Set[PointSet] = set()
    for ell in full_lines(xi.space, E):
        rest = E - ell.points
        for h in xi.lines_by_colour[xi.colour(ell)]:
            if h.points.isdisjoint(rest):
                out.add(frozenset(rest | h.points))
    return out


def _walk_hue(
    xi: Colouring,
    E: PointSet,
    cap: int,
    visit: Optional[Callable[[PointSet], bool]] = None,
) -> Tuple[Set[PointSet], bool, Optional[PointSet]]:
    """BFS sobre ≈₁; `visit` devuelve False para detener en un miembro"""
    seen: Set[PointSet] = {E}
    if visit is not None and not visit(E):
        return seen, False, E
    queue = [E]
    head = 0
    while head < len(queue):
        current = queue[head]
        head += 1
        for nxt in hue_neighbors(xi, current):
            if nxt in seen:
                continue
            if len(seen) >= cap:
                return seen, True, None
            seen.add(nxt)
            if visit is not None and not visit(nxt):
                return seen, False, nxt
            queue.append(nxt)
    return seen, False, None


def hue_explore(xi: Colouring, E: Iterable[int], cap: Optional[int] = None) -> HueClass:
    """
    Clausura reflexiva y transitiva de ≈₁ desde E.

    Se detiene con truncated=True cuando aparecería un miembro más allá de `cap`.
    """
    if cap is None:
        cap = int(config_value('colouring', 'hue_cap', 100_000))
    if cap < 1:
        raise ValueError("cap debe ser ≥ 1")
    members, truncated, _ = _walk_hue(xi, as_point_set(E), cap)
    return HueClass(members=members, truncated=truncated)


def is_very_distinguished(xi: Colouring, E: Iterable[int], cap: Optional[int] = None) -> HueReport:
    """
    Distinguido para todo F del mismo hue que E.

    Devuelve very_distinguished=None si se alcanzó el tope sin encontrar un
    miembro malo; en ese caso el certificado escalable es find_critical.
    """
    if cap is None:
        cap = int(config_value('colouring', 'hue_cap', 100_000))
    if cap < 1:
        raise ValueError("cap debe ser ≥ 1")
    members, truncated, bad = _walk_hue(xi, as_point_set(E), cap, lambda F: is_distinguished(xi, F))
    if bad is not None:
        return HueReport(False, False, bad, len(members))
    if truncated:
        return HueReport(None, True, None, len(members))
    return HueReport(True, False, None, len(members))


# ---------------------------------------------------------------------------
# Rectas críticas y coloreados perfectos
# ---------------------------------------------------------------------------

def check_critical(
    xi: Colouring,
    E: Iterable[int],
    L: Union[CriticalWitness, Sequence[Line]],
    q: Optional[int] = None,
    k: Optional[int] = None,
) -> bool:
    """
    ¿Es L un conjunto de rectas ξ-críticas para E?

    Para toda recta h: |(h ∩ E) ∖ ⋃L| < q − k.

    Raises:
        DuplicateColourInWitness: si dos rectas de L comparten color
    """
    lines = L.lines if isinstance(L, CriticalWitness) else tuple(L)
    q = q or xi.space.q
    k = k or xi.k
    colours = [xi.colour(line) for line in lines]
    if len(colours) != len(set(colours)):
        raise DuplicateColourInWitness(f"Colores repetidos en el testigo: {colours}")
    if len(lines) > k:
        return False
    covered = frozenset().union(*(line.points for line in lines)) if lines else frozenset()
    R = as_point_set(E) - covered
    return max_line_hit(xi.space, R) < q - k


class _BudgetExhausted(Exception):
    pass


def _search_witness(
    xi: Colouring,
    E: PointSet,
    forced: List[Line],
    pool: List[Line],
    budget: int,
) -> Optional[CriticalWitness]:
    """Backtracking: como mucho una recta del pool por cada color libre"""
    used = {xi.colour(line) for line in forced}
    by_colour: Dict[int, List[Line]] = {}
    for line in pool:
        c = xi.colour(line)
        if c not in used:
            by_colour.setdefault(c, []).append(line)
    colours = sorted(by_colour)
    tried = 0

    def extend(pos: int, chosen: List[Line]) -> Optional[List[Line]]:
        nonlocal tried
        if pos == len(colours):
            tried += 1
            if tried > budget:
                raise _BudgetExhausted
            return chosen if check_critical(xi, E, chosen) else None
        for option in [*by_colour[colours[pos]], None]:
            found = extend(pos + 1, chosen + [option] if option is not None else chosen)
            if found is not None:
                return found
        return None

    try:
        result = extend(0, list(forced))
    except _BudgetExhausted:
        return None
    return CriticalWitness(tuple(result)) if result is not None else None


def find_critical(
    xi: Colouring,
    E: Iterable[int],
    hint: Optional[Sequence[Line]] = None,
) -> Optional[CriticalWitness]:
    """
    Busca un testigo de criticidad para E.

    Orden de búsqueda:
        1. las rectas contenidas en E (obligatorias)
        2. `hint`, si se da y valida
        3. extensión voraz sobre L_{q−k}(E) por |h∩E| decreciente
        4. backtracking exhaustivo sobre L_{q−k}(E)
        5. backtracking con presupuesto sobre L_2(E) y después L_1(E); tras un
           intercambio las rectas críticas heredadas pueden cortar E en menos
           de q−k puntos

    Returns:
        CriticalWitness o None si no existe (o se agota el presupuesto)
    """
    E = as_point_set(E)
    space = xi.space
    q, k = space.q, xi.k
    if q - k <= 0:
        return None

    forced = full_lines(space, E)
    used = [xi.colour(line) for line in forced]
    if len(used) != len(set(used)) or len(forced) > k:
        return None
    if check_critical(xi, E, forced):
        return CriticalWitness(tuple(forced))

    if hint is not None:
        candidate = list({line.index: line for line in [*forced, *hint]}.values())
        try:
            if check_critical(xi, E, candidate):
                return CriticalWitness(tuple(sorted(candidate, key=lambda l: l.index)))
        except DuplicateColourInWitness:
            pass

    members = line_members(space, E)
    forced_idx = {line.index for line in forced}
    heavy = [line for line in lines_meeting(space, E, q - k) if line.index not in forced_idx]
    heavy.sort(key=lambda line: (-len(line.points & E), line.index))

    chosen = list(forced)
    taken = set(used)
    for line in heavy:
        c = xi.colour(line)
        if c not in taken:
            chosen.append(line)
            taken.add(c)
    if check_critical(xi, E, chosen):
        return CriticalWitness(tuple(chosen))

    budget = int(config_value('colouring', 'critical_search_budget', 200_000))
    witness = _search_witness(xi, E, forced, heavy, budget)
    if witness is not None:
        return witness

    if q - k > 2:
        pool = [space.line(i) for i in sorted(members) if i not in forced_idx]
        pool.sort(key=lambda line: (-len(members[line.index]), line.index))
        witness = _search_witness(xi, E, forced, pool, budget)
        if witness is not None:
            return witness

    pool = [line for line in lines_meeting(space, E, 1) if line.index not in forced_idx]
    pool.sort(key=lambda line: (-len(line.points & E), line.index))
    return _search_witness(xi, E, forced, pool, budget)


def is_perfect(xi: Colouring, E: Iterable[int], q: Optional[int] = None, k: Optional[int] = None) -> bool:
    """Las rectas de L_{q−k}(E) tienen colores distintos dos a dos"""
    q = q or xi.space.q
    k = k or xi.k
    colours = [xi.colour(line) for line in lines_meeting(xi.space, E, max(q - k, 0))]
    return len(colours) == len(set(colours))


# ---------------------------------------------------------------------------
# Construcción knit
# ---------------------------------------------------------------------------

def knit_colouring(
    space: AffineSpace,
    special: Sequence[Line],
    k: int,
    m: int,
    rng: random.Random,
    leftover: str = 'fixed',
) -> Colouring:
    """
    k-coloreado de densidad ≥ m con ξ(special[i]) = i+1.

    Se eligen al azar m·k direcciones que no sean de ninguna recta especial y
    se reparten en k clases de tamaño m; cada recta toma el color de la clase
    de su dirección. El resto de rectas recibe el color 1 ('fixed') o un color
    aleatorio ('random').

    Raises:
        DuplicateSpecialLines, TooManySpecialLines, NotEnoughDirections
    """
    indices = [line.index for line in special]
    if len(set(indices)) != len(indices):
        raise DuplicateSpecialLines(f"Rectas especiales repetidas: {indices}")
    if len(special) > k:
        raise TooManySpecialLines(f"{len(special)} rectas especiales para {k} colores")
    if leftover not in ('fixed', 'random'):
        raise ValueError(f"Modo de rectas sobrantes desconocido: {leftover}")

    special_dirs = {space.direction_rank(i) for i in indices}
    available = [r for r in range(space.direction_count) if r not in special_dirs]
    if len(available) < m * k:
        raise NotEnoughDirections(
            f"Hacen falta {m * k} direcciones libres y sólo hay {len(available)}"
        )

    chosen = rng.sample(available, m * k)
    by_direction = [0] * space.direction_count
    for pos, r in enumerate(chosen):
        by_direction[r] = pos // m + 1 if m else 0

    exceptions = {idx: i + 1 for i, idx in enumerate(indices)}
    if leftover == 'random':
        for r in range(space.direction_count):
            if by_direction[r]:
                continue
            start = r * space.lines_per_direction
            for idx in range(start, start + space.lines_per_direction):
                if idx not in exceptions:
                    exceptions[idx] = rng.randint(1, k)

    return Colouring(space=space, k=k, by_direction=tuple(by_direction), exceptions=exceptions, default=1)


# ---------------------------------------------------------------------------
# Ejemplo inseguro de F_3^2
# ---------------------------------------------------------------------------

FIGURE_A = ('00', '01', '02')
FIGURE_C = ('12', '22')


def figure_example_colouring(space: AffineSpace) -> Colouring:
    """
    2-coloreado inseguro de F_3^2 con A = {00,01,02}, C = {12,22}.

    Color 1: A, {02,11,20} y toda recta que corte C salvo {02,12,22}.
    Color 2: el resto (incluidas {02,12,22} y {02,10,21}).
    """
    if space.q != 3 or space.d != 2:
        raise GeometryError("El ejemplo sólo está definido en F_3^2")
    A = {space.point_from_label(s) for s in FIGURE_A}
    C = {space.point_from_label(s) for s in FIGURE_C}
    diagonal = space.line_containing(space.point_from_label(s) for s in ('02', '11', '20'))
    gap = space.line_containing(space.point_from_label(s) for s in ('02', '12', '22'))

    def colour(line: Line) -> int:
        if line.points == A or line == diagonal:
            return 1
        if line != gap and not line.points.isdisjoint(C):
            return 1
        return 2

    return Colouring.from_function(space, 2, colour)
