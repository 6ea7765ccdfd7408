"""
Factibilidad de parámetros del protocolo de coloreado
Las cinco condiciones de ejecutabilidad, la cota de conteo de rectas pesadas,
los regímenes asintóticos (d = 3 y d = 4) y el atlas de factibilidad.

Toda la aritmética es entera; no hay coma flotante en ninguna condición.
"""

from dataclasses import asdict, dataclass
from itertools import combinations
from math import comb, isqrt
from typing import Dict, List, Optional, Sequence

import galois
import pandas as pd

from cartas.core.errors import RegimeInfeasibleAtThisA
from cartas.core.finite_geometry import affine_space, field_for_order, sigma
from cartas.core.parallel import parallel_map
from cartas.utils.config import config_value


def is_prime_power(a: int) -> bool:
    return a >= 2 and bool(galois.is_prime_power(int(a)))


def heavy_bound(q: int, k: int) -> int:
    """(k+1)(q−k) − k(k+1)/2; k(k+1) siempre es par"""
    return (k + 1) * (q - k) - k * (k + 1) // 2


def bound_heavy_lines(q: int, k: int, sizeE: int) -> bool:
    """
    Cota de conteo: si |E| < (k+1)(q−k) − k(k+1)/2 entonces |L_{q−k}(E)| ≤ k.

    Devuelve True cuando el tamaño de E está por debajo de la cota.
    """
    return sizeE < heavy_bound(q, k)


@dataclass
class FeasibilityReport:
    a: int
    b: int
    c: int
    d: int
    k: int
    cond1: bool
    cond2: bool
    cond3: bool
    cond4: bool
    cond5: bool
    via: str
    simplified_ok: bool
    feasible: bool

    def to_dict(self) -> Dict:
        return asdict(self)

    @property
    def ratio(self) -> float:
        return self.c / self.a if self.a else 0.0


def exhaustive_condition4(a: int, c: int, d: int, k: int) -> Optional[bool]:
    """
    Condición 4 exacta: ningún S con |S| ≤ a+c tiene k+1 rectas (a−k)-pesadas.

    Recorre los (k+1)-conjuntos de rectas y, para cada uno, el menor S que las
    hace pesadas a todas (eligiendo qué puntos de intersección usar). Sólo
    para a^d pequeño; devuelve None si excede el tamaño o el presupuesto.
    """
    max_points = int(config_value('params', 'exhaustive_max_points', 81))
    budget = int(config_value('params', 'exhaustive_budget', 2_000_000))
    if not is_prime_power(a) or a ** d > max_points or not 0 < k < a:
        return None

    space = affine_space(field_for_order(a), d)
    need = a - k
    limit = a + c
    if comb(space.line_count, k + 1) > budget:
        return None

    lines = space.all_lines()
    for group in combinations(lines, k + 1):
        crossings = set()
        for g, h in combinations(group, 2):
            crossings |= g.points & h.points
        crossings = sorted(crossings)
        private = [len(line.points) - len(line.points.intersection(crossings)) for line in group]

        best = None
        for size in range(len(crossings) + 1):
            if best is not None and size >= best:
                break
            for chosen in combinations(crossings, size):
                chosen = set(chosen)
                total = size
                ok = True
                for line, free in zip(group, private):
                    missing = need - len(line.points & chosen)
                    if missing > free:
                        ok = False
                        break
                    total += max(0, missing)
                if ok and (best is None or total < best):
                    best = total
        if best is not None and best <= limit:
            return False
    return True


def feasible(a: int, c: int, d: int, k: int, exhaustive: bool = False) -> FeasibilityReport:
    """
    Evalúa las cinco condiciones de ejecutabilidad:
        1. a es potencia de primo
        2. b = a^d − a − c ≥ 0
        3. 0 < k < a
        4. |L_{a−k}(S)| ≤ k para todo |S| ≤ a+c (vía la cota de conteo, o
           exhaustiva si se pide y el espacio es pequeño)
        5. σ_d(a) ≥ k(c+3)
    """
    b = a ** d - a - c
    cond1 = is_prime_power(a)
    cond2 = b >= 0 and c >= 0
    cond3 = 0 < k < a

    via = 'counting_bound'
    cond4 = cond3 and bound_heavy_lines(a, k, a + c)
    if exhaustive and cond1 and cond3:
        exact = exhaustive_condition4(a, c, d, k)
        if exact is not None:
            cond4, via = exact, 'exhaustive'

    cond5 = sigma(d, a) >= k * (c + 3)
    simplified_ok = 2 * c < 2 * a * k - 3 * k * (k + 1)

    return FeasibilityReport(
        a=a, b=b, c=c, d=d, k=k,
        cond1=cond1, cond2=cond2, cond3=cond3, cond4=cond4, cond5=cond5,
        via=via,
        simplified_ok=simplified_ok,
        feasible=all((cond1, cond2, cond3, cond4, cond5)),
    )


def search_k(a: int, c: int, d: int) -> Optional[int]:
    """Menor k ≥ 1 con parámetros factibles, o None"""
    for k in range(1, a):
        if feasible(a, c, d, k).feasible:
            return k
    return None


def dimension_for(a: int, b: int, c: int) -> Optional[int]:
    """d con a+b+c = a^d, o None si no hay solución entera"""
    total = a + b + c
    if a < 2:
        return None
    d, power = 1, a
    while power < total:
        power *= a
        d += 1
    return d if power == total else None


@dataclass
class SuggestedParams:
    regime: str
    a: int
    d: int
    k: int
    c: int
    b: int
    report: FeasibilityReport


REGIMES = ('d3', 'd4')


def suggest_params(a: int, regime: str = 'd3') -> SuggestedParams:
    """
    Parámetros del régimen asintótico.

    d3: k ≈ √a, c ≈ a^{3/2}/2
    d4: k ≈ a/2, c ≈ a²/9

    Raises:
        RegimeInfeasibleAtThisA: si el informe no es factible para este a
    """
    if regime == 'd3':
        d = 3
        k = (isqrt(4 * a) + 1) // 2
        c = isqrt(a ** 3) // 2
    elif regime == 'd4':
        d = 4
        k = (a + 1) // 2
        c = a * a // 9
    else:
        raise ValueError(f"Régimen desconocido: {regime} (usa {', '.join(REGIMES)})")

    report = feasible(a, c, d, k)
    if not report.feasible:
        raise RegimeInfeasibleAtThisA(
            f"El régimen {regime} no es factible con a={a} (k={k}, c={c})"
        )
    return SuggestedParams(regime=regime, a=a, d=d, k=k, c=c, b=report.b, report=report)


def c_max(a: int, d: int, k: int) -> Optional[int]:
    """Mayor c que cumple las condiciones 2, 4 y 5 (None si ninguno)"""
    if not is_prime_power(a) or not 0 < k < a:
        return None
    by_cond2 = a ** d - a
    by_cond4 = heavy_bound(a, k) - a - 1
    by_cond5 = sigma(d, a) // k - 3
    best = min(by_cond2, by_cond4, by_cond5)
    return best if best >= 0 else None


def prime_powers(max_a: int, min_a: int = 2) -> List[int]:
    return [a for a in range(min_a, max_a + 1) if is_prime_power(a)]


def sweep(max_a: int, ds: Sequence[int] = (2, 3, 4), max_workers: Optional[int] = None) -> pd.DataFrame:
    """
    Atlas de factibilidad: para cada potencia de primo a ≤ max_a, d y k, el
    mayor c factible.

    Returns:
        DataFrame con columnas a, d, k, c_max, b
    """
    workers = max_workers or int(config_value('paralelo', 'max_workers', 4))

    def rows_for(a: int) -> List[Dict]:
        rows = []
        for d in ds:
            for k in range(1, a):
                cm = c_max(a, d, k)
                if cm is not None:
                    rows.append({'a': a, 'd': d, 'k': k, 'c_max': cm, 'b': a ** d - a - cm})
        return rows

    chunks = parallel_map(prime_powers(max_a), rows_for, max_workers=workers)
    rows = [row for chunk in chunks if chunk for row in chunk]
    df = pd.DataFrame(rows, columns=['a', 'd', 'k', 'c_max', 'b'])
    return df.sort_values(['a', 'd', 'k']).reset_index(drop=True)


def corollary_table(max_a: int = 169, max_n: int = 5) -> pd.DataFrame:
    """
    Para cada N ≤ max_n, la menor potencia de primo a ≤ max_a cuya sugerencia
    d3 es factible con c/a > N.

    Returns:
        DataFrame con columnas N, a, k, c, b, ratio (a vacío si no se alcanza)
    """
    candidates = []
    for a in prime_powers(max_a):
        try:
            candidates.append(suggest_params(a, 'd3'))
        except RegimeInfeasibleAtThisA:
            continue

    rows = []
    for n in range(1, max_n + 1):
        hit = next((s for s in candidates if s.c > n * s.a), None)
        if hit is None:
            rows.append({'N': n, 'a': None, 'k': None, 'c': None, 'b': None, 'ratio': None})
        else:
            rows.append({'N': n, 'a': hit.a, 'k': hit.k, 'c': hit.c, 'b': hit.b,
                         'ratio': round(hit.c / hit.a, 4)})
    return pd.DataFrame(rows, columns=['N', 'a', 'k', 'c', 'b', 'ratio'])
