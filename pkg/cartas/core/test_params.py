"""
Tests de factibilidad de parámetros
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from cartas.core.colouring import lines_meeting
from cartas.core.errors import RegimeInfeasibleAtThisA
from cartas.core.finite_geometry import affine_space, field_for_order
from cartas.core.params import (
    bound_heavy_lines,
    c_max,
    corollary_table,
    dimension_for,
    exhaustive_condition4,
    feasible,
    heavy_bound,
    search_k,
    suggest_params,
    sweep,
)


def test_heavy_bound():
    assert heavy_bound(7, 2) == 12
    assert heavy_bound(7, 1) == 11
    assert heavy_bound(3, 2) == 0
    assert bound_heavy_lines(7, 2, 11)
    assert not bound_heavy_lines(7, 2, 12)


def test_feasible_examples():
    report = feasible(7, 1, 2, 2)
    assert report.feasible
    assert report.b == 41
    assert report.via == 'counting_bound'
    assert report.simplified_ok

    assert feasible(7, 4, 3, 2).feasible
    assert feasible(7, 4, 3, 2).b == 332
    assert feasible(7, 0, 2, 2).feasible

    assert not feasible(6, 1, 2, 2).cond1
    assert not feasible(7, 50, 2, 2).cond2
    assert not feasible(7, 1, 2, 7).cond3
    assert not feasible(3, 1, 2, 1).cond4
    assert not feasible(7, 2, 2, 2).cond5


def test_search_k():
    assert search_k(7, 1, 2) == 1
    assert search_k(3, 1, 2) is None
    assert search_k(49, 171, 3) is not None


def test_dimension_for():
    assert dimension_for(7, 41, 1) == 2
    assert dimension_for(7, 332, 4) == 3
    assert dimension_for(7, 40, 1) is None


def test_suggest_d3_at_49():
    s = suggest_params(49, 'd3')
    assert (s.d, s.k, s.c, s.b) == (3, 7, 171, 117429)
    assert f"{s.report.ratio:.2f}" == '3.49'


def test_suggest_errors():
    for regime in ('d3', 'd4'):
        with pytest.raises(RegimeInfeasibleAtThisA):
            suggest_params(4, regime)
    with pytest.raises(ValueError):
        suggest_params(49, 'd5')


def test_suggest_d4():
    s = suggest_params(121, 'd4')
    assert (s.d, s.k, s.c) == (4, 61, 1626)
    assert s.report.feasible
    with pytest.raises(RegimeInfeasibleAtThisA):
        suggest_params(49, 'd4')


def test_corollary_table():
    df = corollary_table(max_a=101, max_n=5).set_index('N')
    assert df.loc[3, 'a'] == 37
    assert (df.loc[3, 'k'], df.loc[3, 'c']) == (6, 112)
    assert df.loc[5, 'a'] == 101
    assert (df.loc[5, 'k'], df.loc[5, 'c']) == (10, 507)
    assert list(df['a']) == sorted(df['a'])


@settings(max_examples=200, deadline=None)
@given(
    a=st.sampled_from([2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 49]),
    d=st.integers(2, 4),
    c=st.integers(0, 200),
    data=st.data(),
)
def test_feasibility_is_monotone_in_c(a, d, c, data):
    k = data.draw(st.integers(1, a - 1))
    if feasible(a, c + 1, d, k).feasible:
        assert feasible(a, c, d, k).feasible


@pytest.mark.parametrize('a,d', [(7, 2), (7, 3), (16, 3), (49, 3), (25, 4)])
def test_c_max_is_tight(a, d):
    for k in range(1, a):
        cm = c_max(a, d, k)
        if cm is None:
            assert not feasible(a, 0, d, k).feasible
            continue
        assert feasible(a, cm, d, k).feasible
        assert not feasible(a, cm + 1, d, k).feasible


def test_sweep_columns():
    df = sweep(8, ds=(2,), max_workers=1)
    assert list(df.columns) == ['a', 'd', 'k', 'c_max', 'b']
    row = df[(df.a == 7) & (df.k == 2)].iloc[0]
    assert row.c_max == 1
    assert row.b == 41
    assert set(df.a) <= {2, 3, 4, 5, 7, 8}


def test_exhaustive_condition4():
    assert exhaustive_condition4(4, 0, 2, 1) is True
    # Dos rectas secantes con 3 puntos cada una caben en 5 puntos
    assert exhaustive_condition4(4, 1, 2, 1) is False
    assert exhaustive_condition4(49, 1, 3, 2) is None

    report = feasible(4, 0, 2, 1, exhaustive=True)
    assert report.via == 'exhaustive'
    assert report.cond4


def _lineish_set(space, size, rng):
    """Conjunto aleatorio sesgado hacia rectas completas o casi"""
    E = set()
    lines = space.all_lines()
    while len(E) < size:
        line = rng.choice(lines)
        take = rng.randint(1, space.q)
        E.update(rng.sample(sorted(line.points), take))
    return frozenset(sorted(E)[:size]) if len(E) > size else frozenset(E)


@pytest.mark.slow
def test_counting_bound_holds_on_random_sets():
    rng = random.Random(2025)
    # Con q=3, k=2 la cota es 0: no hay conjuntos por debajo
    assert heavy_bound(3, 2) == 0
    cases = [(3, 1), (5, 1), (5, 2), (7, 1), (7, 2), (7, 3), (8, 2), (9, 3)]
    for q, k in cases:
        space = affine_space(field_for_order(q), 2)
        size = heavy_bound(q, k) - 1
        for _ in range(2000):
            E = _lineish_set(space, size, rng)
            assert len(E) == size
            assert len(lines_meeting(space, E, q - k)) <= k
