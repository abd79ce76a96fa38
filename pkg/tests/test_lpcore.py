from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from contrastive_vc.errors import MalformedSystem
from contrastive_vc.lpcore import (
    LinearSystem,
    separating_direction,
    solve_lp,
    strict_feasible,
    zero_in_hull,
)


def test_contradictory_strict_rows():
    assert not strict_feasible(LinearSystem(1, strict=((1,), (-1,)))).feasible


def test_gap_system_with_positive_gaps():
    # D1 - D2 > 0 with both gaps positive
    res = strict_feasible(LinearSystem(2, strict=((1, -1), (1, 0), (0, 1)), nonneg=(True, True)))
    assert res.feasible
    assert res.witness == (Fraction(2), Fraction(1))
    assert res.margin == 1


def test_gap_system_nonneg_only():
    res = strict_feasible(LinearSystem(2, strict=((1, -1),), nonneg=(True, True)))
    assert res.feasible
    d1, d2 = res.witness
    assert d1 - d2 > 0 and d1 >= 0 and d2 >= 0


def test_width_mismatch():
    with pytest.raises(MalformedSystem):
        LinearSystem(2, strict=((1, 2, 3),))
    with pytest.raises(MalformedSystem):
        zero_in_hull([(1, 0), (1,)])


def test_hull_examples():
    assert zero_in_hull([(1, 0), (-1, 0)])
    assert not zero_in_hull([(1, 0), (0, 1)])
    assert zero_in_hull([(1, 0), (0, 1), (-1, -1)])


def test_solve_lp_small():
    # max x + y, x + 2y <= 4, 3x + y <= 6, x, y >= 0 -> (8/5, 6/5)
    res = solve_lp((1, 1), [((1, 2), 4), ((3, 1), 6)], nonneg=(True, True))
    assert res.status == "optimal"
    assert res.x == (Fraction(8, 5), Fraction(6, 5))
    assert solve_lp((1,), [((-1,), 0)], nonneg=(True,)).status == "unbounded"
    assert solve_lp((0,), [((1,), -1)], nonneg=(True,)).status == "infeasible"


def test_equality_with_free_variables():
    res = solve_lp((0, 0), eq=[((1, 1), 3), ((1, -1), 1)])
    assert res.x == (2, 1)


def _scipy_strict(rows, nonneg):
    # maximise t s.t. a.x >= t, t <= 1; an independent floating-point solver
    rows = np.asarray(rows, dtype=float)
    m, w = rows.shape
    c = np.zeros(w + 1)
    c[-1] = -1
    a_ub = np.hstack([-rows, np.ones((m, 1))])
    bounds = [(0, None) if nn else (None, None) for nn in nonneg] + [(None, 1)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(m), bounds=bounds, method="highs")
    return res.status == 0 and -res.fun > 1e-9


@given(st.integers(1, 4).flatmap(lambda w: st.tuples(
    st.lists(st.lists(st.integers(-3, 3), min_size=w, max_size=w), min_size=1, max_size=6),
    st.lists(st.booleans(), min_size=w, max_size=w))))
@settings(max_examples=200, deadline=None)
def test_strict_feasibility_matches_scipy(data):
    rows, nonneg = data
    mine = strict_feasible(LinearSystem(len(nonneg), strict=tuple(map(tuple, rows)),
                                        nonneg=tuple(nonneg)))
    assert mine.feasible == _scipy_strict(rows, nonneg)
    if mine.feasible:
        for r in rows:
            assert sum(a * x for a, x in zip(r, mine.witness)) > 0
        for x, nn in zip(mine.witness, nonneg):
            assert not nn or x >= 0


@given(st.integers(1, 3).flatmap(lambda d: st.lists(
    st.lists(st.integers(-3, 3), min_size=d, max_size=d), min_size=1, max_size=5)))
@settings(max_examples=200, deadline=None)
def test_hull_and_separation_are_dual(vecs):
    assert zero_in_hull(vecs) != separating_direction(vecs).feasible
