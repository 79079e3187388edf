import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projlab.lp import InfeasibleError, UnboundedError, simplex_standard, solve_lp
from projlab.minproj import lambda_relative
from projlab.search import random_triples
from projlab.spaces import NormedSpace


def test_small_lp_known_optimum():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    r = solve_lp([-1, -1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6], method="simplex")
    assert r.fun == pytest.approx(-2.8)
    assert np.allclose(r.x, [1.6, 1.2])
    assert r.residual <= 1e-12 and r.dual_gap <= 1e-9


def test_free_variables_and_equalities():
    r = solve_lp([0, 0, 1], A_ub=[[1, 0, -1], [-1, 0, -1], [0, 1, -1], [0, -1, -1]], b_ub=[0] * 4,
                 A_eq=[[1, 1, 0]], b_eq=[3], free=[True, True, False], method="simplex")
    assert r.fun == pytest.approx(1.5)


def test_infeasible_and_unbounded_are_reported():
    with pytest.raises(InfeasibleError):
        solve_lp([1], A_ub=[[1], [-1]], b_ub=[-1, -1], method="simplex")
    with pytest.raises(UnboundedError):
        solve_lp([-1], A_ub=[[-1]], b_ub=[0], method="simplex")


def test_standard_form_drops_redundant_rows():
    x, y, _ = simplex_standard([1, 1], [[1, 1], [2, 2]], [1, 2])
    assert x.sum() == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_simplex_agrees_with_highs_on_random_feasible_lps(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(2, 7)), int(rng.integers(2, 9))
    A = rng.standard_normal((m, n))
    x0 = rng.uniform(0, 1, n)
    b = A @ x0 + rng.uniform(0, 1, m)
    c = rng.standard_normal(n)
    box = np.vstack([A, np.eye(n)])           # keep the program bounded
    bb = np.concatenate([b, np.full(n, 5.0)])
    r1 = solve_lp(c, box, bb, method="simplex")
    r2 = solve_lp(c, box, bb, method="highs")
    assert r1.fun == pytest.approx(r2.fun, abs=1e-7)
    assert r1.residual <= 1e-9


def test_degenerate_projection_programs_match_highs():
    # sections of l_inf^4 give highly degenerate programs (zero right-hand sides)
    amb = NormedSpace.linf(4)
    for X1, X2, X3 in random_triples(40, amb, (1, 2, 4), seed=0):
        a = lambda_relative(X2, X3, method="simplex").lam
        b = lambda_relative(X2, X3, method="highs").lam
        assert a == pytest.approx(b, abs=1e-8)
