import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from projlab.spaces import (
    LinearMap,
    NoExactStrategyError,
    NormedSpace,
    Subspace,
    Tolerances,
    half_representatives,
    holder_dual,
    operator_norm,
    polar_vertices,
    quotient_norm,
)

vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10, allow_nan=False))
P_VALUES = [1.0, 1.5, 2.0, 3.0, np.inf]


def test_lp_norms_closed_form():
    x = np.array([3.0, -4.0, 0.0])
    assert NormedSpace.l1(3).norm(x) == pytest.approx(7)
    assert NormedSpace.l2(3).norm(x) == pytest.approx(5)
    assert NormedSpace.linf(3).norm(x) == pytest.approx(4)


def test_vertex_and_facet_descriptions_agree():
    hexagon = np.array([[np.cos(t), np.sin(t)] for t in np.pi * np.arange(6) / 3])
    V = NormedSpace.from_vertices(hexagon)
    F = NormedSpace.from_facets(V.facet_matrix)
    pts = np.random.default_rng(0).standard_normal((50, 2))
    assert np.allclose(V.norm(pts), F.norm(pts), atol=1e-9)


def test_invalid_spaces_are_rejected():
    with pytest.raises(ValueError):
        NormedSpace.lp(2, 0.5)
    with pytest.raises(ValueError):
        NormedSpace.from_vertices([[1.0, 0.0], [2.0, 0.0]], symmetric=True)
    with pytest.raises(ValueError):
        NormedSpace.from_facets([[1.0, 0.0]])          # does not span


@pytest.mark.parametrize("p", P_VALUES)
@settings(max_examples=25, deadline=None)
@given(x=vec3, y=vec3, a=st.floats(-5, 5))
def test_norm_axioms(p, x, y, a):
    X = NormedSpace.lp(3, p)
    assert X.norm(x + y) <= X.norm(x) + X.norm(y) + 1e-9
    assert X.norm(a * x) == pytest.approx(abs(a) * X.norm(x), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("p", P_VALUES)
@settings(max_examples=25, deadline=None)
@given(u=vec3, x=vec3)
def test_dual_norm_is_norming(p, u, x):
    X = NormedSpace.lp(3, p)
    assume(np.abs(u).max() > 1e-3 and np.abs(x).max() > 1e-3)
    d, w = X.dual_norm(u)
    assert abs(u @ x) <= d * X.norm(x) * (1 + 1e-9) + 1e-12
    assert X.norm(w) == pytest.approx(1.0, abs=1e-7)
    assert u @ w == pytest.approx(d, rel=1e-7)


def test_holder_dual_attains():
    y = np.array([1.0, -2.0, 0.5])
    for p in (1.5, 3.0):
        f = holder_dual(y, p)
        q = p / (p - 1)
        assert np.linalg.norm(f, q) == pytest.approx(1.0)
        assert f @ y == pytest.approx(np.linalg.norm(y, p))


def test_polar_vertices_of_cube_is_cross_polytope():
    V = polar_vertices(np.eye(3))
    assert len(half_representatives(V)) == 4           # cube vertices up to sign
    assert np.allclose(np.abs(V), 1.0)


def test_subspace_basics():
    amb = NormedSpace.linf(4)
    S = Subspace(amb, np.array([[1.0, 1, 0, 0], [0, 0, 1, 1]]).T)
    assert S.dim == 2
    assert S.contains(Subspace(amb, np.array([[1.0, 1, 2, 2]]).T))
    assert not S.contains(Subspace(amb, np.array([[1.0, 0, 0, 0]]).T))
    assert S.complement.shape == (4, 2)
    assert np.allclose(S.complement.T @ S.basis, 0, atol=1e-12)
    assert S.norm(np.array([1.0, -3.0])) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        Subspace(amb, np.array([[1.0, 1, 0, 0], [2.0, 2, 0, 0]]).T)


def test_operator_norm_l2_is_spectral():
    A = np.random.default_rng(1).standard_normal((3, 4))
    r = operator_norm(LinearMap(NormedSpace.l2(4), NormedSpace.l2(3), A))
    assert r.value == pytest.approx(np.linalg.norm(A, 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1.0, 2.0, np.inf]), st.sampled_from([1.0, 2.0, np.inf]))
def test_operator_norm_dominates_samples(seed, p, q):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((3, 3))
    X, Y = NormedSpace.lp(3, p), NormedSpace.lp(3, q)
    r = operator_norm(LinearMap(X, Y, A))
    S = rng.standard_normal((500, 3))
    ratios = np.atleast_1d(Y.norm(S @ A.T)) / np.atleast_1d(X.norm(S))
    assert ratios.max() <= r.upper * (1 + 1e-9)
    if r.witness is not None and np.abs(r.witness).max() > 0:
        assert Y.norm(A @ r.witness) / X.norm(r.witness) >= r.lower * (1 - 1e-6)


def test_operator_norm_linf_to_linf_is_max_row_sum():
    A = np.array([[1.0, -2.0], [0.5, 0.5]])
    r = operator_norm(LinearMap(NormedSpace.linf(2), NormedSpace.linf(2), A))
    assert r.value == pytest.approx(3.0)
    assert r.certificate == "exact"


def test_operator_norm_refuses_beyond_caps():
    tol = Tolerances(enum_cap=3, convert_cap=2)
    X, Y = NormedSpace.linf(8, tol=tol), NormedSpace.l1(8, tol=tol)
    with pytest.raises(NoExactStrategyError):
        operator_norm(LinearMap(X, Y, np.eye(8)), tol)


@pytest.mark.parametrize("Z", [NormedSpace.linf(3), NormedSpace.l1(3), NormedSpace.l2(3), NormedSpace.lp(3, 3.0)])
def test_quotient_norm_against_sampling(Z):
    Y = Subspace(Z, np.array([[1.0, 1.0, 0.0]]).T)
    z = np.array([1.0, -0.5, 2.0])
    q = quotient_norm(Z, Y, z)
    ts = np.linspace(-5, 5, 20001)
    brute = min(Z.norm(z - t * np.array([1.0, 1.0, 0.0])) for t in ts[::20])
    assert q.value <= brute + 1e-9
    assert q.value >= brute - 1e-2
    assert Z.norm(z - q.minimizer) == pytest.approx(q.value, abs=1e-6)
