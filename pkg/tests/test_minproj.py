import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import polygon_lambda
from projlab.minproj import embed_into_linf, euclidean_estimate, lambda_absolute_approx, lambda_relative
from projlab.projections import orthogonal_projection
from projlab.spaces import NormedSpace, Subspace


def test_polygon_oracle_values():
    assert polygon_lambda(4) == pytest.approx(1.0)
    assert polygon_lambda(8) == pytest.approx((1 + 2 ** 0.5) / 2)


@pytest.mark.parametrize("m", [4, 8, 16, 32])
def test_euclidean_plane_matches_polygon_oracle(m):
    est = euclidean_estimate(2, m)
    assert est.eta_certificate == "exact"
    assert est.eta == pytest.approx(1 - np.cos(np.pi / m), abs=1e-12)
    assert est.lam == pytest.approx(polygon_lambda(m), abs=1e-7)


def test_euclidean_plane_brackets_the_limit():
    # lambda(l_2^2) = 4/pi, and an eta-embedding can only shrink it by 1 - eta
    for m in (16, 32, 64):
        est = euclidean_estimate(2, m)
        assert est.lam <= 4 / np.pi + 1e-9
        assert est.lam >= (1 - est.eta) * 4 / np.pi - 1e-9


def test_embedding_errors():
    Y = NormedSpace.l2(3)
    with pytest.raises(ValueError):
        embed_into_linf(Y, 2)
    with pytest.raises(ValueError):
        embed_into_linf(Y, 8, scheme="bogus")
    with pytest.raises(ValueError):
        embed_into_linf(NormedSpace.l2(2), 4, eta_target=1e-3)


def test_polyhedral_space_embeds_isometrically():
    e = embed_into_linf(NormedSpace.l1(2), 8)
    assert e.eta == 0.0 and not e.flagged
    # lambda(l_1^2) = 1 since l_1^2 is isometric to l_inf^2
    assert lambda_absolute_approx(NormedSpace.l1(2), [8])[0].lam == pytest.approx(1.0, abs=1e-9)


def test_minimal_projection_is_a_projection_onto_y():
    amb = NormedSpace.l1(4)
    Y = Subspace(amb, np.array([[1.0, 0], [1, 1], [0, 1], [1, -1]]))
    r = lambda_relative(Y, amb)
    assert r.certificate == "exact_lp" and not r.flagged
    assert max(r.projection.certify().values()) <= 1e-9
    assert r.projection.norm().value == pytest.approx(r.lam, abs=1e-9)
    assert r.lam >= 1 - 1e-12


def test_tau_must_be_positive():
    amb = NormedSpace.linf(3)
    with pytest.raises(ValueError):
        lambda_relative(Subspace(amb, np.eye(3)[:, :1]), amb, tau=0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_lambda_never_exceeds_any_projection(seed):
    rng = np.random.default_rng(seed)
    amb = NormedSpace.from_facets(rng.standard_normal((6, 3)))
    Y = Subspace(amb, rng.standard_normal((3, 2)))
    r = lambda_relative(Y, amb)
    assert 1 - 1e-9 <= r.lam <= orthogonal_projection(Subspace.whole(amb), Y).norm().value + 1e-9


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1.5, 3.0, 4.0]))
def test_smooth_bracket_is_valid(seed, p):
    rng = np.random.default_rng(seed)
    amb = NormedSpace.lp(3, p)
    Y = Subspace(amb, rng.standard_normal((3, 2)))
    r = lambda_relative(Y, amb, max_iter=400)
    assert r.certificate == "subgradient"
    assert 1.0 <= r.lower <= r.upper + 1e-12
    assert r.lam == r.upper
    # lambda of a 2-dim subspace is at most sqrt(2)
    assert r.lower <= 2 ** 0.5 + 1e-9
