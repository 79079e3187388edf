import copy

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projlab.fdd import (
    CertificationError,
    Decomposition,
    FDDError,
    HypothesisRefused,
    InterlacedSystem,
    blocking_step,
    build_interlaced,
    commuting_chain,
    commuting_construction,
    perturb_decomposition,
    random_blocking_instance,
    random_interlaced_system,
    strong_limit_simulation,
    tail_chain,
)
from projlab.projections import Chain, coordinate_chain, default_steps
from projlab.spaces import NormedSpace, Subspace


def _skewed(seed, N=5, scale=0.25):
    rng = np.random.default_rng(seed)
    amb = NormedSpace.linf(N)
    B = np.eye(N) + scale * rng.standard_normal((N, N))
    return Decomposition(amb, tuple(Subspace(amb, B[:, [i]]) for i in range(N)))


def test_coordinate_decomposition_has_constant_one():
    D = Decomposition.coordinate(NormedSpace.linf(5), [2, 1, 2])
    assert D.length == 3 and D.K == pytest.approx(1.0)
    assert np.array_equal(D.S(0), np.zeros((5, 5))) and np.array_equal(D.S(3), np.eye(5))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_canonical_projections_obey_the_law(seed):
    D = _skewed(seed)
    assert D.law_residual() <= 1e-9
    # S_n is the canonical projection read in ambient coordinates
    for n in range(1, D.length):
        P = D.canonical(n)
        assert np.allclose(P.ambient_operator(), D.S(n), atol=1e-10)
    assert D.K >= 1 - 1e-12


def test_decomposition_validation():
    amb = NormedSpace.linf(3)
    e = np.eye(3)
    with pytest.raises(FDDError):
        Decomposition(amb, ())
    with pytest.raises(FDDError):
        Decomposition(amb, (Subspace(amb, e[:, :2]),))
    with pytest.raises(FDDError):
        Decomposition(amb, (Subspace(amb, e[:, :2]), Subspace(amb, e[:, [0]] + e[:, [1]])))


def test_identity_perturbation_is_a_no_op():
    D = _skewed(3)
    r = perturb_decomposition(D, [np.eye(5)] * D.length)
    assert r.eps_sum == 0.0
    assert r.K_new == pytest.approx(r.K, abs=1e-12)


def test_perturbation_refusal_and_declared_sizes():
    D = _skewed(4)
    big = [W.basis * 3.0 for W in D.blocks]
    with pytest.raises(HypothesisRefused) as exc:
        perturb_decomposition(D, big)
    assert exc.value.measured_sum >= exc.value.limit
    tiny = [W.basis * (1 + 1e-4) for W in D.blocks]
    with pytest.raises(FDDError):
        perturb_decomposition(D, tiny, eps_list=[1e-6] * D.length)
    with pytest.raises(FDDError):
        perturb_decomposition(D, tiny[:-1])


def test_blocking_with_h_equal_to_head_is_trivial():
    D = Decomposition.coordinate(NormedSpace.linf(5))
    r = blocking_step(D, D.partial(2), 2, 0.1)
    assert r.m == 2
    assert r.residuals["distortion"] <= 1e-12
    assert np.abs(r.A.matrix - r.A.domain.basis).max() <= 1e-12


def test_blocking_exhaustion_and_argument_errors():
    D = Decomposition.coordinate(NormedSpace.linf(4))
    amb = D.ambient
    H = Subspace(amb, np.array([[1.0, 0], [0, 1], [0, 0], [0, 1]]))   # reaches the last block
    with pytest.raises(FDDError, match="exhausted"):
        blocking_step(D, H, 1, 0.1)
    assert blocking_step(D, H, 1, 0.1, allow_exhaust=True).m == 3
    with pytest.raises(FDDError):
        blocking_step(D, H, 1, 0.0)
    with pytest.raises(FDDError):
        blocking_step(D, H, 4, 0.1)
    with pytest.raises(FDDError):
        blocking_step(D, Subspace(amb, np.eye(4)[:, [1]]), 1, 0.1)


@pytest.mark.parametrize("seed", range(10))
def test_blocking_random_instances(seed):
    D, H, k, eps = random_blocking_instance(seed)
    r = blocking_step(D, H, k, eps)
    assert r.residuals["distortion"] <= eps
    assert r.residuals["image_in_span"] <= 1e-8 and r.residuals["h_recovered"] <= 1e-8
    assert r.perturbed.length == r.blocking.length
    assert r.blocking.law_residual() <= 1e-8


def test_interlacing_rejects_bad_chains():
    S = random_interlaced_system(0)
    with pytest.raises(FDDError):
        InterlacedSystem(S.decomposition, tuple(reversed(S.chain)), S.outer)
    with pytest.raises(FDDError):
        InterlacedSystem(S.decomposition, S.chain, S.outer[:-1])
    D = Decomposition.coordinate(NormedSpace.linf(4))
    with pytest.raises(FDDError):
        build_interlaced(D, [Subspace(D.ambient, np.eye(4)[:, :2]), Subspace(D.ambient, np.eye(4)[:, [0]])])


def test_build_interlaced_on_tail_chain():
    amb = NormedSpace.linf(6)
    D = Decomposition.coordinate(amb)
    S = build_interlaced(D, tail_chain(amb))
    assert S.interlacing_residual() <= 1e-8
    assert all(e <= s for e, s in zip(S.perturbations, S.schedule))
    r = commuting_construction(S)
    assert r.residuals["pairwise"] <= 1e-9


@pytest.mark.parametrize("seed", range(8))
def test_commuting_chain_matches_strong_limit(seed):
    S = random_interlaced_system(seed)
    r = commuting_construction(S)
    ch = commuting_chain(S, r)
    lim = strong_limit_simulation(ch, bound_cap=1e6)
    assert lim.residuals["law"] <= 1e-9 and lim.residuals["projection"] <= 1e-9
    assert lim.table_sup >= max(lim.norms) - 1e-9
    # the products T_n collapse to P_n under the commuting law
    for n, P in enumerate(r.projections):
        if S.chain[n].dim < S.decomposition.ambient.dim:
            assert lim.norms[n] == pytest.approx(r.norms[n], abs=1e-6)


def test_strong_limit_on_short_chains():
    ch = coordinate_chain(4)
    lim = strong_limit_simulation(ch.with_steps(default_steps(ch)), bound_cap=2.0)
    assert max(lim.norms) == pytest.approx(1.0)
    assert lim.profile[-1] == pytest.approx(0.0, abs=1e-12)
    amb = NormedSpace.linf(3)
    single = Chain((Subspace.whole(amb),))
    assert strong_limit_simulation(single, 1.0).norms == [1.0]


def test_strong_limit_cap_refusal():
    from projlab.projections import gamma_chain
    ch = gamma_chain(6, 0.9)
    with pytest.raises(FDDError):
        strong_limit_simulation(ch.with_steps(default_steps(ch)), bound_cap=1.01)


def test_commuting_check_raises_on_broken_outer():
    S = random_interlaced_system(1)
    N = S.decomposition.ambient.dim
    broken = copy.copy(S)                      # bypasses validation on purpose
    broken.outer = tuple(np.eye(N) * 0.5 for _ in S.outer)
    with pytest.raises(CertificationError):
        commuting_construction(broken)


def test_coordinate_interlaced_system_is_exact():
    from projlab.experiments import coordinate_interlaced
    S = coordinate_interlaced(8)
    r = commuting_construction(S)
    for name in ("idempotence", "image", "fixes", "consecutive", "pairwise"):
        assert r.residuals[name] < 1e-12
    assert r.sup == pytest.approx(1.0)


def test_skewed_chain_in_linf8_stays_within_schedule():
    amb = NormedSpace.linf(8)
    S = build_interlaced(Decomposition.coordinate(amb), tail_chain(amb, 0.3))
    assert len(S.perturbations) >= 1
    assert all(e <= s for e, s in zip(S.perturbations, S.schedule))
    assert sum(S.schedule) < 1 / 2                 # the coordinate decomposition has K = 1


def test_limit_products_of_gamma_chain_stay_below_table_sup():
    from projlab.projections import gamma_chain
    ch = gamma_chain(8, 0.9)
    lim = strong_limit_simulation(ch.with_steps(default_steps(ch)), bound_cap=10.0)
    assert max(lim.norms) <= lim.table_sup + 1e-9
    assert lim.residuals["law"] <= 1e-9
