"""The eleven acceptance criteria, each at its stated tolerance and time budget.

Every test prints one ``criterion N PASS/FAIL`` line; the lines are repeated
in the pytest terminal summary.
"""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from acceptance_log import criterion
from oracles import grid_lambda
from projlab.enlargements import example_experiment, sqrt2_bound_check
from projlab.experiments import (
    _oblique,
    _random_factor_triples,
    coordinate_interlaced,
    factor_residuals,
    golden_blocking_instance,
    run,
    ExperimentConfig,
)
from projlab.fdd import (
    Decomposition,
    HypothesisRefused,
    blocking_step,
    commuting_construction,
    perturb_decomposition,
    perturbation_sizes,
    random_blocking_instance,
    random_interlaced_system,
)
from projlab.minproj import lambda_relative
from projlab.projections import (
    composition_table,
    coordinate_chain,
    default_steps,
    factor_through,
    gamma_chain,
)
from projlab.spaces import NormedSpace, Subspace

GAMMA_SUPS = [1.0863568215892054, 1.1591747622110145, 1.172487560505027, 1.174846515501664,
              1.1758315662932226, 1.1758984090255051, 1.1759019270640465]
EXAMPLE_COMPOSITE = 1.4849068
LAMBDA_HAT = {2: 1.272216726561725, 3: 1.4964862167440605}


def _oracle_instance(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    F = rng.standard_normal((int(rng.integers(d + 1, 8)), d))
    B = rng.standard_normal((d, int(rng.integers(1, d))))
    return F, B


def test_c01_lp_matches_grid_oracle():
    with criterion(1, "LP optimum vs brute-force grid oracle, 50 instances, dim X <= 3", 60) as info:
        worst = 0.0
        for seed in range(50):
            F, B = _oracle_instance(seed)
            X = NormedSpace.from_facets(F)
            lam = lambda_relative(Subspace(X, B), X).lam
            oracle, _ = grid_lambda(F, B)
            worst = max(worst, abs(lam - oracle))
            assert abs(lam - oracle) <= 1e-3, (seed, lam, oracle)
        info["worst_gap"] = f"{worst:.2e}"


def test_c02_trivial_constants():
    with criterion(2, "lambda(X,X)=1 and coordinate subspaces of l_inf^n, n <= 8", 5) as info:
        spaces = [NormedSpace.l1(3), NormedSpace.linf(4), NormedSpace.l2(3), NormedSpace.lp(3, 3.0),
                  NormedSpace.from_facets([[1, 0.3], [0.2, 1], [1, -1]])]
        for X in spaces:
            assert abs(lambda_relative(Subspace.whole(X), X).lam - 1) <= 1e-6
        rng = np.random.default_rng(0)
        count = 0
        for n in range(1, 9):
            amb = NormedSpace.linf(n)
            for k in range(1, n + 1):
                idx = np.sort(rng.choice(n, size=k, replace=False))
                lam = lambda_relative(Subspace(amb, np.eye(n)[:, idx]), amb).lam
                assert abs(lam - 1) <= 1e-6, (n, idx, lam)
                count += 1
        info["coordinate_cases"] = count


def test_c03_commuting_construction():
    with criterion(3, "commuting construction on 100 seeded interlaced systems", 120) as info:
        worst = {}
        for seed in range(100):
            S = random_interlaced_system(seed)
            assert S.decomposition.ambient.dim <= 10
            r = commuting_construction(S, check=False)
            for k, v in r.residuals.items():
                worst[k] = max(worst.get(k, -np.inf), v)
        for k in ("idempotence", "image", "consecutive", "pairwise"):
            assert worst[k] <= 1e-9, (k, worst[k])
        assert worst["norm_bound_excess"] <= 1e-6
        info["worst_pairwise"] = f"{worst['pairwise']:.1e}"
        info["worst_bound_excess"] = f"{worst['norm_bound_excess']:.3g}"


def test_c04_factorization():
    with criterion(4, "P = P1 P2 through X2 on 200 seeded triples in l_inf^8", 60) as info:
        worst = 0.0
        for i, (X1, X2, X3) in enumerate(_random_factor_triples(200, 8, 0)):
            P = _oblique(X1, X3, i)
            P1, P2 = factor_through(P, X2)
            r = factor_residuals(P, P1, P2)
            assert r["product"] <= 1e-8
            assert r["idempotence"] <= 1e-9 and r["image"] <= 1e-9
            assert r["kernel"] <= 1e-8            # infinite when the dimension check fails
            worst = max(worst, r["product"])
        info["worst_product"] = f"{worst:.1e}"


def test_c05_blocking_lemma():
    with criterion(5, "blocking lemma on the golden instance and 50 seeded instances", 60) as info:
        D, H, k = golden_blocking_instance()
        cases = [(D, H, k, 0.1)] + [random_blocking_instance(s) for s in range(50)]
        for D, H, k, eps in cases:
            r = blocking_step(D, H, k, eps)
            assert r.residuals["distortion"] <= eps
            assert r.residuals["h_recovered"] <= 1e-8
            assert r.residuals["fixes_head"] <= 1e-10
        g = blocking_step(*golden_blocking_instance(), 0.1)
        info["golden_m"] = g.m
        info["golden_distortion"] = f"{g.residuals['distortion']:.3g}"


def _skewed_decomposition(seed, N=6):
    rng = np.random.default_rng(seed)
    amb = NormedSpace.linf(N)
    B = np.eye(N) + 0.25 * rng.standard_normal((N, N))
    return Decomposition(amb, tuple(Subspace(amb, B[:, [i]]) for i in range(N)))


def _random_perturbation(D, rng, total):
    """Block maps with ``sum eps_i`` equal to ``total`` (measured)."""
    N = D.ambient.dim
    G = [rng.standard_normal((N, W.dim)) for W in D.blocks]
    unit = perturbation_sizes(D, [W.basis + g for W, g in zip(D.blocks, G)])
    share = total / len(G)
    return [W.basis + (share / u) * g for W, g, u in zip(D.blocks, G, unit)]


def test_c06_perturbation():
    with criterion(6, "perturbation: 100 valid runs, refusal exactly when the sum check fails", 30) as info:
        refused = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            D = _skewed_decomposition(seed)
            limit = 1 / (2 * D.K)
            E = _random_perturbation(D, rng, limit / (8 * D.length) * D.length)
            r = perturb_decomposition(D, E)
            assert np.isfinite(r.K_new) and r.decomposition.length == D.length
            for frac in (0.5, 0.999, 1.001, 1.5):
                E = _random_perturbation(D, rng, frac * limit)
                total = sum(perturbation_sizes(D, E))
                try:
                    perturb_decomposition(D, E)
                    assert total < limit
                except HypothesisRefused as exc:
                    refused += 1
                    assert total >= limit and abs(exc.measured_sum - total) < 1e-12
        info["refusals"] = refused


def test_c07_sum_of_enlargements():
    with criterion(7, "sum construction: coordinate blocks and embedded l2^2 + l2^2", 120) as info:
        for instance in ("coordinate", "euclidean"):
            out = run(ExperimentConfig("enlargement", {}, {"instance": instance}), write=False)
            res = out.report["results"]
            assert res["residuals"]["identity_on_sum"]["value"] <= 1e-9
            assert res["margin"]["value"] >= -1e-8
            info[f"margin_{instance}"] = f"{res['margin']['value']:.1e}"


def test_c08_sqrt2_inequality():
    with criterion(8, "sqrt(2) inequality at m=64 for (1,2),(1,3),(2,3),(2,4)", 600) as info:
        est = {}
        for k, n in [(1, 2), (1, 3), (2, 3), (2, 4)]:
            r = sqrt2_bound_check(k, n, 64, estimates=est)
            assert r.lhs < r.rhs and r.slack > 0
            assert r.p2_norm <= r.lhs + 1e-3
            info[f"slack{k}{n}"] = f"{r.slack:.3f}"
        for j, v in LAMBDA_HAT.items():
            assert abs(est[j].lam - v) <= 1e-8


def test_c09_example_gap():
    with criterion(9, "orthogonal P1 after a 1.01-minimal P2 at (1,3,64)", 300) as info:
        r = example_experiment(1, 3, 64, tau=0.01)
        assert r.composite_norm >= r.lambda_n * (1 - r.eta) * 0.98
        assert r.lower_bound > r.lambda_k and abs(r.lambda_k - 1) <= 1e-9
        assert r.composite_norm == pytest.approx(EXAMPLE_COMPOSITE, abs=1e-6)
        info["composite"] = f"{r.composite_norm:.7f}"
        info["bound"] = f"{r.lower_bound:.4f}"


def test_c10_chain_dichotomy():
    with criterion(10, "gamma chain sup grows with length, coordinate chains stay at 1", 60) as info:
        ch = gamma_chain(8, 0.9)
        ch = ch.with_steps(default_steps(ch))
        sups = [composition_table(ch.truncate(L)).sup for L in range(2, 9)]
        assert all(b > a for a, b in zip(sups, sups[1:]))
        assert sups[-1] / sups[0] >= 1.05
        assert np.allclose(sups, GAMMA_SUPS, atol=1e-9)
        for n in range(2, 9):
            c = coordinate_chain(n)
            assert abs(composition_table(c.with_steps(default_steps(c))).sup - 1) <= 1e-9
        info["ratio"] = f"{sups[-1] / sups[0]:.4f}"


def test_c11_determinism(tmp_path):
    with criterion(11, "two full suite runs give byte-identical reports", 1200) as info:
        dirs = [tmp_path / "a", tmp_path / "b"]
        procs = [subprocess.Popen([sys.executable, "-m", "projlab.cli", "suite", "--out", str(d)],
                                  stdout=subprocess.PIPE, stderr=subprocess.STDOUT) for d in dirs]
        for p in procs:
            out, _ = p.communicate(timeout=1200)
            assert p.returncode == 0, out.decode()
        files = sorted(f.relative_to(dirs[0]) for f in dirs[0].rglob("*")
                       if f.is_file() and f.name != "timing.json")
        assert files == sorted(f.relative_to(dirs[1]) for f in dirs[1].rglob("*")
                               if f.is_file() and f.name != "timing.json")
        for f in files:
            assert (dirs[0] / f).read_bytes() == (dirs[1] / f).read_bytes(), f
        info["files_compared"] = len(files)
