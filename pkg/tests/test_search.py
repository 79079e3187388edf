import numpy as np
import pytest

from projlab.search import CAVEAT, coordinate_triples, random_triples, search_triple, triple_search
from projlab.spaces import NormedSpace, Subspace

TAUS = (0.01, 0.2)


def test_coordinate_triples_have_constant_one():
    out = triple_search(coordinate_triples(4), TAUS, budget=5)
    assert out["caveat"] == CAVEAT
    assert len(out["records"]) == 6
    for tau in TAUS:
        assert out["max_C2"][tau] == pytest.approx(1.0, abs=1e-9)


def test_equal_inner_spaces_give_one():
    amb = NormedSpace.linf(4)
    (X1, _, X3), = random_triples(1, amb, dims=(2, 2, 4), seed=3)
    rec = search_triple(X1, X1, X3, TAUS, budget=5)
    for run in rec.runs:
        assert run["C2"] == pytest.approx(1.0, abs=1e-7)
        assert run["p1_norm"] == pytest.approx(1.0, abs=1e-9)


def test_runs_respect_the_cap_and_lower_bound():
    amb = NormedSpace.linf(4)
    out = triple_search(random_triples(6, amb, seed=1), TAUS, budget=10)
    for rec in out["records"]:
        for run in rec.runs:
            assert run["p2_ratio"] <= 1 + run["tau"] + 1e-6
            assert run["C2"] * rec.lambda_13 >= 1 - 1e-6
            assert run["composite_norm"] <= run["p1_norm"] * run["p2_norm"] + 1e-6
    # a looser cap can only help
    for rec in out["records"]:
        assert rec.runs[1]["C2"] <= rec.runs[0]["C2"] + 1e-6


def test_random_triples_are_seeded_and_nested():
    amb = NormedSpace.linf(5)
    a = list(random_triples(3, amb, seed=7))
    b = list(random_triples(3, amb, seed=7))
    for (x1, x2, x3), (y1, y2, y3) in zip(a, b):
        assert np.array_equal(x1.basis, y1.basis) and np.array_equal(x3.basis, y3.basis)
        assert x2.contains(x1) and x3.contains(x2)
    with pytest.raises(ValueError):
        list(random_triples(1, amb, dims=(3, 2, 4)))
