import json
import math

import numpy as np
import pytest

from projlab import io as pio
from projlab.projections import gamma_chain
from projlab.spaces import NormedSpace


@pytest.mark.parametrize("space", [NormedSpace.linf(3), NormedSpace.lp(2, 3.0),
                                   NormedSpace.from_facets([[1.0, 0.5], [0.0, 1.0]]),
                                   NormedSpace.from_vertices([[1.0, 0.0], [0.3, 1.0]])])
def test_space_round_trip(space):
    doc = json.loads(json.dumps(pio.space_to_json(space)))
    back = pio.space_from_json(doc)
    x = np.random.default_rng(0).standard_normal((5, space.dim))
    assert np.allclose(back.norm(x), space.norm(x))


def test_chain_round_trip():
    ch = gamma_chain(4, 0.5)
    back = pio.chain_from_json(json.loads(json.dumps(pio.chain_to_json(ch))))
    assert [s.dim for s in back.subspaces] == [s.dim for s in ch.subspaces]
    for a, b in zip(ch.subspaces, back.subspaces):
        assert np.allclose(a.basis, b.basis)


def test_bad_documents_raise_config_errors(tmp_path):
    with pytest.raises(pio.ConfigError):
        pio.space_from_json({"dim": 2})
    with pytest.raises(pio.ConfigError):
        pio.space_from_json({"dim": 2, "norm": {"kind": "facets", "points": [[1, 2, 3]]}})
    with pytest.raises(pio.ConfigError):
        pio.space_from_json({"dim": 2, "norm": {"kind": "hexagon"}})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(pio.ConfigError):
        pio.load_json(bad)
    with pytest.raises(pio.ConfigError):
        pio.load_json(tmp_path / "missing.json")


def test_to_plain_and_csv():
    doc = pio.to_plain({"a": np.float64(1.5), "b": np.arange(2), "c": math.inf, "d": np.bool_(True)})
    assert doc == {"a": 1.5, "b": [0, 1], "c": "inf", "d": True}
    assert pio.dumps({"b": 1, "a": 2}).index('"a"') < pio.dumps({"b": 1, "a": 2}).index('"b"')
    assert pio.csv_text(["x", "y"], [(1, 0.1)]) == "x,y\n1,0.1\n"


def test_decomposition_from_json():
    D = pio.decomposition_from_json({"ambient": {"dim": 4, "norm": {"kind": "lp", "p": "inf"}},
                                     "sizes": [1, 3]})
    assert D.length == 2 and D.K == pytest.approx(1.0)
