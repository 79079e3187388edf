import json

import pytest

from projlab.cli import main


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def linf3(tmp_path):
    return _write(tmp_path / "space.json", {"dim": 3, "norm": {"kind": "lp", "p": "inf"}})


def _report(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_minproj_on_a_coordinate_line(tmp_path, linf3, capsys):
    sub = _write(tmp_path / "y.json", {"basis": [[1, 0, 0]]})
    code, rep = _report(capsys, ["minproj", "--space", linf3, "--subspace", sub])
    assert code == 0 and rep["ok"]
    assert rep["results"]["lambda"]["value"] == pytest.approx(1.0)
    assert rep["results"]["certificate"] == "exact_lp"


def test_commute_coordinate_residuals(tmp_path, capsys):
    code, rep = _report(capsys, ["fdd", "commute", "--instance", "coordinate", "--out", str(tmp_path / "o")])
    assert code == 0
    for name in ("idempotence", "image", "consecutive", "pairwise"):
        assert rep["results"]["residuals"][name]["value"] < 1e-12
    assert sorted(p.name for p in (tmp_path / "o").iterdir()) == ["commute.csv", "report.json", "timing.json"]


@pytest.mark.parametrize("argv", [
    ["space", "--points", "[[1, -2, 0.5]]"],
    ["factor", "--count", "3"],
    ["chain", "--family", "gamma"],
    ["fdd", "constant"],
    ["fdd", "perturb"],
    ["fdd", "block"],
    ["fdd", "interlace", "--instance", "tail"],
    ["fdd", "limit"],
    ["enlargement", "--instance", "coordinate"],
    ["sqrt2", "--m", "8", "--set", "pairs=[[1, 2]]"],
    ["search", "--family", "coordinate", "--set", "n=3"],
])
def test_subcommands_succeed(argv, capsys, linf3):
    if argv[0] == "space":
        argv = argv + ["--space", linf3]
    code, rep = _report(capsys, argv)
    assert code == 0, rep
    assert rep["ok"] and "results" in rep and "environment" in rep


def test_run_uses_the_config_kind(tmp_path, capsys):
    cfg = _write(tmp_path / "cfg.json", {"kind": "chain", "params": {"family": "coordinate"}, "seed": 3})
    code, rep = _report(capsys, ["run", "--config", cfg])
    assert code == 0 and rep["config"]["kind"] == "chain" and rep["config"]["seed"] == 3


@pytest.mark.parametrize("doc", ["{not json", json.dumps([1, 2]), json.dumps({"params": {}}),
                                 json.dumps({"kind": "chain", "bogus": 1}),
                                 json.dumps({"kind": "nonsense"})])
def test_bad_configs_exit_with_two(tmp_path, capsys, doc):
    path = tmp_path / "cfg.json"
    path.write_text(doc)
    assert main(["run", "--config", str(path)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_missing_input_file_and_negative_seed(capsys):
    assert main(["minproj", "--space", "/nonexistent/space.json"]) == 2
    assert main(["chain", "--seed", "-1"]) == 2


def test_suite_subset(tmp_path, capsys):
    assert main(["suite", "--out", str(tmp_path), "--only", "chain_gamma"]) == 0
    top = json.loads((tmp_path / "report.json").read_text())
    assert "chain_gamma" in json.dumps(top)
    assert main(["suite"]) == 2
