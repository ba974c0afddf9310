import json
import os
import subprocess

import numpy as np
import pytest

import fairfront as ff


def test_version_and_errors():
    assert ff.__version__
    assert issubclass(ff.ConfigError, ff.Error)
    with pytest.raises(ff.ConfigError):
        ff.purity([])


def test_dataset_and_objectives():
    d = ff.generate_synthetic(200, 1)
    assert len(d) == 200
    assert d.features.shape == (200, 2)
    assert set(np.unique(d.labels)) == {-1.0, 1.0}
    assert d.attributes[0][0] == "s"
    f = ff.evaluate(d, [("logistic", ""), ("di_binary", "s")], np.zeros(3))
    assert f[0] == pytest.approx(np.log(2.0))
    assert f[1] == 0.0


def test_minnorm_and_metrics():
    w, d = ff.solve_minnorm([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    assert np.allclose(w, [0.5, 0.5])
    assert np.allclose(d, [0.5, 0.5])
    front = [np.array(p, dtype=float) for p in [(1, 3), (2, 2), (3, 1)]]
    assert ff.hypervolume(front, np.array([4.0, 4.0])) == pytest.approx(6.0, abs=1e-12)
    a = [np.array([1.0, 3.0]), np.array([2.0, 2.0])]
    b = [np.array([2.5, 2.5]), np.array([3.0, 1.0])]
    assert ff.purity([a, b]) == [1.0, 0.5]
    taus, frac = ff.performance_profile([[1.0, 2.0], [2.0, 1.0]], False)
    assert taus[0] == 1.0
    assert frac[0][0] == 0.5
    assert ff.dominates(np.array([1.0, 2.0]), np.array([2.0, 2.0]))


def test_pfsmg_front_is_nondominated():
    d = ff.generate_synthetic(300, 2)
    params, values = ff.pfsmg(d, [("logistic", ""), ("di_binary", "s")], seed=3, iterate_budget=10)
    assert len(params) == len(values) > 0
    assert sorted(ff.nondominated_indices(values)) == list(range(len(values)))


def test_commands_roundtrip(tmp_path):
    cfg = {
        "dataset": {"source": "synthetic", "synthetic": {"n": 300}},
        "pfsmg": {"iterate_budget": 10},
        "smg": {"step": {"alpha0": 0.5}, "batch": {"batch0_per_objective": 30}},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    man = ff.run("front", config=path, seed=2, out=tmp_path / "out", workers=1)
    assert man["seed"] == 2
    header, params, values = ff.read_front(str(tmp_path / "out" / "front.csv"))
    assert header[:5] == ["c_0", "c_1", "b", "f_1", "f_2"]
    assert len(params) == man["points"]
    with pytest.raises(ff.ConfigError):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"unknown": 1}))
        ff.run("front", config=bad, out=tmp_path)


@pytest.mark.skipif(not os.environ.get("FAIRFRONT_CLI"), reason="command-line tool not built")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["FAIRFRONT_CLI"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"pfsmg": {"budget": 3}}))
    assert subprocess.run([cli, "front", "--config", str(bad), "-q"], capture_output=True).returncode == 2
    assert subprocess.run([cli, "nonsense"], capture_output=True).returncode == 2
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"dataset": {"source": "compas", "path": "nowhere.csv"}}))
    r = subprocess.run([cli, "front", "--config", str(missing), "-q"], capture_output=True, text=True)
    assert r.returncode == 3
    assert "nowhere.csv" in r.stderr
    r = subprocess.run([cli, "synth", "--out", str(tmp_path / "s"), "-q"], capture_output=True)
    assert r.returncode == 0
    assert (tmp_path / "s" / "synthetic.csv").exists()
