import json
import math
import os

import pytest

import seedopt

PRESETS = os.environ.get(
    "SEEDOPT_PRESET_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "presets")
)


def small_config(flasks=5):
    cfg = seedopt.RunConfig.default(flasks)
    cfg.n_mc = 20
    return cfg


def test_reference_duration(tmp_path):
    res = seedopt.run_reference(small_config(), tmp_path)
    assert res["d"] == 576.0
    assert (tmp_path / "protocol.csv").exists()
    assert set(res["bands"]) == set(seedopt.state_names())


def test_simulate_in_memory():
    res = seedopt.simulate(small_config(), [0.0145, 0.115, 0.49, 2.1, 7.4])
    xv = res["bands"]["Xv"]
    assert len(xv["t"]) == len(xv["mean"]) > 0
    assert all(lo <= hi for lo, hi in zip(xv["q05"], xv["q95"]))
    assert res["titer"] is None


def test_config_round_trip_and_errors():
    cfg = seedopt.RunConfig.load(os.path.join(PRESETS, "four_flasks.json"))
    text = cfg.to_json()
    assert seedopt.RunConfig.from_json(text).to_json() == text
    assert json.loads(text)["schema_version"] == 1
    with pytest.raises(seedopt.ConfigError, match="seed_train.nmc"):
        seedopt.RunConfig.from_json('{"schema_version": 1, "seed_train": {"nmc": 3}}')


def test_pareto_and_hypervolume():
    pts = [[1.0, 3.0], [3.0, 1.0], [3.0, 3.0]]
    assert seedopt.pareto_filter(pts, ["minimize", "minimize"]) == [0, 1]
    assert seedopt.hypervolume(pts[:2], [4.0, 4.0]) == pytest.approx(5.0)


def test_latin_hypercube_strata():
    pts = seedopt.latin_hypercube([(0.0, 1.0), (10.0, 20.0)], 5, 3)
    assert sorted(p[0] for p in pts) == pytest.approx([0.1, 0.3, 0.5, 0.7, 0.9])


def test_gp_interpolates():
    X = [[0.1], [0.4], [0.7], [0.9]]
    y = [math.sin(4 * x[0]) for x in X]
    gp = seedopt.GpModel.fit(X, y, restarts=3)
    mean, var = gp.predict([0.4], include_noise=False)
    assert mean == pytest.approx(y[1], abs=0.05)
    assert var >= 0.0
    assert json.loads(gp.to_json())["lengthscales"]


def test_optimize_python_black_box():
    def toy(x):
        return [x[0] ** 2, (x[0] - 1.0) ** 2]

    res = seedopt.optimize(toy, [(0.0, 1.0)], ["minimize", "minimize"],
                           n_lhs=4, n_iterations=3, gp_restarts=2, ehvi_mc_samples=128)
    assert len(res["history"]) == 7
    assert res["hypervolume_trace"] == sorted(res["hypervolume_trace"])


def test_culture_rhs_batch_volume():
    dy = seedopt.culture_rhs([3e8, 3.3e8, 30.0, 6.0, 1.0, 0.5, 0.0, 0.015], seedopt.ModelParameters())
    assert dy[0] > 0.0
    assert dy[7] == 0.0
