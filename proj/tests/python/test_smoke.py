# SPDX-License-Identifier: Apache-2.0
import math

import numpy as np
import pytest

import mmsense

SMALL = {
    "seed": 3,
    "scenario": {"name": "office", "n_violation_arrangements": 5, "n_compliance_arrangements": 5},
    "protocol": {"trainings_per_arrangement": 4},
    "train": {"epochs": 3, "hidden_units": 8},
}


def test_beam_width_and_names():
    assert mmsense.beam_width(32, 1.0) == pytest.approx(2 * math.pi / 32)
    assert mmsense.beam_width(32, 0.0) == pytest.approx(2 * math.pi)
    assert set(mmsense.scenario_names()) == {"office", "hall", "underground", "station"}


def test_config_defaults_and_overrides():
    cfg = mmsense.config()
    assert cfg["scenario"]["safe_distance"] == 1.5
    assert cfg["train"]["batch_size"] == 1000
    cfg = mmsense.config({"scenario": {"name": "hall", "safe_distance": 2.0}})
    assert cfg["scenario"]["safe_distance"] == 2.0
    assert cfg["scenario"]["environment"]["width"] == 10


def test_seed_scheme():
    assert mmsense.repetition_seed(1, 2) == mmsense.derive_seed(1, [9, 2])
    assert mmsense.derive_seed(1, [1, 2]) != mmsense.derive_seed(1, [2, 1])


def test_generate_shapes_and_determinism():
    d = mmsense.generate(SMALL, scale="config")
    assert len(d) == 40
    assert d.dim == 12 * 32
    values = d.values()
    assert values.shape == (40, 384)
    assert values.dtype == np.float32
    assert values.min() >= -90.0
    labels = d.labels()
    assert set(np.unique(labels)) == {0, 1}
    assert d.arrangement_ids().max() == 9
    assert mmsense.generate(SMALL, scale="config").checksum == d.checksum
    other = dict(SMALL, seed=4)
    assert mmsense.generate(other, scale="config").checksum != d.checksum


def test_desk_scale_counts():
    d = mmsense.generate({"scenario": {"name": "station"}}, scale="desk")
    assert len(d) == 4000
    assert d.n_areas == 2
    assert len(d.area_columns(0)) == 2 * 32


def test_export_ingest_round_trip(tmp_path):
    d = mmsense.generate(SMALL, scale="config")
    d.write(tmp_path / "d.bin", tmp_path / "d.labels")
    back = mmsense.ingest(tmp_path / "d.bin", tmp_path / "d.labels", n_tx=32, n_rx=1, pairs=12)
    assert np.array_equal(back.values(), d.values())
    assert np.array_equal(back.labels(), d.labels())
    a = mmsense.evaluate(d, SMALL)
    b = mmsense.evaluate(back, SMALL)
    assert a["test"] == b["test"]
    with pytest.raises(mmsense.ContainerError):
        mmsense.ingest(tmp_path / "d.bin", tmp_path / "d.labels", n_tx=36)
    (tmp_path / "d.labels").write_text("violation 0\n")
    with pytest.raises(ValueError):
        mmsense.ingest(tmp_path / "d.bin", tmp_path / "d.labels")


def test_evaluate_metrics():
    d = mmsense.generate(SMALL, scale="config")
    r = mmsense.evaluate(d, SMALL)
    assert 0.0 <= r["test"]["accuracy"] <= 1.0
    assert r["test"]["total"] == sum(sum(row) for row in r["test"]["confusion"])
    assert r["split"]["train"] + r["split"]["validation"] + r["split"]["test"] == 40
    assert len(r["areas"]) == 1
    assert len(r["areas"][0]["loss"]) == 3


def test_sweep_and_report():
    grid = {"scenarios": ["office"], "n_rx": [1], "alphas": [0.0, 1.0], "hidden_units": [4], "repetitions": 2}
    rows, text = mmsense.sweep(grid, SMALL, scale="config", threads=1)
    assert len(rows) == 4
    assert all(r["status"] == "ok" for r in rows)
    _, again = mmsense.sweep(grid, SMALL, scale="config", threads=2)
    assert again == text
    table = mmsense.report(text)
    assert {r["statistic"] for r in table} == {"mean", "std", "min", "max", "n"}
    assert len(table) == 2 * 5


def test_sampling_error():
    bad = {"scenario": {"name": "office", "max_people": 1, "n_violation_arrangements": 1,
                        "n_compliance_arrangements": 0}, "protocol": {"trainings_per_arrangement": 1}}
    with pytest.raises(mmsense.SamplingError):
        mmsense.generate(bad, scale="config")


def test_rl_experiment_runs():
    r = mmsense.rl_experiment({"seed": 2}, episodes=50, critic="oracle", series_length=10, window=10)
    assert len(r["accuracy_curve"]) == 50
    assert len(r["alert_rate"]) == 50
    assert 0.0 <= r["baseline"]["accuracy"] <= 1.0
