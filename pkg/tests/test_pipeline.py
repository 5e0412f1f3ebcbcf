import numpy as np
import pytest

import pipeline
from conftest import random_walk
from data_loader import load_panel, save_panel
from errors import ConfigError, DataError, StageError
from pipeline import STAGES, PipelineConfig, run_pipeline, simulate_command
from reports import render_report, to_json
from samples import bundled_spec
from suplm import SupLmResult

SMALL = dict(dataset="mexico-like", grid_points=10, replications=5, seed=1)


class _Integrated:
    """Stand-in for a unit-root verdict of I(1)."""

    def __init__(self, series, *args, **kwargs):
        self.label = series.label
        self.order = "I(1)"
        self.integrated = True

    def to_dict(self):
        return {"series": self.label, "order": self.order, "levels": {}, "differences": {}}


def _not_rejected(panel, q, cfg, replications, seed, *args, **kwargs):
    return SupLmResult(statistic=1.0, p_value=0.5, tau_hat=0.0, beta=1.0,
                       replications=replications, seed=seed, scheme="parametric",
                       bootstrap_stats=np.full(replications, 2.0), market=args[-1])


@pytest.mark.parametrize("changes,message", [
    ({"replications": 0}, "replications"),
    ({"dataset": None}, "exactly one"),
    ({"input": "prices.csv"}, "exactly one"),
    ({"lags": -1}, "lags"),
    ({"gate": 1.5}, "gate"),
    ({"trim": 0.6}, "trim"),
    ({"scheme": "wild"}, "scheme"),
])
def test_invalid_config(changes, message):
    with pytest.raises(ConfigError, match=message):
        run_pipeline(PipelineConfig(**{**SMALL, **changes}))


def test_input_needs_columns():
    with pytest.raises(ConfigError, match="benchmark column"):
        PipelineConfig(input="prices.csv", targets=("Mex",)).validate()
    with pytest.raises(ConfigError, match="also listed"):
        PipelineConfig(input="prices.csv", benchmark="US", targets=("US",)).validate()


def test_from_dict_rejects_unknown_fields():
    with pytest.raises(ConfigError, match="unknown config field"):
        PipelineConfig.from_dict({**SMALL, "bogus": 1})


def test_fast_profile():
    cfg = PipelineConfig(**SMALL).fast()
    assert (cfg.grid_points, cfg.replications) == (50, 200)


def test_forced_fit_reaches_every_stage(monkeypatch):
    monkeypatch.setattr(pipeline, "integration_order", _Integrated)
    report = run_pipeline(PipelineConfig(**SMALL, force_fit=True))
    market = report["markets"][0]
    assert market["completed"] == list(STAGES)
    assert market["error"] is None
    assert report["exit_code"] == 0
    assert len(report["threshold_tests"]) == 1
    assert market["stages"]["tvecm"]["table"][0]["variable"] == "z_t"
    assert "Threshold cointegration tests" in render_report(report, "text")


def test_gate_stops_before_the_fit(monkeypatch):
    monkeypatch.setattr(pipeline, "integration_order", _Integrated)
    monkeypatch.setattr(pipeline, "bootstrap_pvalue", _not_rejected)
    report = run_pipeline(PipelineConfig(**SMALL))
    market = report["markets"][0]
    assert market["completed"] == list(STAGES[:3])
    assert any("no threshold effect" in note for note in market["notes"])
    assert report["threshold_tests"][0]["pvalue"] == 0.5

    forced = run_pipeline(PipelineConfig(**SMALL, force_fit=True))
    assert "tvecm" in forced["markets"][0]["completed"]


@pytest.mark.parametrize("seed", [2, 3, 4])
def test_gate_follows_the_p_value(monkeypatch, seed):
    monkeypatch.setattr(pipeline, "integration_order", _Integrated)
    report = run_pipeline(PipelineConfig(dataset="linear-cointegrated", grid_points=10,
                                         replications=9, seed=seed))
    market = report["markets"][0]
    assert market["error"] is None
    assert market["completed"][:3] == list(STAGES[:3])
    p = market["stages"]["threshold_test"]["pvalue"]
    assert ("tvecm" in market["completed"]) == (p <= 0.10)
    assert any("no threshold effect" in note for note in market["notes"]) == (p > 0.10)


def test_stationary_target_stops_after_unit_roots(tmp_path, rng):
    n = 200
    bench = 100 + random_walk(rng, n)
    target = rng.standard_normal(n)
    dates = [f"{1990 + i // 12}-{i % 12 + 1:02d}" for i in range(n)]
    lines = ["date,US,Noise"] + [f"{d},{float(b)!r},{float(t)!r}"
                                  for d, b, t in zip(dates, bench, target)]
    path = tmp_path / "prices.csv"
    path.write_text("\n".join(lines) + "\n")

    report = run_pipeline(PipelineConfig(input=str(path), benchmark="US", targets=("Noise",),
                                         grid_points=10, replications=5, seed=1))
    market = report["markets"][0]
    assert market["completed"] == ["unit_root"]
    assert "two I(1) series" in market["notes"][0]
    assert report["threshold_tests"] == []
    assert report["exit_code"] == 0


def test_stage_failure_is_recorded(monkeypatch):
    def broken(series, *args, **kwargs):
        raise DataError("zero-variance input")

    monkeypatch.setattr(pipeline, "integration_order", broken)
    report = run_pipeline(PipelineConfig(**SMALL))
    market = report["markets"][0]
    assert market["error"]["stage"] == "unit_root"
    assert market["completed"] == []
    assert report["exit_code"] == 2


def test_missing_input_file(tmp_path):
    cfg = PipelineConfig(input=str(tmp_path / "none.csv"), benchmark="US", targets=("Mex",),
                         replications=5, seed=1)
    with pytest.raises(StageError) as info:
        run_pipeline(cfg)
    assert info.value.stage == "load"
    assert info.value.exit_code == 2


def test_bundled_dataset_columns_are_checked():
    with pytest.raises(StageError, match="has columns"):
        run_pipeline(PipelineConfig(**SMALL, benchmark="UK"))


def test_report_reruns_exactly(monkeypatch):
    monkeypatch.setattr(pipeline, "integration_order", _Integrated)
    report = run_pipeline(PipelineConfig(**{**SMALL, "seed": None}))
    assert report["config"]["seed"] is not None
    again = run_pipeline(PipelineConfig.from_dict(report))
    assert to_json(again) == to_json(report)


def test_several_targets_get_consecutive_seeds(tmp_path, monkeypatch):
    monkeypatch.setattr(pipeline, "integration_order", _Integrated)
    monkeypatch.setattr(pipeline, "bootstrap_pvalue", _not_rejected)
    panel = pipeline.load_bundled("mexico-like")
    frame = panel.to_frame()
    frame["Mex2"] = frame["Mex"] * 1.01
    path = tmp_path / "three.csv"
    frame.to_csv(path, index=False)
    report = run_pipeline(PipelineConfig(input=str(path), benchmark="US", targets=("Mex", "Mex2"),
                                         replications=3, seed=40))
    assert [row["seed"] for row in report["threshold_tests"]] == [40, 41]
    assert [row["market"] for row in report["threshold_tests"]] == ["Mex", "Mex2"]


def test_simulate_command_round_trip(tmp_path):
    spec = bundled_spec("mexico-like")
    first = simulate_command(spec, tmp_path / "a.csv")
    second = simulate_command(spec, tmp_path / "b.csv")
    assert first.read_bytes() == second.read_bytes()
    panel = load_panel(first, "US", "Mex")
    assert len(panel) == 248
    assert panel.timestamps[-1] == "2005-08"
    save_panel(panel, tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_bytes() == first.read_bytes()


@pytest.mark.slow
def test_mexico_like_fast_profile():
    report = run_pipeline(PipelineConfig(dataset="mexico-like", seed=20050831).fast())
    market = report["markets"][0]
    assert market["error"] is None
    assert market["completed"] == list(STAGES)
    assert market["stages"]["threshold_test"]["pvalue"] <= 0.10
    table = market["stages"]["tvecm"]["table"]
    assert [row["variable"] for row in table[:2]] == ["z_t", "Constant"]
    assert table[0]["equation"] == "Equation 1 (dUS)"
    assert report["exit_code"] == 0


@pytest.mark.slow
def test_linear_cointegrated_fast_profile():
    report = run_pipeline(PipelineConfig(dataset="linear-cointegrated", seed=20050831).fast())
    market = report["markets"][0]
    assert market["error"] is None
    assert market["completed"] == list(STAGES[:3])
    assert market["stages"]["threshold_test"]["pvalue"] > 0.10
    assert any("no threshold effect" in note for note in market["notes"])
    assert "tvecm" not in market["stages"]
    assert report["exit_code"] == 0
