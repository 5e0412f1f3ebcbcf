"""
Analysis pipeline: unit roots -> Engle-Granger -> Sup-LM -> threshold VECM,
run for each target market against the benchmark.
"""
import json
import logging
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from config import (
    DATE_COLUMN,
    DEFAULT_BETA_RADIUS,
    DEFAULT_CRITERION,
    DEFAULT_GATE,
    DEFAULT_GRID_POINTS,
    DEFAULT_REPLICATIONS,
    DEFAULT_SCHEME,
    DEFAULT_TRIM,
    FAST_GRID_POINTS,
    FAST_REPLICATIONS,
    SCHEMES,
)
from cointegration import DIRECTIONS, engle_granger, information_criteria
from data_loader import Panel, load_panel, log_transform, save_panel
from errors import AnalysisError, ConfigError, StageError
from reports import FORMATS
from samples import load_bundled
from simulator import DgpSpec, simulate_tvecm
from suplm import SupLmResult, bootstrap_pvalue, draw_seed, render_test_table
from tvecm import GridConfig, grid_search_tvecm, render_fit_table
from unitroot import integration_order

logger = logging.getLogger(__name__)

STAGES = ("unit_root", "engle_granger", "threshold_test", "tvecm")


@dataclass(frozen=True)
class PipelineConfig:
    input: Optional[str] = None
    dataset: Optional[str] = None
    benchmark: Optional[str] = None
    targets: Tuple[str, ...] = ()
    date_column: str = DATE_COLUMN
    deterministic: str = "c"
    lags: Union[str, int] = "auto"
    criterion: str = DEFAULT_CRITERION
    grid_points: int = DEFAULT_GRID_POINTS
    trim: float = DEFAULT_TRIM
    beta_radius: float = DEFAULT_BETA_RADIUS
    fix_beta: bool = False
    replications: int = DEFAULT_REPLICATIONS
    scheme: str = DEFAULT_SCHEME
    seed: Optional[int] = None
    log_transform: bool = False
    direction: str = DIRECTIONS[0]
    joint_test: bool = False
    gate: float = DEFAULT_GATE
    force_fit: bool = False
    workers: int = 1
    output_format: str = "text"

    def validate(self) -> "PipelineConfig":
        """Check every field; raises ConfigError before any computation."""
        if self.replications < 1:
            raise ConfigError("replications ≥ 1 required")
        if (self.input is None) == (self.dataset is None):
            raise ConfigError("exactly one of input file or bundled dataset is required")
        if self.input is not None and (not self.benchmark or not self.targets):
            raise ConfigError("an input file needs a benchmark column and at least one target")
        if self.benchmark in self.targets:
            raise ConfigError(f"benchmark '{self.benchmark}' is also listed as a target")
        if self.lags != "auto" and (not isinstance(self.lags, int) or self.lags < 0):
            raise ConfigError(f"lags must be 'auto' or a non-negative integer, got {self.lags!r}")
        if self.deterministic not in ("c", "ct"):
            raise ConfigError(f"deterministic must be 'c' or 'ct', got '{self.deterministic}'")
        if self.criterion not in ("bic", "aic"):
            raise ConfigError(f"criterion must be 'bic' or 'aic', got '{self.criterion}'")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {', '.join(SCHEMES)}, got '{self.scheme}'")
        if self.direction not in DIRECTIONS:
            raise ConfigError(f"direction must be one of {', '.join(DIRECTIONS)}")
        if not 0 < self.gate < 1:
            raise ConfigError(f"gate must lie in (0, 1), got {self.gate}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        self.grid()
        return self

    def grid(self) -> GridConfig:
        return GridConfig(self.grid_points, self.trim, self.beta_radius, self.fix_beta)

    def fast(self) -> "PipelineConfig":
        return replace(self, grid_points=FAST_GRID_POINTS, replications=FAST_REPLICATIONS)

    def resolved(self) -> "PipelineConfig":
        """Effective configuration: a drawn seed if none was given."""
        return self if self.seed is not None else replace(self, seed=draw_seed())

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["targets"] = list(self.targets)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "PipelineConfig":
        """Build from a config dict, or from a report carrying one under 'config'."""
        if "config" in data and isinstance(data["config"], dict):
            data = data["config"]
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        data = dict(data)
        if "targets" in data:
            data["targets"] = tuple(data["targets"])
        return cls(**data)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "PipelineConfig":
        try:
            with open(path) as f:
                return cls.from_dict(json.load(f))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid config file {path}: {exc}") from exc


def load_markets(cfg: PipelineConfig) -> Tuple[str, List[Tuple[str, Panel]]]:
    """Benchmark label and one (market, panel) pair per target."""
    if cfg.dataset is not None:
        panel = load_bundled(cfg.dataset, seed=None)
        if cfg.benchmark not in (None, panel.benchmark.label) or \
                (cfg.targets and tuple(cfg.targets) != (panel.target.label,)):
            raise ConfigError(f"bundled dataset '{cfg.dataset}' has columns {', '.join(panel.labels)}")
        pairs = [(panel.target.label, panel)]
    else:
        pairs = [(t, load_panel(cfg.input, cfg.benchmark, t, cfg.date_column)) for t in cfg.targets]
    if cfg.log_transform:
        pairs = [(market, log_transform(panel)) for market, panel in pairs]
    return pairs[0][1].benchmark.label, pairs


def _grid_lags(panel: Panel, cfg: PipelineConfig, beta) -> Tuple[int, Dict[int, float]]:
    if cfg.lags != "auto":
        return int(cfg.lags), {}
    scores = information_criteria(panel, beta, "auto", cfg.criterion)
    return min(scores, key=lambda q: (scores[q], q)), scores


def analyze_market(market: str, panel: Panel, cfg: PipelineConfig,
                   seed: int) -> Tuple[Dict, Optional[SupLmResult]]:
    """
    Run the four stages for one pair. Stops after stage 1 unless both series
    are I(1) and after stage 3 when the test does not reject at the gate
    (unless force_fit). A failing stage is recorded and ends the pair.
    """
    entry = {
        "market": market,
        "benchmark": panel.benchmark.label,
        "nobs": len(panel),
        "sample": [panel.timestamps[0], panel.timestamps[-1]],
        "stages": {},
        "notes": [],
        "completed": [],
        "error": None,
    }
    stages = entry["stages"]
    stage = STAGES[0]
    result = None
    try:
        logger.info("[1/4] Unit-root battery: %s", market)
        bench = integration_order(panel.benchmark, cfg.deterministic, "auto", cfg.criterion)
        target = integration_order(panel.target, cfg.deterministic, "auto", cfg.criterion)
        stages["unit_root"] = {"benchmark": bench.to_dict(), "target": target.to_dict()}
        entry["completed"].append(stage)
        if not (bench.integrated and target.integrated):
            entry["notes"].append(
                f"{bench.label} is {bench.order}, {target.label} is {target.order}; "
                "threshold analysis needs two I(1) series"
            )
            return entry, None

        stage = STAGES[1]
        logger.info("[2/4] Engle-Granger: %s", market)
        eg = engle_granger(panel, cfg.deterministic, cfg.direction, "auto", cfg.criterion)
        q, scores = _grid_lags(panel, cfg, eg.vector)
        stages["engle_granger"] = {**eg.to_dict(), "lags": q,
                                   "lag_criteria": {str(k): v for k, v in scores.items()}}
        entry["completed"].append(stage)

        stage = STAGES[2]
        logger.info("[3/4] Sup-LM test: %s", market)
        result = bootstrap_pvalue(panel, q, cfg.grid(), cfg.replications, seed, cfg.scheme,
                                  cfg.workers, cfg.deterministic, cfg.direction,
                                  cfg.joint_test, market)
        stages["threshold_test"] = result.details()
        entry["completed"].append(stage)
        if not result.rejects(cfg.gate):
            entry["notes"].append(
                f"no threshold effect at the {cfg.gate:.0%} level (p = {result.p_value:.3f}); "
                "linear adjustment not rejected"
            )
            if not cfg.force_fit:
                return entry, result

        stage = STAGES[3]
        logger.info("[4/4] Threshold VECM: %s", market)
        fit = grid_search_tvecm(panel, q, eg.vector, cfg.grid(), cfg.workers)
        stages["tvecm"] = {"fit": fit.summary(), "table": render_fit_table(fit)}
        entry["completed"].append(stage)
    except AnalysisError as exc:
        err = StageError(stage, exc)
        logger.error("%s: %s", market, err)
        entry["error"] = {"stage": stage, "message": str(exc), "exit_code": err.exit_code}
    return entry, result


def run_pipeline(cfg: PipelineConfig) -> Dict:
    """
    Full report for every market. The report embeds the effective config, so
    PipelineConfig.from_dict(report) re-runs it exactly.
    """
    cfg = cfg.validate().resolved()
    try:
        benchmark, pairs = load_markets(cfg)
    except AnalysisError as exc:
        raise StageError("load", exc) from exc

    markets, results = [], []
    for index, (market, panel) in enumerate(pairs):
        entry, result = analyze_market(market, panel, cfg, cfg.seed + index)
        markets.append(entry)
        if result is not None:
            results.append(result)

    errors = [m["error"] for m in markets if m["error"]]
    return {
        "config": cfg.to_dict(),
        "benchmark": benchmark,
        "markets": markets,
        "threshold_tests": render_test_table(results),
        "exit_code": errors[0]["exit_code"] if errors else 0,
    }


def simulate_command(spec: DgpSpec, out: Union[str, Path]) -> Path:
    """Simulate `spec` and write it as a CSV that load_panel reads back exactly."""
    panel = simulate_tvecm(spec)
    path = save_panel(panel, out)
    logger.info("Wrote %d observations (%s to %s) to %s",
                len(panel), panel.timestamps[0], panel.timestamps[-1], path)
    return path
