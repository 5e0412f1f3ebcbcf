#!/usr/bin/env python3
"""
Threshold Cointegration Analysis Runner

Tests a benchmark price index against one or more target markets for linear
and threshold cointegration, and fits a two-regime VECM where a threshold
effect is found.

Usage:
    python run_analysis.py analyze --input FILE --benchmark COL --target COL [...]
    python run_analysis.py analyze --dataset mexico-like --fast
    python run_analysis.py simulate --spec FILE --out FILE [--seed N] [--start YYYY-MM]
    python run_analysis.py datasets

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from config import (
    APP_NAME,
    DATE_COLUMN,
    DEFAULT_BETA_RADIUS,
    DEFAULT_GATE,
    DEFAULT_GRID_POINTS,
    DEFAULT_REPLICATIONS,
    DEFAULT_TRIM,
    SCHEMES,
)
from errors import AnalysisError, ConfigError
from pipeline import PipelineConfig, run_pipeline, simulate_command
from reports import FORMATS, render_report
from samples import bundled_spec, list_bundled
from simulator import DgpSpec

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def _lags(value: str):
    if value == "auto":
        return value
    try:
        lags = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or an integer, got '{value}'")
    if lags < 0:
        raise argparse.ArgumentTypeError("lags must be >= 0")
    return lags


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="run_analysis.py", description=APP_NAME)
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="More logging on stderr (-v info, -vv debug)")
    parser.add_argument("-q", "--quiet", action="store_true", help="Errors only on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    analyze = sub.add_parser("analyze", help="Run the four-stage analysis")
    source = analyze.add_mutually_exclusive_group()
    source.add_argument("--input", help="CSV file with a date column and price columns")
    source.add_argument("--dataset", help="Bundled synthetic dataset (see 'datasets')")
    analyze.add_argument("--config", help="JSON config, or a previous JSON report to re-run")
    analyze.add_argument("--benchmark", help="Benchmark column (e.g. US)")
    analyze.add_argument("--target", action="append", dest="targets", default=None,
                         help="Target column; repeat for several markets")
    analyze.add_argument("--date-column", default=DATE_COLUMN)
    analyze.add_argument("--lags", type=_lags, default="auto", help="VECM lag order: auto or N")
    analyze.add_argument("--criterion", choices=("bic", "aic"), default="bic")
    analyze.add_argument("--trend", action="store_true",
                         help="Constant and trend in unit-root and cointegrating regressions")
    analyze.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS)
    analyze.add_argument("--trim", type=float, default=DEFAULT_TRIM)
    analyze.add_argument("--beta-radius", type=float, default=DEFAULT_BETA_RADIUS)
    analyze.add_argument("--fix-beta", action="store_true",
                         help="Hold beta at the Engle-Granger estimate in the TVECM search")
    analyze.add_argument("--replications", type=int, default=DEFAULT_REPLICATIONS)
    analyze.add_argument("--scheme", choices=SCHEMES, default=SCHEMES[0])
    analyze.add_argument("--seed", type=int, default=None)
    analyze.add_argument("--log", action="store_true", help="Analyze natural logs of the prices")
    analyze.add_argument("--regress", choices=("target-on-benchmark", "benchmark-on-target"),
                         default="target-on-benchmark", help="Engle-Granger step-1 direction")
    analyze.add_argument("--joint-test", action="store_true",
                         help="Take the Sup-LM supremum over (beta, tau) instead of tau")
    analyze.add_argument("--gate", type=float, default=DEFAULT_GATE,
                         help="Fit the TVECM when the Sup-LM p-value is at or below this")
    analyze.add_argument("--force-fit", action="store_true")
    analyze.add_argument("--workers", type=int, default=1)
    analyze.add_argument("--fast", action="store_true",
                         help="Desk-scale profile: 50 grid points, 200 replications")
    analyze.add_argument("--format", choices=FORMATS, default="text")
    analyze.add_argument("--out", help="Write the report here instead of stdout")
    analyze.set_defaults(handler=cmd_analyze)

    simulate = sub.add_parser("simulate", help="Simulate a DGP spec to CSV")
    spec_source = simulate.add_mutually_exclusive_group(required=True)
    spec_source.add_argument("--spec", help="DGP spec JSON file")
    spec_source.add_argument("--dataset", help="Bundled dataset name")
    simulate.add_argument("--out", required=True)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--start", default=None, help="First month label, YYYY-MM")
    simulate.set_defaults(handler=cmd_simulate)

    datasets = sub.add_parser("datasets", help="List bundled datasets")
    datasets.set_defaults(handler=cmd_datasets)
    return parser


def _config_fields(args: argparse.Namespace) -> dict:
    return dict(
        input=args.input,
        dataset=args.dataset,
        benchmark=args.benchmark,
        targets=tuple(args.targets or ()),
        date_column=args.date_column,
        deterministic="ct" if args.trend else "c",
        lags=args.lags,
        criterion=args.criterion,
        grid_points=args.grid_points,
        trim=args.trim,
        beta_radius=args.beta_radius,
        fix_beta=args.fix_beta,
        replications=args.replications,
        scheme=args.scheme,
        seed=args.seed,
        log_transform=args.log,
        direction=args.regress,
        joint_test=args.joint_test,
        gate=args.gate,
        force_fit=args.force_fit,
        workers=args.workers,
        output_format=args.format,
    )


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """
    Pipeline config from the analyze flags. With --config the file is the
    base and every flag set away from its default overrides it.
    """
    given = _config_fields(args)
    if not args.config:
        cfg = PipelineConfig(**given)
    else:
        defaults = _config_fields(build_parser().parse_args(["analyze"]))
        overrides = {k: v for k, v in given.items() if v != defaults[k]}
        # a new data source replaces the stored one
        if "input" in overrides:
            overrides["dataset"] = None
        if "dataset" in overrides:
            overrides["input"] = None
        cfg = PipelineConfig.from_json(args.config)
        if overrides:
            logger.info("Overriding %s from the command line", ", ".join(sorted(overrides)))
            cfg = replace(cfg, **overrides)
    if args.fast:
        cfg = cfg.fast()
    return cfg


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    report = run_pipeline(cfg)
    text = render_report(report, report["config"]["output_format"])
    if args.out:
        Path(args.out).write_text(text)
        logger.info("Report written to %s", args.out)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return report["exit_code"]


def cmd_simulate(args: argparse.Namespace) -> int:
    spec = DgpSpec.from_json(args.spec) if args.spec else bundled_spec(args.dataset)
    spec = spec.with_overrides(seed=args.seed, start=args.start)
    path = simulate_command(spec, args.out)
    print(f"Wrote {spec.n_obs} observations to {path}")
    return 0


def cmd_datasets(args: argparse.Namespace) -> int:
    for d in list_bundled():
        print(f"{d['name']:<22} {', '.join(d['labels']):<10} {d['n_obs']} obs from {d['start']}, "
              f"q={d['lags']}  {d['description']}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.ERROR if args.quiet else logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except AnalysisError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
