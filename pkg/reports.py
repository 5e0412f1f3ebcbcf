"""
Report rendering: threshold-test and regime-coefficient tables as plain text,
markdown or JSON, and the full pipeline report.
"""
import json
import math
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from config import APP_NAME, DEFAULT_GATE

FORMATS = ("text", "markdown", "json")

TEST_HEADERS = ["Market", "LM Test statistic", "p-value", "Threshold estimates"]
FIT_HEADERS = ["Variable", "Estimations in Regime 1", "Estimations in Regime 2"]

Row = Union[str, Sequence[str]]


def format_number(value: Optional[float]) -> str:
    """Coefficient formatting: 1 decimal from 100, 2 from 0.1, else 3; zero is '0.000'."""
    if value is None or not math.isfinite(value):
        return "n/a"
    if value == 0:
        return "0.000"
    magnitude = abs(value)
    if magnitude >= 100:
        return f"{value:.1f}"
    if magnitude >= 0.1:
        return f"{value:.2f}"
    return f"{value:.3f}"


def format_estimate(estimate: Optional[float], se: Optional[float]) -> str:
    return f"{format_number(estimate)} ({format_number(se)})"


def format_pvalue(p: float) -> str:
    if p < 0.001:
        return "<0.1%"
    return f"{p * 100:.1f}%"


def format_statistic(value: float) -> str:
    return f"{value:.2f}" if math.isfinite(value) else "n/a"


def format_tau(value: float) -> str:
    return f"{value:.1f}" if math.isfinite(value) else "n/a"


def text_table(headers: Sequence[str], rows: Sequence[Row]) -> str:
    """
    Fixed-width table: first column left-aligned, the rest right-aligned.
    A plain string row is printed as a section line.
    """
    cells = [r for r in rows if not isinstance(r, str)]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(headers)]

    def line(values: Sequence[str]) -> str:
        parts = [v.ljust(w) if i == 0 else v.rjust(w) for i, (v, w) in enumerate(zip(values, widths))]
        return "  ".join(parts).rstrip()

    out = [line(headers), "  ".join("-" * w for w in widths)]
    out += [row if isinstance(row, str) else line(row) for row in rows]
    return "\n".join(out)


def markdown_table(headers: Sequence[str], rows: Sequence[Row]) -> str:
    out = ["| " + " | ".join(headers) + " |",
           "|" + "|".join(["---"] + ["---:"] * (len(headers) - 1)) + "|"]
    for row in rows:
        if isinstance(row, str):
            row = [f"**{row}**"] + [""] * (len(headers) - 1)
        out.append("| " + " | ".join(row) + " |")
    return "\n".join(out)


def _table(headers: Sequence[str], rows: Sequence[Row], fmt: str) -> str:
    if fmt == "markdown":
        return markdown_table(headers, rows)
    return text_table(headers, rows)


def render_test_rows(rows: Sequence[Dict], fmt: str = "text", gate: float = DEFAULT_GATE) -> str:
    """Threshold-test table, followed by a note naming markets without a rejection."""
    if fmt == "json":
        return json.dumps(clean(list(rows)), indent=2, sort_keys=True)
    body = [[r["market"], format_statistic(r["lm"]), format_pvalue(r["pvalue"]),
             format_tau(r["tau_hat"])] for r in rows]
    text = _table(TEST_HEADERS, body, fmt)
    accepted = [r["market"] for r in rows if r["pvalue"] > gate]
    if accepted:
        text += f"\n\nNot rejected at {gate * 100:g}%: {', '.join(accepted)}"
    return text


def render_fit_rows(rows: Sequence[Dict], fmt: str = "text") -> str:
    """Regime-coefficient table, standard errors in brackets."""
    if fmt == "json":
        return json.dumps(clean(list(rows)), indent=2, sort_keys=True)
    body: List[Row] = []
    current = None
    for r in rows:
        if r["equation"] != current:
            current = r["equation"]
            body.append(current)
        body.append([r["variable"],
                     format_estimate(r["regime1"]["est"], r["regime1"]["se"]),
                     format_estimate(r["regime2"]["est"], r["regime2"]["se"])])
    return _table(FIT_HEADERS, body, fmt)


def clean(obj):
    """JSON-safe copy: numpy scalars and arrays to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def to_json(report: Dict) -> str:
    return json.dumps(clean(report), indent=2, sort_keys=True) + "\n"


def _unit_root_lines(stage: Dict) -> List[str]:
    lines = []
    for role in ("benchmark", "target"):
        entry = stage[role]
        stats = ", ".join(f"{name} {format_statistic(r['statistic'])}"
                          for name, r in entry["levels"].items())
        lines.append(f"  {entry['series']}: {entry['order']} (levels: {stats})")
    return lines


def _market_section(market: Dict, fmt: str) -> List[str]:
    heading = f"## {market['market']}" if fmt == "markdown" else f"== {market['market']} =="
    lines = [heading, f"Sample: {market['sample'][0]} to {market['sample'][1]} ({market['nobs']} obs)"]
    stages = market["stages"]

    if "unit_root" in stages:
        lines.append("[1/4] Unit roots, 5% level")
        lines += _unit_root_lines(stages["unit_root"])
    if "engle_granger" in stages:
        eg = stages["engle_granger"]
        test = eg["residual_test"]
        verdict = "yes" if eg["cointegrated"]["5%"] else "no"
        lines.append(
            f"[2/4] Engle-Granger: beta {format_number(eg['vector']['beta'])}, "
            f"ADF {format_statistic(test['statistic'])} (5% cv {format_statistic(test['critical_values']['5%'])}), "
            f"cointegrated at 5%: {verdict}; VECM lags q={eg['lags']}"
        )
    if "threshold_test" in stages:
        t = stages["threshold_test"]
        lines.append(f"[3/4] Sup-LM {format_statistic(t['lm'])}, p-value {format_pvalue(t['pvalue'])}, "
                     f"tau {format_tau(t['tau_hat'])} ({t['replications']} replications, {t['scheme']})")
    if "tvecm" in stages:
        fit = stages["tvecm"]["fit"]
        shares = fit["regime_shares"]
        lines.append(f"[4/4] TVECM: tau {format_tau(fit['tau'])}, beta {format_number(fit['beta'])}, "
                     f"regime shares {shares[0]:.1%} / {shares[1]:.1%}")
        lines.append("")
        lines.append(render_fit_rows(stages["tvecm"]["table"], fmt))
    for note in market.get("notes", []):
        lines.append(f"Note: {note}")
    if market.get("error"):
        err = market["error"]
        lines.append(f"Error in stage '{err['stage']}': {err['message']}")
    return lines


def render_report(report: Dict, fmt: str = "text") -> str:
    """The full pipeline report in the requested format."""
    if fmt == "json":
        return to_json(report)
    cfg = report["config"]
    title = f"# {APP_NAME}" if fmt == "markdown" else APP_NAME
    lines = [title, "",
             f"Benchmark: {report['benchmark']} | grid points {cfg['grid_points']} | "
             f"trim {cfg['trim']} | replications {cfg['replications']} | seed {cfg['seed']}",
             ""]
    for market in report["markets"]:
        lines += _market_section(market, fmt)
        lines.append("")
    if report["threshold_tests"]:
        lines.append("## Threshold cointegration tests" if fmt == "markdown"
                     else "Threshold cointegration tests")
        lines.append("")
        lines.append(render_test_rows(report["threshold_tests"], fmt, cfg["gate"]))
        lines.append("")
    return "\n".join(lines)
