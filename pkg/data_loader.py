"""
Data loader for bivariate price panels.
Handles CSV ingestion, differencing and construction of the VECM regressors.
"""
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config import DATE_COLUMN, DEFAULT_START
from errors import ConfigError, DataError

logger = logging.getLogger(__name__)

_DATE_PATTERN = re.compile(r"^\d{4}-\d{2}(-\d{2})?$")


def _frozen(values, ndim: int = 1) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DataError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def parse_date(label: str) -> pd.Timestamp:
    """Parse an ISO 'YYYY-MM' or 'YYYY-MM-DD' label."""
    text = str(label).strip()
    if not _DATE_PATTERN.match(text):
        raise DataError(f"unparseable date '{label}' (expected YYYY-MM or YYYY-MM-DD)")
    try:
        return pd.Timestamp(text if len(text) == 10 else text + "-01")
    except ValueError as exc:
        raise DataError(f"unparseable date '{label}': {exc}") from exc


def month_labels(n: int, start: str = DEFAULT_START) -> Tuple[str, ...]:
    """Consecutive monthly labels 'YYYY-MM' starting at `start`."""
    first = parse_date(start).to_period("M")
    return tuple(pd.period_range(start=first, periods=n, freq="M").strftime("%Y-%m"))


@dataclass(frozen=True, eq=False)
class Series:
    """An ordered run of finite observations."""

    values: np.ndarray
    label: str = "series"

    def __post_init__(self):
        values = _frozen(self.values)
        if len(values) < 1:
            raise DataError(f"series '{self.label}' is empty")
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise DataError(f"series '{self.label}' has a non-finite value at position {bad[0] + 1}")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Panel:
    """Aligned benchmark and target price series with strictly increasing dates."""

    timestamps: Tuple[str, ...]
    benchmark: Series
    target: Series

    def __post_init__(self):
        stamps = tuple(str(s).strip() for s in self.timestamps)
        object.__setattr__(self, "timestamps", stamps)
        n = len(stamps)
        if len(self.benchmark) != n or len(self.target) != n:
            raise DataError(
                f"panel length mismatch: {n} timestamps, {len(self.benchmark)} benchmark, "
                f"{len(self.target)} target observations"
            )
        if n < 2:
            raise DataError(f"a panel needs at least 2 observations, got {n}")
        if self.benchmark.label == self.target.label:
            raise DataError(f"benchmark and target share the label '{self.target.label}'")
        parsed = [parse_date(s) for s in stamps]
        for row in range(1, n):
            if parsed[row] <= parsed[row - 1]:
                kind = "duplicate" if parsed[row] == parsed[row - 1] else "out-of-order"
                raise DataError(
                    f"non-monotone timestamps: {kind} date '{stamps[row]}' at row {row + 1} "
                    f"after '{stamps[row - 1]}'"
                )

    @classmethod
    def from_arrays(cls, benchmark, target, timestamps: Optional[Sequence[str]] = None,
                    labels: Tuple[str, str] = ("US", "Target"),
                    start: str = DEFAULT_START) -> "Panel":
        benchmark = np.asarray(benchmark, dtype=float)
        if timestamps is None:
            timestamps = month_labels(len(benchmark), start)
        return cls(tuple(timestamps), Series(benchmark, labels[0]), Series(target, labels[1]))

    def __len__(self) -> int:
        return len(self.timestamps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Panel):
            return NotImplemented
        return (self.timestamps == other.timestamps and self.benchmark == other.benchmark
                and self.target == other.target)

    __hash__ = None

    @property
    def labels(self) -> Tuple[str, str]:
        return self.benchmark.label, self.target.label

    @property
    def levels(self) -> np.ndarray:
        """T x 2 array, benchmark first."""
        return np.column_stack((self.benchmark.values, self.target.values))

    def transform(self, func: Callable[[np.ndarray], np.ndarray]) -> "Panel":
        """Apply an element-wise transform to both series."""
        return Panel(self.timestamps,
                     Series(func(self.benchmark.values), self.benchmark.label),
                     Series(func(self.target.values), self.target.label))

    def to_frame(self, date_column: str = DATE_COLUMN) -> pd.DataFrame:
        return pd.DataFrame({
            date_column: list(self.timestamps),
            self.benchmark.label: self.benchmark.values,
            self.target.label: self.target.values,
        })


def log_transform(panel: Panel) -> Panel:
    """Natural log of both series; every value must be positive."""
    for series in (panel.benchmark, panel.target):
        if np.any(series.values <= 0):
            raise DataError(f"log transform needs positive values; '{series.label}' has values <= 0")
    return panel.transform(np.log)


def _to_float(cell: str) -> float:
    # float() reads repr() output back exactly
    try:
        return float(cell)
    except ValueError:
        return np.nan


def _parse_numeric(column: pd.Series, name: str) -> np.ndarray:
    raw = column.str.strip()
    parsed = raw.map(_to_float).astype(float)
    bad = (parsed.isna() | ~np.isfinite(parsed)).to_numpy()
    if bad.any():
        pos = int(np.flatnonzero(bad)[0])
        cell = raw.iloc[pos]
        reason = "missing value" if cell == "" else f"unparseable value '{cell}'"
        raise DataError(f"{reason} in column '{name}' at row {pos + 1}")
    return parsed.to_numpy(dtype=float)


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    """Read a CSV with every cell kept as text so gaps stay visible."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as exc:
        raise DataError(f"input file is empty: {path}") from exc
    except pd.errors.ParserError as exc:
        raise DataError(f"invalid CSV format in {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not UTF-8 text: {exc.reason} at byte {exc.start}") from exc


def load_panel(path: Union[str, Path], benchmark_column: str, target_column: str,
               date_column: str = DATE_COLUMN) -> Panel:
    """
    Load a benchmark/target panel from a CSV file.

    The file needs a header row, a date column and both named columns. Rows are
    counted from 1, header excluded. Missing values are rejected, never filled.
    """
    df = read_table(path)

    missing = [c for c in (date_column, benchmark_column, target_column) if c not in df.columns]
    if missing:
        raise DataError(f"missing column(s) in {path}: {', '.join(missing)}")
    if len(df) < 2:
        raise DataError(f"need at least 2 data rows, found {len(df)} in {path}")

    dates = df[date_column].str.strip()
    empty = np.flatnonzero((dates == "").to_numpy())
    if empty.size:
        raise DataError(f"missing value in column '{date_column}' at row {empty[0] + 1}")

    benchmark = _parse_numeric(df[benchmark_column], benchmark_column)
    target = _parse_numeric(df[target_column], target_column)

    panel = Panel(tuple(dates), Series(benchmark, benchmark_column), Series(target, target_column))
    logger.info("Loaded %d observations (%s to %s) from %s",
                len(panel), panel.timestamps[0], panel.timestamps[-1], path)
    return panel


def save_panel(panel: Panel, path: Union[str, Path], date_column: str = DATE_COLUMN) -> Path:
    """Write a panel in load_panel's schema; floats are written at full precision."""
    if date_column in panel.labels:
        raise DataError(f"series label collides with the date column '{date_column}'")
    frame = pd.DataFrame({
        date_column: list(panel.timestamps),
        panel.benchmark.label: [repr(float(v)) for v in panel.benchmark.values],
        panel.target.label: [repr(float(v)) for v in panel.target.values],
    })
    path = Path(path)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def difference(series: Series, order: int = 1) -> Series:
    """Element-wise difference: output[t] = input[t+1] - input[t], applied `order` times."""
    if order < 1:
        raise ConfigError(f"difference order must be >= 1, got {order}")
    if len(series) < order + 1:
        raise DataError(
            f"differencing '{series.label}' needs at least {order + 1} observations, got {len(series)}"
        )
    return Series(np.diff(series.values, n=order), label=f"d{series.label}")


def error_correction_term(panel: Panel, beta: float) -> np.ndarray:
    """z_t = benchmark_t - beta * target_t."""
    return panel.benchmark.values - beta * panel.target.values


@dataclass(frozen=True, eq=False)
class RegressorMatrix:
    """
    VECM regressors, one row per effective observation t:
    (1, z_{t-1}, dX_{t-1}, ..., dX_{t-q}), each dX block ordered benchmark, target.
    """

    x: np.ndarray
    columns: Tuple[str, ...]
    lags: int

    @property
    def nobs(self) -> int:
        return self.x.shape[0]

    @property
    def z_lag(self) -> np.ndarray:
        return self.x[:, 1]


def regressor_names(labels: Tuple[str, str], q: int) -> Tuple[str, ...]:
    names = ["const", "ect"]
    for i in range(1, q + 1):
        names += [f"d{labels[0]}(-{i})", f"d{labels[1]}(-{i})"]
    return tuple(names)


def build_regressors(panel: Panel, q: int, beta, max_lag: Optional[int] = None
                     ) -> Tuple[RegressorMatrix, np.ndarray]:
    """
    Build the VECM regressor matrix and the response matrix dX_t.

    `beta` is a float or anything with a `beta` attribute. When `max_lag` is
    given the sample starts where a lag-`max_lag` model would, so fits of
    different orders share one sample.
    """
    beta = float(getattr(beta, "beta", beta))
    if q < 0:
        raise ConfigError(f"lag order must be >= 0, got {q}")
    max_lag = q if max_lag is None else int(max_lag)
    if max_lag < q:
        raise ConfigError(f"max_lag ({max_lag}) is below the lag order ({q})")
    n = len(panel)
    required = max_lag + 3
    if n < required:
        raise DataError(f"need at least {required} observations for lag order {max_lag}, got {n}")

    levels = panel.levels
    diffs = np.diff(levels, axis=0)  # diffs[t - 1] = X_t - X_{t-1}
    z = error_correction_term(panel, beta)
    start = max_lag + 1
    rows = np.arange(start, n)

    blocks = [np.ones(len(rows)), z[rows - 1]]
    for i in range(1, q + 1):
        blocks.append(diffs[rows - i - 1])
    x = np.column_stack(blocks)
    x.setflags(write=False)
    responses = diffs[rows - 1]
    return RegressorMatrix(x, regressor_names(panel.labels, q), q), responses


if __name__ == "__main__":
    import sys

    if len(sys.argv) < 4:
        print("usage: python data_loader.py FILE BENCHMARK TARGET")
        sys.exit(1)

    panel = load_panel(sys.argv[1], sys.argv[2], sys.argv[3])
    print(f"Loaded {len(panel)} observations: {panel.timestamps[0]} to {panel.timestamps[-1]}")
    print(panel.to_frame().describe())
