"""
Unit-root tests: ADF, Phillips-Perron and DF-GLS, plus the levels/differences
battery used to screen a series as I(1).
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

import numpy as np
import statsmodels.api as sm
from statsmodels.tsa.tsatools import add_trend

from config import DEFAULT_CRITERION, DFGLS_CBAR, STATIONARITY_LEVEL
from critical_values import (
    check_deterministic,
    df_critical_values,
    df_pvalue,
    dfgls_critical_values,
)
from data_loader import Series, difference
from errors import ConfigError, DataError, DegenerateRegressionError

logger = logging.getLogger(__name__)

CRITERIA = ("bic", "aic")


@dataclass(frozen=True)
class UnitRootResult:
    test: str
    statistic: float
    lags: int
    deterministic: str
    critical_values: Dict[str, float]
    nobs: int
    pvalue: Optional[float] = None

    @property
    def decisions(self) -> Dict[str, bool]:
        """Reject the unit root at each level (left-tailed)."""
        return {level: self.statistic < cv for level, cv in self.critical_values.items()}

    def rejects(self, level: str = STATIONARITY_LEVEL) -> bool:
        return self.decisions[level]

    def to_dict(self) -> dict:
        return {
            "test": self.test,
            "statistic": self.statistic,
            "lags": self.lags,
            "deterministic": self.deterministic,
            "nobs": self.nobs,
            "critical_values": dict(self.critical_values),
            "pvalue": self.pvalue,
            "reject": self.decisions,
        }


def schwert_max_lag(nobs: int) -> int:
    """floor(12 (T/100)^(1/4))."""
    if nobs < 16:
        raise DataError(f"Schwert lag rule needs at least 16 observations, got {nobs}")
    return int(np.floor(12 * (nobs / 100) ** 0.25))


def newey_west_bandwidth(nobs: int) -> int:
    """floor(4 (T/100)^(2/9))."""
    return int(np.floor(4 * (nobs / 100) ** (2 / 9)))


def long_run_variance(u: np.ndarray, bandwidth: int) -> float:
    """Bartlett-weighted sum of autocovariances of `u` (not demeaned)."""
    u = np.asarray(u, dtype=float)
    n = len(u)
    lrv = u @ u / n
    for j in range(1, min(int(bandwidth), n - 1) + 1):
        weight = 1 - j / (bandwidth + 1)
        lrv += 2 * weight * (u[j:] @ u[:-j]) / n
    return float(lrv)


def _values(series: Union[Series, np.ndarray]) -> np.ndarray:
    values = series.values if isinstance(series, Series) else np.asarray(series, dtype=float)
    if np.ptp(values) == 0:
        raise DataError("zero-variance input")
    return values


def _check_criterion(criterion: str) -> str:
    if criterion not in CRITERIA:
        raise ConfigError(f"criterion must be 'bic' or 'aic'; got '{criterion}'")
    return criterion


def _df_regression(y: np.ndarray, lags: int, deterministic: str, drop: int):
    """
    OLS of dy_t on (deterministics, y_{t-1}, dy_{t-1}, ..., dy_{t-lags}).

    The sample starts at t = drop + 1 so regressions with different lag counts
    can share one sample.
    """
    n = len(y)
    dy = np.diff(y)  # dy[t - 1] = y_t - y_{t-1}
    start = drop + 1
    columns = [y[start - 1:n - 1]]
    for i in range(1, lags + 1):
        columns.append(dy[start - 1 - i:n - 1 - i])
    x = np.column_stack(columns)
    if deterministic != "n":
        x = add_trend(x, trend=deterministic, prepend=True)
    response = dy[start - 1:]
    if np.linalg.matrix_rank(x) < x.shape[1]:
        raise DegenerateRegressionError("singular unit-root regression")
    fit = sm.OLS(response, x).fit()
    if fit.ssr <= 1e-20 * max(1.0, response @ response):
        raise DegenerateRegressionError("zero residual variance in unit-root regression")
    return fit


def _level_position(deterministic: str) -> int:
    return {"n": 0, "c": 1, "ct": 2}[deterministic]


def select_df_lag(y: np.ndarray, max_lag: int, deterministic: str,
                  criterion: str = DEFAULT_CRITERION) -> int:
    """Information-criterion lag choice on the common max_lag sample; ties go to fewer lags."""
    _check_criterion(criterion)
    best_lag, best_score = 0, np.inf
    for lags in range(max_lag + 1):
        fit = _df_regression(y, lags, deterministic, drop=max_lag)
        score = getattr(fit, criterion)
        if score < best_score:
            best_lag, best_score = lags, score
    return best_lag


def _auto_max_lag(n: int, max_lags: Optional[int]) -> int:
    if max_lags is not None:
        return int(max_lags)
    if n < 16:
        return 0
    cap = max(0, (n - 10) // 2)
    max_lag = schwert_max_lag(n)
    if max_lag > cap:
        logger.warning("Capping lag search at %d (Schwert rule gives %d for %d observations)",
                       cap, max_lag, n)
    return min(max_lag, cap)


def df_statistic(y: np.ndarray, lags, deterministic: str, criterion: str,
                  max_lags: Optional[int]):
    """t-ratio on y_{t-1}, lag count and effective observations."""
    if lags == "auto":
        lags = select_df_lag(y, _auto_max_lag(len(y), max_lags), deterministic, criterion)
    lags = int(lags)
    if lags < 0:
        raise ConfigError(f"lags must be >= 0, got {lags}")
    if len(y) < lags + 10:
        raise DataError(f"need at least {lags + 10} observations for {lags} lags, got {len(y)}")
    fit = _df_regression(y, lags, deterministic, drop=lags)
    return float(fit.tvalues[_level_position(deterministic)]), lags, int(fit.nobs)


def adf_test(series: Union[Series, np.ndarray], lags: Union[int, str] = "auto",
             deterministic: str = "c", criterion: str = DEFAULT_CRITERION,
             max_lags: Optional[int] = None) -> UnitRootResult:
    """Augmented Dickey-Fuller t-test on the lagged level."""
    check_deterministic(deterministic)
    y = _values(series)
    stat, lags, nobs = df_statistic(y, lags, deterministic, criterion, max_lags)
    return UnitRootResult("ADF", stat, lags, deterministic,
                          df_critical_values(deterministic, nobs), nobs,
                          df_pvalue(stat, deterministic))


def pp_test(series: Union[Series, np.ndarray], deterministic: str = "c",
            bandwidth: Optional[int] = None) -> UnitRootResult:
    """
    Phillips-Perron Z_t.

    Z_t = sqrt(g0 / l2) t - (l2 - g0) / (2 sqrt(l2)) * n se / s, with g0 the
    residual variance and l2 its Newey-West long-run counterpart.
    """
    check_deterministic(deterministic)
    y = _values(series)
    if len(y) < 20:
        raise DataError(f"Phillips-Perron needs at least 20 observations, got {len(y)}")
    fit = _df_regression(y, 0, deterministic, drop=0)
    u = fit.resid
    n = len(u)
    bandwidth = newey_west_bandwidth(n) if bandwidth is None else int(bandwidth)
    gamma0 = u @ u / n
    lam2 = long_run_variance(u, bandwidth)
    if lam2 <= 0:
        raise DegenerateRegressionError("non-positive long-run variance")
    pos = _level_position(deterministic)
    t, se, s = fit.tvalues[pos], fit.bse[pos], np.sqrt(fit.scale)
    stat = float(np.sqrt(gamma0 / lam2) * t - 0.5 * (lam2 - gamma0) / np.sqrt(lam2) * n * se / s)
    return UnitRootResult("PP", stat, bandwidth, deterministic,
                          df_critical_values(deterministic, n), n,
                          df_pvalue(stat, deterministic))


def quasi_difference(values: np.ndarray, a: float) -> np.ndarray:
    """(v_1, v_2 - a v_1, ..., v_T - a v_{T-1}), row-wise for matrices."""
    values = np.asarray(values, dtype=float)
    out = values.copy()
    out[1:] = values[1:] - a * values[:-1]
    return out


def gls_detrend(y: np.ndarray, deterministic: str, cbar: float) -> np.ndarray:
    """Remove deterministics estimated by GLS under the local alternative 1 + cbar/T."""
    n = len(y)
    a = 1 + cbar / n
    d = np.ones((n, 1))
    if deterministic == "ct":
        d = np.column_stack((d, np.arange(1, n + 1)))
    delta, _, _, _ = np.linalg.lstsq(quasi_difference(d, a), quasi_difference(y, a), rcond=None)
    return y - d @ delta


def dfgls_test(series: Union[Series, np.ndarray], deterministic: str = "c",
               lags: Union[int, str] = "auto", criterion: str = DEFAULT_CRITERION,
               cbar: Optional[float] = None, max_lags: Optional[int] = None) -> UnitRootResult:
    """DF-GLS: ADF without deterministics on the GLS-detrended series."""
    check_deterministic(deterministic, ("c", "ct"))
    y = _values(series)
    cbar = DFGLS_CBAR[deterministic] if cbar is None else float(cbar)
    detrended = gls_detrend(y, deterministic, cbar)
    stat, lags, nobs = df_statistic(detrended, lags, "n", criterion, max_lags)
    return UnitRootResult("DF-GLS", stat, lags, deterministic,
                          dfgls_critical_values(deterministic, nobs), nobs)


def run_battery(series: Union[Series, np.ndarray], deterministic: str = "c",
                lags: Union[int, str] = "auto",
                criterion: str = DEFAULT_CRITERION) -> Dict[str, UnitRootResult]:
    return {
        "ADF": adf_test(series, lags, deterministic, criterion),
        "PP": pp_test(series, deterministic),
        "DF-GLS": dfgls_test(series, deterministic, lags, criterion),
    }


def majority_rejects(results: Dict[str, UnitRootResult], level: str = STATIONARITY_LEVEL) -> bool:
    """At least two of the three tests reject the unit root."""
    return sum(r.rejects(level) for r in results.values()) >= 2


@dataclass(frozen=True)
class IntegrationOrder:
    label: str
    levels: Dict[str, UnitRootResult]
    differences: Dict[str, UnitRootResult]
    level: str = STATIONARITY_LEVEL
    order: str = field(init=False)

    def __post_init__(self):
        if majority_rejects(self.levels, self.level):
            order = "I(0)"
        elif majority_rejects(self.differences, self.level):
            order = "I(1)"
        else:
            order = "I(2)?"
        object.__setattr__(self, "order", order)

    @property
    def integrated(self) -> bool:
        return self.order == "I(1)"

    def to_dict(self) -> dict:
        return {
            "series": self.label,
            "order": self.order,
            "level": self.level,
            "levels": {name: r.to_dict() for name, r in self.levels.items()},
            "differences": {name: r.to_dict() for name, r in self.differences.items()},
        }


def integration_order(series: Series, deterministic: str = "c",
                      lags: Union[int, str] = "auto",
                      criterion: str = DEFAULT_CRITERION) -> IntegrationOrder:
    """Run the battery on levels and first differences and classify the series."""
    levels = run_battery(series, deterministic, lags, criterion)
    differences = run_battery(difference(series), deterministic, lags, criterion)
    result = IntegrationOrder(series.label, levels, differences)
    logger.info("%s: %s (%s)", series.label, result.order,
                ", ".join(f"{k} {v.statistic:.2f}" for k, v in levels.items()))
    return result
