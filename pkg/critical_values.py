"""
Critical values and approximate p-values for Dickey-Fuller type statistics.

ADF, PP and Engle-Granger use MacKinnon's response surfaces as shipped with
statsmodels. The DF-GLS trend case has its own table, interpolated linearly
in 1/T.
"""
from typing import Dict

import numpy as np
from statsmodels.tsa.adfvalues import mackinnoncrit, mackinnonp

from config import LEVELS
from errors import ConfigError

DETERMINISTICS = ("n", "c", "ct")

# DF-GLS with constant and trend: sample size -> (1%, 5%, 10%)
DFGLS_TREND_TABLE = {
    50: (-3.77, -3.19, -2.89),
    100: (-3.58, -3.03, -2.74),
    200: (-3.46, -2.93, -2.64),
    500: (-3.44, -2.89, -2.60),
    np.inf: (-3.48, -2.89, -2.57),
}


def check_deterministic(deterministic: str, allowed=DETERMINISTICS) -> str:
    if deterministic not in allowed:
        raise ConfigError(
            f"deterministic must be one of {', '.join(allowed)}; got '{deterministic}'"
        )
    return deterministic


def df_critical_values(deterministic: str, nobs: int, n_vars: int = 1) -> Dict[str, float]:
    """MacKinnon critical values; n_vars > 1 gives the residual-based cointegration case."""
    check_deterministic(deterministic)
    values = mackinnoncrit(N=n_vars, regression=deterministic, nobs=nobs)
    return {level: float(v) for level, v in zip(LEVELS, values)}


def df_pvalue(statistic: float, deterministic: str, n_vars: int = 1) -> float:
    check_deterministic(deterministic)
    return float(mackinnonp(statistic, regression=deterministic, N=n_vars))


def dfgls_critical_values(deterministic: str, nobs: int) -> Dict[str, float]:
    """
    DF-GLS critical values. The constant case shares the no-deterministics
    Dickey-Fuller distribution; the trend case is read from the table.
    """
    check_deterministic(deterministic, ("c", "ct"))
    if deterministic == "c":
        return df_critical_values("n", nobs)
    sizes = sorted(DFGLS_TREND_TABLE, reverse=True)
    inverse = np.array([0.0 if np.isinf(s) else 1.0 / s for s in sizes])
    table = np.array([DFGLS_TREND_TABLE[s] for s in sizes])
    x = 1.0 / nobs
    return {level: float(np.interp(x, inverse, table[:, i])) for i, level in enumerate(LEVELS)}
