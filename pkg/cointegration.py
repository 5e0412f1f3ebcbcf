"""
Engle-Granger two-step cointegration test and linear VECM estimation.

The cointegrating vector is normalized as (1, -beta): z_t = benchmark_t - beta * target_t.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np
import statsmodels.api as sm
from statsmodels.tsa.tsatools import add_trend

from config import DEFAULT_CRITERION
from critical_values import check_deterministic, df_critical_values, df_pvalue
from data_loader import Panel, RegressorMatrix, build_regressors, error_correction_term
from errors import ConfigError, DataError, DegenerateRegressionError
from regression import (
    gaussian_loglik,
    least_squares,
    residual_covariance,
    white_standard_errors,
)
from unitroot import UnitRootResult, df_statistic, schwert_max_lag

logger = logging.getLogger(__name__)

DIRECTIONS = ("target-on-benchmark", "benchmark-on-target")


@dataclass(frozen=True)
class CointVector:
    """
    Cointegrating vector (1, -beta).

    `slope` is the step-1 coefficient of target on benchmark when that
    direction was used (beta = 1 / slope); `se` is the standard error of beta.
    """

    beta: float
    intercept: float = 0.0
    slope: Optional[float] = None
    se: Optional[float] = None

    def __post_init__(self):
        if not np.isfinite(self.beta):
            raise DegenerateRegressionError("degenerate cointegration regression: beta is not finite")
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def vector(self) -> np.ndarray:
        return np.array([1.0, -self.beta])

    def error_correction(self, panel: Panel) -> np.ndarray:
        return error_correction_term(panel, self.beta)

    @classmethod
    def at(cls, panel: Panel, beta: float) -> "CointVector":
        """Vector with the given beta; the intercept is the mean of z."""
        return cls(beta=beta, intercept=float(np.mean(error_correction_term(panel, beta))))

    def to_dict(self) -> dict:
        return {"beta": self.beta, "intercept": self.intercept, "slope": self.slope, "se": self.se}


def as_vector(beta: Union[CointVector, float]) -> CointVector:
    return beta if isinstance(beta, CointVector) else CointVector(beta=float(beta))


def estimate_cointegrating_vector(panel: Panel, deterministic: str = "c",
                                  direction: str = "target-on-benchmark"
                                  ) -> Tuple[CointVector, np.ndarray]:
    """Engle-Granger step 1: static least squares. Returns the vector and its residuals."""
    check_deterministic(deterministic, ("c", "ct"))
    if direction not in DIRECTIONS:
        raise ConfigError(f"direction must be one of {', '.join(DIRECTIONS)}; got '{direction}'")
    for series in (panel.benchmark, panel.target):
        if np.ptp(series.values) == 0:
            raise DataError(f"zero-variance input: '{series.label}' is constant")

    bench, target = panel.benchmark.values, panel.target.values
    y, x = (target, bench) if direction == "target-on-benchmark" else (bench, target)
    design = add_trend(x[:, None], trend=deterministic, prepend=True)
    fit = sm.OLS(y, design).fit()
    total = np.sum((y - y.mean()) ** 2)
    if fit.ssr <= 1e-12 * total:
        raise DegenerateRegressionError("degenerate cointegration regression")

    const, b, se_b = float(fit.params[0]), float(fit.params[-1]), float(fit.bse[-1])
    if direction == "target-on-benchmark":
        if abs(b) < 1e-12:
            raise DegenerateRegressionError("degenerate cointegration regression")
        vector = CointVector(beta=1.0 / b, intercept=-const / b, slope=b, se=se_b / b ** 2)
    else:
        vector = CointVector(beta=b, intercept=const, slope=None, se=se_b)
    return vector, fit.resid


@dataclass(frozen=True)
class EngleGrangerResult:
    vector: CointVector
    residual_test: UnitRootResult
    direction: str

    @property
    def cointegrated(self) -> Dict[str, bool]:
        return self.residual_test.decisions

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "vector": self.vector.to_dict(),
            "residual_test": self.residual_test.to_dict(),
            "cointegrated": self.cointegrated,
        }


def engle_granger(panel: Panel, deterministic: str = "c",
                  direction: str = "target-on-benchmark",
                  lags: Union[int, str] = "auto",
                  criterion: str = DEFAULT_CRITERION) -> EngleGrangerResult:
    """
    Engle-Granger two-step test.

    The residual ADF has no deterministics of its own; critical values and
    p-values come from the two-variable cointegration surfaces for the
    deterministic case of step 1.
    """
    if len(panel) < 30:
        raise DataError(f"Engle-Granger needs at least 30 observations, got {len(panel)}")
    vector, residuals = estimate_cointegrating_vector(panel, deterministic, direction)
    stat, lags, nobs = df_statistic(residuals, lags, "n", criterion, None)
    test = UnitRootResult("Engle-Granger", stat, lags, deterministic,
                          df_critical_values(deterministic, nobs, n_vars=2), nobs,
                          df_pvalue(stat, deterministic, n_vars=2))
    logger.info("Engle-Granger: beta=%.4f, ADF=%.3f (p=%.3f)", vector.beta, stat, test.pvalue)
    return EngleGrangerResult(vector, test, direction)


@dataclass(frozen=True, eq=False)
class VecmFit:
    coefficients: np.ndarray  # (2 + 2q) x 2
    se: np.ndarray
    residuals: np.ndarray
    sigma: np.ndarray
    loglik: float
    lags: int
    vector: CointVector
    regressors: RegressorMatrix

    @property
    def beta(self) -> float:
        return self.vector.beta

    @property
    def nobs(self) -> int:
        return self.residuals.shape[0]

    @property
    def n_params(self) -> int:
        return self.coefficients.size

    @property
    def aic(self) -> float:
        return -2 * self.loglik + 2 * self.n_params

    @property
    def bic(self) -> float:
        return -2 * self.loglik + np.log(self.nobs) * self.n_params

    def information_criterion(self, criterion: str) -> float:
        if criterion not in ("aic", "bic"):
            raise ConfigError(f"criterion must be 'bic' or 'aic'; got '{criterion}'")
        return getattr(self, criterion)


def fit_linear_vecm(panel: Panel, q: int, beta: Union[CointVector, float],
                    max_lag: Optional[int] = None) -> VecmFit:
    """Equation-by-equation least squares of dX_t on (1, z_{t-1}, dX_{t-1}, ..., dX_{t-q})."""
    vector = as_vector(beta)
    if len(panel) < q + 10:
        raise DataError(f"a lag-{q} VECM needs at least {q + 10} observations, got {len(panel)}")
    regressors, responses = build_regressors(panel, q, vector.beta, max_lag)
    fit = least_squares(regressors.x, responses, regressors.columns)
    sigma = residual_covariance(fit.residuals)
    return VecmFit(
        coefficients=fit.params,
        se=white_standard_errors(regressors.x, fit.residuals, fit.xtx_inv),
        residuals=fit.residuals,
        sigma=sigma,
        loglik=gaussian_loglik(sigma, regressors.nobs),
        lags=q,
        vector=vector,
        regressors=regressors,
    )


def _feasible_max_lag(n: int, q_max: int) -> int:
    # every order must leave room for its 2 + 2q regressors on the common sample
    while q_max > 0 and (n < q_max + 10 or n - q_max - 1 < 4 * (1 + q_max) + 10):
        q_max -= 1
    return q_max


def information_criteria(panel: Panel, beta: Union[CointVector, float],
                         q_max: Union[int, str] = "auto",
                         criterion: str = DEFAULT_CRITERION) -> Dict[int, float]:
    """Criterion value per lag order 0..q_max on the sample aligned to q_max."""
    n = len(panel)
    if q_max == "auto":
        requested = schwert_max_lag(n - 1) if n - 1 >= 16 else 0
    else:
        requested = int(q_max)
        if requested < 0:
            raise ConfigError(f"maximum lag must be >= 0, got {requested}")
    q_max = _feasible_max_lag(n, requested)
    if q_max < requested:
        logger.warning("Lag search capped at %d (requested %d) for %d observations", q_max, requested, n)
    return {
        q: fit_linear_vecm(panel, q, beta, max_lag=q_max).information_criterion(criterion)
        for q in range(q_max + 1)
    }


def select_lag(panel: Panel, beta: Union[CointVector, float],
               q_max: Union[int, str] = "auto", criterion: str = DEFAULT_CRITERION) -> int:
    """Lag order minimizing the criterion; ties go to the smaller order."""
    if q_max != "auto" and int(q_max) == 0:
        return 0
    scores = information_criteria(panel, beta, q_max, criterion)
    best = min(scores, key=lambda q: (scores[q], q))
    logger.info("Selected lag order q=%d by %s", best, criterion.upper())
    return best
