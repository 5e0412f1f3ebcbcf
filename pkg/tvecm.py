"""
Two-regime threshold VECM: grid search over (beta, tau) by concentrated
Gaussian likelihood, regime classification and Eicker-White standard errors.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import repeat
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import (
    DEFAULT_BETA_RADIUS,
    DEFAULT_GRID_POINTS,
    DEFAULT_TRIM,
    FAST_GRID_POINTS,
    TIE_TOLERANCE,
)
from cointegration import CointVector, as_vector
from data_loader import Panel, RegressorMatrix, build_regressors
from errors import (
    ConfigError,
    DegenerateRegressionError,
    InfeasibleGridError,
    SingularRegressorError,
)
from regression import gaussian_loglik, least_squares, residual_covariance, white_standard_errors

logger = logging.getLogger(__name__)

# (score, tau, beta)
Candidate = Tuple[float, float, float]


@dataclass(frozen=True)
class GridConfig:
    grid_points: int = DEFAULT_GRID_POINTS
    trim: float = DEFAULT_TRIM
    beta_radius: float = DEFAULT_BETA_RADIUS
    fix_beta: bool = False

    def __post_init__(self):
        if int(self.grid_points) < 2:
            raise ConfigError(f"grid points must be >= 2, got {self.grid_points}")
        if not 0 < self.trim < 0.5:
            raise ConfigError(f"trim must lie in (0, 0.5), got {self.trim}")
        if not self.beta_radius > 0:
            raise ConfigError(f"beta radius must be positive, got {self.beta_radius}")

    @classmethod
    def fast(cls, **kwargs) -> "GridConfig":
        return cls(grid_points=FAST_GRID_POINTS, **kwargs)


def classify_regimes(z: np.ndarray, tau: float) -> np.ndarray:
    """1 where z <= tau, else 2."""
    return np.where(np.asarray(z) <= tau, 1, 2).astype(np.int8)


def threshold_grid(z_lag: np.ndarray, trim: float, grid_points: int) -> np.ndarray:
    """Distinct empirical quantiles of z between trim and 1 - trim; every candidate is an observed value."""
    probs = np.linspace(trim, 1 - trim, int(grid_points))
    return np.unique(np.quantile(z_lag, probs, method="inverted_cdf"))


def beta_grid(vector: CointVector, cfg: GridConfig) -> np.ndarray:
    if cfg.fix_beta or not vector.se:
        return np.array([vector.beta])
    half = cfg.beta_radius * vector.se
    return np.linspace(vector.beta - half, vector.beta + half, int(cfg.grid_points))


def select_candidate(candidates: Sequence[Candidate]) -> Candidate:
    """Highest score; within TIE_TOLERANCE the smallest tau, then the smallest beta."""
    best = max(c[0] for c in candidates)
    tied = [c for c in candidates if c[0] >= best - TIE_TOLERANCE]
    return min(tied, key=lambda c: (c[1], c[2]))


@dataclass(frozen=True, eq=False)
class RegimeSplit:
    a1: np.ndarray
    a2: np.ndarray
    residuals: np.ndarray
    indicator: np.ndarray
    counts: Tuple[int, int]


def split_fit(regressors: RegressorMatrix, responses: np.ndarray, tau: float,
              trim: float) -> Optional[RegimeSplit]:
    """
    Per-regime least squares at threshold tau, or None when the split is
    infeasible (trim violated or a populated regime is singular).

    An empty regime is allowed only with trim = 0; its coefficients are NaN.
    """
    x = regressors.x
    n, k = x.shape
    indicator = classify_regimes(regressors.z_lag, tau)
    n1 = int(np.count_nonzero(indicator == 1))
    counts = (n1, n - n1)
    if min(counts) < trim * n or (trim > 0 and min(counts) == 0):
        return None

    residuals = np.zeros_like(responses)
    coefficients = []
    for regime in (1, 2):
        mask = indicator == regime
        if not mask.any():
            coefficients.append(np.full((k, responses.shape[1]), np.nan))
            continue
        try:
            fit = least_squares(x[mask], responses[mask], regressors.columns)
        except SingularRegressorError as exc:
            logger.debug("Skipping tau=%g: regime %d singular (%s)", tau, regime, exc)
            return None
        residuals[mask] = fit.residuals
        coefficients.append(fit.params)
    return RegimeSplit(coefficients[0], coefficients[1], residuals, indicator, counts)


def _split_loglik(split: RegimeSplit) -> Optional[float]:
    try:
        return gaussian_loglik(residual_covariance(split.residuals), split.residuals.shape[0])
    except DegenerateRegressionError:
        return None


@dataclass(frozen=True, eq=False)
class TvecmFit:
    tau: float
    vector: CointVector
    a1: np.ndarray
    a2: np.ndarray
    se1: np.ndarray
    se2: np.ndarray
    residuals: np.ndarray
    sigma: np.ndarray
    regime_indicator: np.ndarray
    regime_counts: Tuple[int, int]
    loglik: float
    lags: int
    regressors: RegressorMatrix
    labels: Tuple[str, str] = ("US", "Target")
    candidates: int = 1
    feasible: int = 1

    @property
    def beta(self) -> float:
        return self.vector.beta

    @property
    def nobs(self) -> int:
        return self.residuals.shape[0]

    @property
    def regime_shares(self) -> Tuple[float, float]:
        n1, n2 = self.regime_counts
        return n1 / self.nobs, n2 / self.nobs

    def summary(self) -> Dict:
        """Threshold, regime sizes and the error-correction loadings per regime."""
        return {
            "tau": self.tau,
            "beta": self.beta,
            "lags": self.lags,
            "nobs": self.nobs,
            "loglik": self.loglik,
            "regime_counts": list(self.regime_counts),
            "regime_shares": [round(s, 6) for s in self.regime_shares],
            "adjustment": {
                "regime1": self.a1[1].tolist(),
                "regime2": self.a2[1].tolist(),
            },
            "grid": {"candidates": self.candidates, "feasible": self.feasible},
        }


def _regime_standard_errors(x: np.ndarray, residuals: np.ndarray,
                            indicator: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    out = []
    for regime in (1, 2):
        mask = indicator == regime
        if not mask.any():
            out.append(np.full((x.shape[1], residuals.shape[1]), np.nan))
            continue
        xr = x[mask]
        try:
            xtx_inv = np.linalg.inv(xr.T @ xr)
        except np.linalg.LinAlgError as exc:
            raise SingularRegressorError([], f"singular regressor block in regime {regime}") from exc
        out.append(white_standard_errors(xr, residuals[mask], xtx_inv))
    return out[0], out[1]


def eicker_white_se(fit: TvecmFit) -> Tuple[np.ndarray, np.ndarray]:
    """Sandwich standard errors per regime and equation."""
    return _regime_standard_errors(fit.regressors.x, fit.residuals, fit.regime_indicator)


def _build_fit(regressors: RegressorMatrix, responses: np.ndarray, vector: CointVector,
               tau: float, trim: float, labels: Tuple[str, str]) -> Optional[TvecmFit]:
    split = split_fit(regressors, responses, tau, trim)
    if split is None:
        return None
    loglik = _split_loglik(split)
    if loglik is None:
        return None
    se1, se2 = _regime_standard_errors(regressors.x, split.residuals, split.indicator)
    return TvecmFit(
        tau=float(tau),
        vector=vector,
        a1=split.a1,
        a2=split.a2,
        se1=se1,
        se2=se2,
        residuals=split.residuals,
        sigma=residual_covariance(split.residuals),
        regime_indicator=split.indicator,
        regime_counts=split.counts,
        loglik=loglik,
        lags=regressors.lags,
        regressors=regressors,
        labels=labels,
    )


def fit_tvecm_at(panel: Panel, q: int, beta: Union[CointVector, float], tau: float,
                 trim: float = DEFAULT_TRIM) -> Optional[TvecmFit]:
    """Fit at a fixed (beta, tau); None marks an infeasible point."""
    vector = as_vector(beta)
    regressors, responses = build_regressors(panel, q, vector.beta)
    return _build_fit(regressors, responses, vector, tau, trim, panel.labels)


def _score_beta(panel: Panel, q: int, cfg: GridConfig, beta: float) -> Tuple[List[Candidate], int]:
    regressors, responses = build_regressors(panel, q, beta)
    taus = threshold_grid(regressors.z_lag, cfg.trim, cfg.grid_points)
    scored = []
    for tau in taus:
        split = split_fit(regressors, responses, tau, cfg.trim)
        loglik = None if split is None else _split_loglik(split)
        if loglik is not None:
            scored.append((loglik, float(tau), float(beta)))
    return scored, len(taus)


def grid_search_tvecm(panel: Panel, q: int, eg: CointVector, cfg: GridConfig = GridConfig(),
                      workers: int = 1) -> TvecmFit:
    """
    Maximize the concentrated likelihood over the (beta, tau) grid.

    The tau grid is rebuilt from z_{t-1}(beta) for each beta. Candidates are
    collected from every worker before the tie-break, so the result does not
    depend on `workers`.
    """
    betas = beta_grid(eg, cfg)
    if workers > 1 and len(betas) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_score_beta, repeat(panel), repeat(q), repeat(cfg), betas))
    else:
        results = [_score_beta(panel, q, cfg, b) for b in betas]

    candidates = [c for scored, _ in results for c in scored]
    total = sum(count for _, count in results)
    if not candidates:
        raise InfeasibleGridError("trim infeasible for all candidates")
    _, tau, beta = select_candidate(candidates)
    logger.info("Grid search: %d of %d candidates feasible; tau=%.4f beta=%.4f",
                len(candidates), total, tau, beta)

    vector = eg if beta == eg.beta else replace(CointVector.at(panel, beta), se=eg.se)
    fit = fit_tvecm_at(panel, q, vector, tau, cfg.trim)
    return replace(fit, candidates=total, feasible=len(candidates))


def render_fit_table(fit: TvecmFit) -> List[Dict]:
    """
    Rows in the layout of a regime-coefficient table: per equation the
    error-correction term, the constant, then each lagged difference.
    """
    bench, target = fit.labels
    names = {0: "Constant", 1: "z_t"}
    for i in range(1, fit.lags + 1):
        names[2 * i] = f"d{bench}(-{i})"
        names[2 * i + 1] = f"d{target}(-{i})"
    order = [1, 0] + list(range(2, 2 + 2 * fit.lags))

    rows = []
    for eq, label in enumerate((bench, target)):
        for j in order:
            rows.append({
                "equation": f"Equation {eq + 1} (d{label})",
                "variable": names[j],
                "regime1": {"est": float(fit.a1[j, eq]), "se": float(fit.se1[j, eq])},
                "regime2": {"est": float(fit.a2[j, eq]), "se": float(fit.se2[j, eq])},
            })
    return rows
