"""
Least-squares helpers shared by the VECM, threshold and Sup-LM estimators.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg

from errors import DegenerateRegressionError, SingularRegressorError

logger = logging.getLogger(__name__)

# Relative size of the smallest pivot in a pivoted QR below which a column is
# treated as a linear combination of the others.
RANK_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class LeastSquares:
    params: np.ndarray      # k x m
    residuals: np.ndarray   # n x m
    xtx_inv: np.ndarray     # k x k

    @property
    def nobs(self) -> int:
        return self.residuals.shape[0]


def collinear_columns(x: np.ndarray, columns: Optional[Sequence[str]] = None) -> List[str]:
    """Columns a pivoted QR finds to be dependent on the remaining ones."""
    n, k = x.shape
    columns = list(columns) if columns is not None else [f"x{j}" for j in range(k)]
    if n == 0:
        return columns
    _, r, perm = linalg.qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0:
        return columns
    rank = int(np.sum(diag > RANK_TOLERANCE * diag[0]))
    return [columns[j] for j in sorted(perm[rank:])]


def least_squares(x: np.ndarray, y: np.ndarray,
                  columns: Optional[Sequence[str]] = None) -> LeastSquares:
    """
    Equation-by-equation least squares of every column of `y` on `x`.

    Raises SingularRegressorError naming the collinear columns when x'x is
    singular, including when there are fewer rows than columns.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    n, k = x.shape
    dependent = collinear_columns(x, columns) if n >= k else []
    if n < k or dependent:
        raise SingularRegressorError(dependent or list(columns or []))

    params, _, _, _ = np.linalg.lstsq(x, y, rcond=None)
    residuals = y - x @ params
    xtx_inv = np.linalg.inv(x.T @ x)
    return LeastSquares(params, residuals, xtx_inv)


def residual_covariance(residuals: np.ndarray) -> np.ndarray:
    """(1/n) e'e, the maximum-likelihood innovation covariance."""
    return residuals.T @ residuals / residuals.shape[0]


def gaussian_loglik(sigma: np.ndarray, nobs: int) -> float:
    """Concentrated Gaussian log-likelihood -(n/2)(m ln 2pi + ln det sigma + m)."""
    m = sigma.shape[0]
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0 or not np.isfinite(logdet):
        raise DegenerateRegressionError("residual covariance is singular")
    return -0.5 * nobs * (m * np.log(2 * np.pi) + logdet + m)


def white_covariance(x: np.ndarray, residuals: np.ndarray, xtx_inv: np.ndarray) -> np.ndarray:
    """
    Eicker-White covariance of vec(B), B the k x m coefficient matrix.

    vec stacks equations: the first k entries belong to equation 1. Cross
    equation blocks use e_ti e_tj x_t x_t'.
    """
    n, k = x.shape
    m = residuals.shape[1]
    scores = (residuals[:, :, None] * x[:, None, :]).reshape(n, m * k)
    meat = scores.T @ scores
    bread = np.kron(np.eye(m), xtx_inv)
    return bread @ meat @ bread


def white_standard_errors(x: np.ndarray, residuals: np.ndarray, xtx_inv: np.ndarray) -> np.ndarray:
    """k x m heteroskedasticity-robust standard errors."""
    k = x.shape[1]
    m = residuals.shape[1]
    var = np.diag(white_covariance(x, residuals, xtx_inv))
    return np.sqrt(np.clip(var, 0.0, None)).reshape(m, k).T
