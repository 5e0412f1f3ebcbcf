"""
Synthetic panels from a two-regime threshold VECM.

The recursion in `propagate` is shared by the simulator and the Sup-LM
bootstrap, so a one-regime run and a two-regime run with equal coefficient
matrices follow the same arithmetic.
"""
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from config import DEFAULT_BURN_IN, DEFAULT_START, MIN_SIM_LENGTH
from data_loader import Panel
from errors import ConfigError, DataError

logger = logging.getLogger(__name__)


def _matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2 or not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} must be a finite 2-D matrix")
    arr.setflags(write=False)
    return arr


def lag_order(a: np.ndarray) -> int:
    """Lag order q implied by a (2 + 2q) x 2 coefficient matrix."""
    rows, cols = a.shape
    if cols != 2 or rows < 2 or rows % 2:
        raise ConfigError(f"coefficient matrix must be (2 + 2q) x 2, got {rows} x {cols}")
    return (rows - 2) // 2


@dataclass(frozen=True, eq=False)
class DgpSpec:
    """
    Threshold VECM data-generating process.

    Coefficient matrices use the regressor layout (1, z_{t-1}, dX_{t-1}, ...,
    dX_{t-q}) by rows and (benchmark, target) by columns. Regime 1 applies
    when z_{t-1} <= tau.
    """

    beta: float
    tau: float
    a1: np.ndarray
    a2: np.ndarray
    noise_cov: np.ndarray
    n_obs: int
    burn_in: int = DEFAULT_BURN_IN
    seed: int = 0
    labels: Tuple[str, str] = ("US", "Target")
    start: str = DEFAULT_START
    description: str = field(default="", compare=False)

    def __post_init__(self):
        a1 = _matrix(self.a1, "a1")
        a2 = _matrix(self.a2, "a2")
        if a1.shape != a2.shape:
            raise ConfigError(f"a1 and a2 differ in shape: {a1.shape} vs {a2.shape}")
        lag_order(a1)
        cov = _matrix(self.noise_cov, "noise_cov")
        if cov.shape != (2, 2) or not np.allclose(cov, cov.T):
            raise ConfigError("noise covariance must be a symmetric 2 x 2 matrix")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ConfigError("noise covariance must be positive definite") from exc
        if not (np.isfinite(self.beta) and np.isfinite(self.tau)):
            raise ConfigError("beta and tau must be finite")
        if int(self.n_obs) < MIN_SIM_LENGTH:
            raise ConfigError(f"sample length must be >= {MIN_SIM_LENGTH}, got {self.n_obs}")
        if int(self.burn_in) < 0:
            raise ConfigError(f"burn-in must be >= 0, got {self.burn_in}")
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "noise_cov", cov)
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "n_obs", int(self.n_obs))
        object.__setattr__(self, "burn_in", int(self.burn_in))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def lags(self) -> int:
        return lag_order(self.a1)

    @classmethod
    def from_dict(cls, data: dict) -> "DgpSpec":
        known = {"beta", "tau", "a1", "a2", "noise_cov", "n_obs", "burn_in", "seed",
                 "labels", "start", "description"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown DGP field(s): {', '.join(sorted(unknown))}")
        missing = {"beta", "tau", "a1", "noise_cov", "n_obs"} - set(data)
        if missing:
            raise ConfigError(f"DGP spec is missing: {', '.join(sorted(missing))}")
        data = dict(data)
        data.setdefault("a2", data["a1"])
        return cls(**data)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "DgpSpec":
        path = Path(path)
        try:
            with open(path) as f:
                data = json.load(f)
        except FileNotFoundError as exc:
            raise DataError(f"DGP spec not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid DGP spec {path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "tau": self.tau,
            "a1": self.a1.tolist(),
            "a2": self.a2.tolist(),
            "noise_cov": self.noise_cov.tolist(),
            "n_obs": self.n_obs,
            "burn_in": self.burn_in,
            "seed": self.seed,
            "labels": list(self.labels),
            "start": self.start,
            "description": self.description,
        }

    def with_overrides(self, **changes) -> "DgpSpec":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)


def propagate(a1: np.ndarray, a2: np.ndarray, beta: float, tau: float,
              initial: np.ndarray, innovations: np.ndarray) -> np.ndarray:
    """
    Run the threshold VECM forward from the `initial` levels.

    Returns the initial rows followed by one new row per innovation. Lagged
    differences dated before the first observation are taken as zero.
    """
    q = lag_order(a1)
    initial = np.atleast_2d(np.asarray(initial, dtype=float))
    m, n = initial.shape[0], innovations.shape[0]

    levels = np.empty((m + n, 2))
    levels[:m] = initial
    diffs = np.zeros((m + n, 2))  # diffs[t] = X_t - X_{t-1}
    diffs[1:m] = np.diff(initial, axis=0)

    reg = np.zeros(2 + 2 * q)
    reg[0] = 1.0
    for t in range(m, m + n):
        prev = levels[t - 1]
        z = prev[0] - beta * prev[1]
        reg[1] = z
        for i in range(1, q + 1):
            j = t - i
            reg[2 * i:2 * i + 2] = diffs[j] if j >= 0 else 0.0
        step = reg @ (a1 if z <= tau else a2) + innovations[t - m]
        diffs[t] = step
        levels[t] = prev + step
    return levels


def draw_innovations(rng: np.random.Generator, noise_cov: np.ndarray, n: int) -> np.ndarray:
    """Gaussian innovations with covariance `noise_cov`."""
    chol = np.linalg.cholesky(noise_cov)
    return rng.standard_normal((n, 2)) @ chol.T


def simulate_tvecm(spec: DgpSpec) -> Panel:
    """Simulate `spec.n_obs` observations after discarding `spec.burn_in` steps from X_0 = (0, 0)."""
    rng = np.random.default_rng(spec.seed)
    total = spec.burn_in + spec.n_obs
    shocks = draw_innovations(rng, spec.noise_cov, total - 1)
    levels = propagate(spec.a1, spec.a2, spec.beta, spec.tau, np.zeros((1, 2)), shocks)
    kept = levels[spec.burn_in:]
    logger.debug("Simulated %d observations (seed %d, burn-in %d)", len(kept), spec.seed, spec.burn_in)
    return Panel.from_arrays(kept[:, 0], kept[:, 1], labels=spec.labels, start=spec.start)


def simulate_linear_vecm(a: np.ndarray, beta: float, noise_cov: np.ndarray, n_obs: int,
                         burn_in: int = DEFAULT_BURN_IN, seed: int = 0,
                         labels: Tuple[str, str] = ("US", "Target"),
                         start: str = DEFAULT_START) -> Panel:
    """One-regime VECM; the same path simulate_tvecm gives with a1 = a2 = a."""
    a = _matrix(a, "a")
    noise_cov = _matrix(noise_cov, "noise_cov")
    if n_obs < MIN_SIM_LENGTH:
        raise ConfigError(f"sample length must be >= {MIN_SIM_LENGTH}, got {n_obs}")
    rng = np.random.default_rng(seed)
    try:
        shocks = draw_innovations(rng, noise_cov, burn_in + n_obs - 1)
    except np.linalg.LinAlgError as exc:
        raise ConfigError("noise covariance must be positive definite") from exc
    levels = propagate(a, a, beta, np.inf, np.zeros((1, 2)), shocks)[burn_in:]
    return Panel.from_arrays(levels[:, 0], levels[:, 1], labels=labels, start=start)


def simulate_from_fit(coefficients: np.ndarray, beta: float, initial: np.ndarray,
                      shocks: np.ndarray, timestamps: Tuple[str, ...],
                      labels: Tuple[str, str]) -> Panel:
    """Panel continuing from observed `initial` levels under one set of fitted coefficients."""
    levels = propagate(coefficients, coefficients, beta, np.inf, initial, shocks)
    return Panel.from_arrays(levels[:, 0], levels[:, 1], timestamps=timestamps, labels=labels)
