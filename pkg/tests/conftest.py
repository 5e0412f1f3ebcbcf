"""
Shared fixtures and brute-force oracles.

The oracles are written with explicit normal equations and loops so they do
not share code with the estimators under test.
"""
import numpy as np
import pytest

from data_loader import Panel
from samples import load_bundled

# Strongly separated regimes around tau = 0 with beta = 1
THRESHOLD_DGP = dict(
    beta=1.0,
    tau=0.0,
    a1=[[1.0, -1.0], [-0.3, 0.3]],
    a2=[[-1.0, 1.0], [-0.05, 0.05]],
    noise_cov=[[1.0, 0.5], [0.5, 1.0]],
    labels=("US", "Mex"),
)


def normal_equations(x, y):
    """(X'X)^{-1} X'y by a direct solve."""
    return np.linalg.solve(x.T @ x, x.T @ y)


def ols_tratio(x, y, j):
    """Classical t-ratio of coefficient j with s^2 = e'e / (n - k)."""
    b = normal_equations(x, y)
    e = y - x @ b
    n, k = x.shape
    s2 = e @ e / (n - k)
    cov = s2 * np.linalg.inv(x.T @ x)
    return b[j] / np.sqrt(cov[j, j])


def sandwich_loops(x, e):
    """
    Eicker-White covariance of vec(B) built entry by entry:
    (I kron A) M (I kron A) with M[(i,a),(j,b)] = sum_t e_ti e_tj x_ta x_tb.
    """
    n, k = x.shape
    m = e.shape[1]
    a = np.linalg.inv(x.T @ x)
    meat = np.zeros((m * k, m * k))
    for t in range(n):
        for i in range(m):
            for ai in range(k):
                for j in range(m):
                    for bj in range(k):
                        meat[i * k + ai, j * k + bj] += e[t, i] * e[t, j] * x[t, ai] * x[t, bj]
    bread = np.zeros((m * k, m * k))
    for i in range(m):
        bread[i * k:(i + 1) * k, i * k:(i + 1) * k] = a
    return bread @ meat @ bread


def random_walk(rng, n, drift=0.0):
    return np.cumsum(drift + rng.standard_normal(n))


def ar1(rng, n, rho, start=0.0):
    y = np.empty(n)
    prev = start
    for t in range(n):
        prev = rho * prev + rng.standard_normal()
        y[t] = prev
    return y


def cointegrated_panel(rng, n=300, slope=2.0, rho=0.5):
    """target = slope * benchmark + AR(1) noise."""
    bench = 100 + random_walk(rng, n)
    target = slope * bench + ar1(rng, n, rho)
    return Panel.from_arrays(bench, target, labels=("US", "Mex"))


@pytest.fixture
def rng():
    return np.random.default_rng(20050831)


@pytest.fixture(scope="session")
def mexico_panel():
    return load_bundled("mexico-like")


@pytest.fixture(scope="session")
def linear_panel():
    return load_bundled("linear-cointegrated")


@pytest.fixture
def write_csv(tmp_path):
    def _write(text, name="prices.csv"):
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write
