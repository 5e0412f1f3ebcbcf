import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import ar1, ols_tratio, random_walk
from critical_values import df_critical_values, dfgls_critical_values
from data_loader import Series
from errors import ConfigError, DataError
from unitroot import (
    adf_test,
    dfgls_test,
    integration_order,
    long_run_variance,
    newey_west_bandwidth,
    pp_test,
    quasi_difference,
    run_battery,
    schwert_max_lag,
)


@pytest.mark.parametrize("nobs,expected", [(100, 12), (250, 15), (16, 7)])
def test_schwert_max_lag(nobs, expected):
    assert schwert_max_lag(nobs) == expected


def test_schwert_max_lag_short_sample():
    with pytest.raises(DataError):
        schwert_max_lag(15)


@pytest.mark.parametrize("nobs,expected", [(100, 4), (200, 4), (500, 5)])
def test_newey_west_bandwidth(nobs, expected):
    assert newey_west_bandwidth(nobs) == expected


def test_constant_input_is_rejected():
    with pytest.raises(DataError, match="zero-variance input"):
        adf_test(np.full(50, 3.0))


def test_adf_matches_ols_oracle_with_constant(rng):
    y = random_walk(rng, 120)
    n = len(y)
    rows = range(2, n)
    x = np.array([[1.0, y[t - 1], y[t - 1] - y[t - 2]] for t in rows])
    dy = np.array([y[t] - y[t - 1] for t in rows])
    result = adf_test(y, lags=1, deterministic="c")
    assert_allclose(result.statistic, ols_tratio(x, dy, 1), rtol=1e-8)
    assert result.nobs == n - 2
    assert result.lags == 1


def test_adf_matches_ols_oracle_with_trend(rng):
    y = random_walk(rng, 120, drift=0.2)
    n = len(y)
    rows = range(1, n)
    x = np.array([[1.0, float(t), y[t - 1]] for t in rows])
    dy = np.array([y[t] - y[t - 1] for t in rows])
    result = adf_test(y, lags=0, deterministic="ct")
    assert_allclose(result.statistic, ols_tratio(x, dy, 2), rtol=1e-8)


def test_adf_short_sample(rng):
    with pytest.raises(DataError, match="at least 14"):
        adf_test(random_walk(rng, 12), lags=4)


def test_adf_invalid_options(rng):
    y = random_walk(rng, 60)
    with pytest.raises(ConfigError):
        adf_test(y, deterministic="quadratic")
    with pytest.raises(ConfigError):
        adf_test(y, criterion="hqic")
    with pytest.raises(ConfigError):
        dfgls_test(y, deterministic="n")


def test_pp_without_correction_equals_adf(rng):
    y = random_walk(rng, 150)
    assert_allclose(pp_test(y, bandwidth=0).statistic, adf_test(y, lags=0).statistic, rtol=1e-12)


def test_long_run_variance_oracle(rng):
    e = rng.standard_normal(201)
    y = np.cumsum(e[1:] + 0.6 * e[:-1])
    u = np.diff(y)
    bandwidth = 4
    n = len(u)
    expected = sum(u[t] ** 2 for t in range(n)) / n
    for j in range(1, bandwidth + 1):
        gamma = sum(u[t] * u[t - j] for t in range(j, n)) / n
        expected += 2 * (1 - j / (bandwidth + 1)) * gamma
    assert_allclose(long_run_variance(u, bandwidth), expected, rtol=1e-12)
    # positively autocorrelated increments
    assert long_run_variance(u, bandwidth) > long_run_variance(u, 0)


def test_quasi_difference_oracle():
    v = np.array([2.0, 3.0, 5.0, 4.0])
    assert_allclose(quasi_difference(v, 0.5), [2.0, 2.0, 3.5, 1.5])


def test_dfgls_without_local_alternative_is_adf_on_demeaned_start(rng):
    y = random_walk(rng, 150)
    result = dfgls_test(y, deterministic="c", lags=2, cbar=0.0)
    expected = adf_test(y - y[0], lags=2, deterministic="n")
    assert_allclose(result.statistic, expected.statistic, rtol=1e-9)


@pytest.mark.parametrize("test", [adf_test, pp_test, dfgls_test])
def test_statistics_are_scale_invariant(rng, test):
    y = random_walk(rng, 200)
    kwargs = {} if test is pp_test else {"lags": 2}
    assert_allclose(test(7.3 * y, **kwargs).statistic, test(y, **kwargs).statistic, rtol=1e-10)


def test_critical_values_ordered_and_decisions_consistent(rng):
    for result in run_battery(ar1(rng, 200, 0.5)).values():
        cv = result.critical_values
        assert cv["1%"] < cv["5%"] < cv["10%"]
        for level, rejected in result.decisions.items():
            assert rejected == (result.statistic < cv[level])


def test_dfgls_critical_values():
    assert dfgls_critical_values("c", 200) == df_critical_values("n", 200)
    trend = dfgls_critical_values("ct", 100)
    assert_allclose([trend["1%"], trend["5%"], trend["10%"]], [-3.58, -3.03, -2.74])
    mid = dfgls_critical_values("ct", 150)["5%"]
    assert -3.03 < mid < -2.93


def test_random_walk_is_integrated_of_order_one(rng):
    result = integration_order(Series(random_walk(rng, 300), "US"))
    assert result.order == "I(1)"
    assert result.integrated
    assert set(result.to_dict()["levels"]) == {"ADF", "PP", "DF-GLS"}


def test_white_noise_is_stationary(rng):
    assert integration_order(Series(rng.standard_normal(300), "Mex")).order == "I(0)"


def test_double_integration_is_flagged(rng):
    y = np.cumsum(random_walk(rng, 300))
    assert integration_order(Series(y, "Chi")).order == "I(2)?"


@pytest.mark.slow
def test_adf_size_on_random_walks():
    rng = np.random.default_rng(1)
    accepted = sum(not adf_test(random_walk(rng, 200), lags=0).rejects("5%") for _ in range(1000))
    assert 0.92 <= accepted / 1000 <= 0.98


@pytest.mark.slow
@pytest.mark.parametrize("rho", [0.95, 0.8])
def test_dfgls_is_more_powerful_than_adf(rho):
    rng = np.random.default_rng(2)
    adf = dfgls = 0
    for _ in range(300):
        y = 10 + ar1(rng, 200, rho)
        adf += adf_test(y, lags=0).rejects("5%")
        dfgls += dfgls_test(y, lags=0).rejects("5%")
    assert dfgls >= adf
    if rho == 0.95:
        assert dfgls > adf
