import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import normal_equations, sandwich_loops
from errors import DegenerateRegressionError, SingularRegressorError
from regression import (
    collinear_columns,
    gaussian_loglik,
    least_squares,
    residual_covariance,
    white_covariance,
    white_standard_errors,
)


@pytest.fixture
def design(rng):
    n = 80
    x = np.column_stack([np.ones(n), rng.standard_normal((n, 3))])
    b = np.array([[1.0, -0.5], [0.3, 0.2], [-0.7, 0.0], [0.1, 1.1]])
    y = x @ b + rng.standard_normal((n, 2)) * (1 + np.abs(x[:, 1:2]))
    return x, y


def test_coefficients_match_normal_equations(design):
    x, y = design
    fit = least_squares(x, y)
    assert_allclose(fit.params, normal_equations(x, y), rtol=1e-10)
    assert_allclose(fit.xtx_inv, np.linalg.inv(x.T @ x), rtol=1e-10)


def test_residuals_orthogonal_to_regressors(design):
    x, y = design
    fit = least_squares(x, y)
    assert_allclose(x.T @ fit.residuals, 0.0, atol=1e-9)


def test_single_response_is_promoted_to_column(design):
    x, y = design
    fit = least_squares(x, y[:, 0])
    assert fit.params.shape == (4, 1)


def test_duplicate_column_is_named(design):
    x, y = design
    x = np.column_stack([x, x[:, 2]])
    with pytest.raises(SingularRegressorError) as info:
        least_squares(x, y, columns=["const", "a", "z", "b", "z2"])
    assert set(info.value.columns) & {"z", "z2"}
    assert collinear_columns(x, ["const", "a", "z", "b", "z2"]) in (["z"], ["z2"])


def test_fewer_rows_than_columns_is_singular():
    x = np.ones((2, 3))
    with pytest.raises(SingularRegressorError):
        least_squares(x, np.ones((2, 2)), columns=["a", "b", "c"])


def test_white_covariance_matches_loop_sandwich(design):
    x, y = design
    x, y = x[:25], y[:25]
    fit = least_squares(x, y)
    got = white_covariance(x, fit.residuals, fit.xtx_inv)
    assert_allclose(got, sandwich_loops(x, fit.residuals), rtol=1e-9, atol=1e-12)


def test_white_standard_errors_layout(design):
    x, y = design
    fit = least_squares(x, y)
    se = white_standard_errors(x, fit.residuals, fit.xtx_inv)
    cov = sandwich_loops(x, fit.residuals)
    k = x.shape[1]
    assert se.shape == (k, 2)
    assert_allclose(se[:, 1], np.sqrt(np.diag(cov)[k:]), rtol=1e-9)


def test_zero_residuals_give_zero_standard_errors(design):
    x, _ = design
    y = x @ np.array([[1.0, 2.0], [0.5, 0.0], [0.0, 1.0], [3.0, -1.0]])
    fit = least_squares(x, y)
    se = white_standard_errors(x, np.zeros_like(fit.residuals), fit.xtx_inv)
    assert np.all(se == 0.0)


def test_gaussian_loglik_formula(design):
    x, y = design
    fit = least_squares(x, y)
    sigma = residual_covariance(fit.residuals)
    n = len(y)
    assert_allclose(sigma, fit.residuals.T @ fit.residuals / n)
    expected = -n / 2 * (2 * np.log(2 * np.pi) + np.log(np.linalg.det(sigma)) + 2)
    assert_allclose(gaussian_loglik(sigma, n), expected, rtol=1e-12)


def test_gaussian_loglik_singular_sigma():
    with pytest.raises(DegenerateRegressionError, match="singular"):
        gaussian_loglik(np.array([[1.0, 1.0], [1.0, 1.0]]), 10)
