import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from errors import ConfigError, DataError
from samples import bundled_spec, list_bundled, load_bundled
from simulator import (
    DgpSpec,
    draw_innovations,
    propagate,
    simulate_linear_vecm,
    simulate_tvecm,
)

A_LINEAR = [[0.5, 0.5], [-0.1, 0.15], [0.1, 0.2], [0.0, 0.1]]
COV = [[1.0, 0.3], [0.3, 1.0]]


def _spec(**overrides):
    data = dict(beta=1.0, tau=0.0, a1=A_LINEAR, a2=A_LINEAR, noise_cov=COV, n_obs=100, seed=7)
    data.update(overrides)
    return DgpSpec(**data)


def test_same_seed_same_panel():
    assert simulate_tvecm(_spec()) == simulate_tvecm(_spec())
    assert simulate_tvecm(_spec()) != simulate_tvecm(_spec(seed=8))


def test_equal_regimes_match_linear_simulator_bit_for_bit():
    threshold = simulate_tvecm(_spec(tau=-3.0, labels=("US", "Bra")))
    linear = simulate_linear_vecm(A_LINEAR, 1.0, COV, 100, seed=7, labels=("US", "Bra"))
    assert_array_equal(threshold.levels, linear.levels)


def test_panel_shape_and_dates():
    panel = simulate_tvecm(_spec(n_obs=248, labels=("US", "Mex")))
    assert len(panel) == 248
    assert panel.labels == ("US", "Mex")
    assert panel.timestamps[-1] == "2005-08"


def test_invalid_specs():
    with pytest.raises(ConfigError, match="positive definite"):
        _spec(noise_cov=[[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ConfigError, match=">= 20"):
        _spec(n_obs=19)
    with pytest.raises(ConfigError, match="differ in shape"):
        _spec(a2=[[0.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ConfigError, match="2 \\+ 2q"):
        _spec(a1=[[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]], a2=[[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ConfigError, match="finite"):
        _spec(tau=float("nan"))


def test_from_dict_defaults_and_unknown_keys():
    data = dict(beta=1.0, tau=0.0, a1=A_LINEAR, noise_cov=COV, n_obs=50)
    spec = DgpSpec.from_dict(data)
    assert_array_equal(spec.a1, spec.a2)
    assert spec.lags == 1
    with pytest.raises(ConfigError, match="unknown DGP field"):
        DgpSpec.from_dict({**data, "gamma": 2.0})
    with pytest.raises(ConfigError, match="missing"):
        DgpSpec.from_dict({"beta": 1.0})


def test_to_dict_round_trip():
    spec = _spec()
    again = DgpSpec.from_dict(spec.to_dict())
    assert simulate_tvecm(again) == simulate_tvecm(spec)


def test_from_json_missing_file(tmp_path):
    with pytest.raises(DataError, match="not found"):
        DgpSpec.from_json(tmp_path / "none.json")


def test_propagate_switches_regime_on_lagged_z():
    a1 = np.array([[1.0, 0.0], [0.0, 0.0]])
    a2 = np.array([[-1.0, 0.0], [0.0, 0.0]])
    levels = propagate(a1, a2, 1.0, 0.0, np.zeros((1, 2)), np.zeros((2, 2)))
    assert_array_equal(levels, [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]])


def test_propagate_treats_z_at_tau_as_regime_one():
    a1 = np.array([[2.0, 0.0], [0.0, 0.0]])
    a2 = np.array([[5.0, 0.0], [0.0, 0.0]])
    levels = propagate(a1, a2, 0.0, 3.0, np.array([[3.0, 1.0]]), np.zeros((1, 2)))
    assert_array_equal(levels[-1], [5.0, 1.0])


def test_propagate_keeps_initial_rows():
    initial = np.array([[1.0, 2.0], [1.5, 2.5], [2.0, 2.0]])
    levels = propagate(np.array(A_LINEAR), np.array(A_LINEAR), 1.0, 0.0, initial, np.zeros((4, 2)))
    assert levels.shape == (7, 2)
    assert_array_equal(levels[:3], initial)


def test_draw_innovations_covariance():
    rng = np.random.default_rng(1)
    cov = np.array([[2.0, 0.6], [0.6, 1.0]])
    e = draw_innovations(rng, cov, 200_000)
    assert_allclose(np.cov(e.T), cov, atol=0.03)


def _z_variance(n_obs):
    a = [[0.0, 0.0], [-0.3, 0.2]]
    panel = simulate_linear_vecm(a, 1.0, np.eye(2), n_obs, seed=11)
    z = panel.benchmark.values - panel.target.values
    return z.var()


def test_error_correction_term_is_ar1():
    # z_t = 0.5 z_{t-1} + (e1 - e2), so var(z) = 2 / 0.75
    assert abs(_z_variance(2000) - 2 / 0.75) < 0.2 * 2 / 0.75


@pytest.mark.slow
def test_error_correction_term_variance_long_run():
    assert abs(_z_variance(1_000_000) - 2 / 0.75) < 0.01 * 2 / 0.75


def test_bundled_datasets():
    names = {d["name"] for d in list_bundled()}
    assert {"mexico-like", "linear-cointegrated"} <= names
    assert bundled_spec("mexico-like").lags == 1
    assert load_bundled("mexico-like") == load_bundled("mexico-like")
    assert load_bundled("mexico-like", seed=1) != load_bundled("mexico-like")
    with pytest.raises(DataError, match="unknown bundled dataset"):
        bundled_spec("atlantis")
