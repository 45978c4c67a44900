#!/usr/bin/env python3
"""
Tests for the Bartlett long-run covariance and the FMOLS / CCR estimators
"""
import numpy as np
import pytest

from econometrics.cointreg import ccr, fmols, long_run_cov
from econometrics.exceptions import DataValidationError, SampleTooShortError, SingularCovarianceError
from econometrics.linreg import ols
from models.schemas import CointMethod, HacOptions, LongRunCov

ESTIMATORS = [fmols, ccr]


def _system(rng, n=200, betas=(2.0,), endogeneity=0.5):
    """Random-walk regressors, stationary errors correlated with their innovations"""
    shocks = rng.standard_normal((n, len(betas)))
    x = np.cumsum(shocks, axis=0)
    u = rng.standard_normal(n) + endogeneity * shocks[:, 0]
    y = 1.0 + x @ np.asarray(betas) + u
    return y, x


def test_long_run_variance_hand_value():
    lrc = long_run_cov([1.0, -1.0, 1.0, -1.0], opts=1)
    assert lrc.omega_11 == pytest.approx(0.25)
    assert lrc.lambda_[0, 0] == pytest.approx(0.625)
    assert lrc.sigma[0, 0] == pytest.approx(1.0)
    assert lrc.bandwidth == 1


def test_orthogonal_series_have_zero_cross_terms():
    lrc = long_run_cov([1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0], HacOptions(bandwidth=0))
    assert lrc.omega_12.item() == pytest.approx(0.0)
    assert lrc.lambda_12.item() == pytest.approx(0.0)
    np.testing.assert_allclose(lrc.lambda_, lrc.sigma)


def test_long_run_covariance_is_positive_semidefinite():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        eta = rng.standard_normal((50, 3))
        eta[:, 1] += 0.7 * np.r_[0.0, eta[:-1, 0]]
        lrc = long_run_cov(eta[:, 0], eta[:, 1:], opts=3)
        np.testing.assert_allclose(lrc.omega, lrc.omega.T, atol=1e-12)
        assert np.linalg.eigvalsh(lrc.omega).min() >= -1e-10


def test_long_run_covariance_input_errors():
    with pytest.raises(DataValidationError):
        long_run_cov([1.0], opts=0)
    with pytest.raises(DataValidationError):
        long_run_cov([1.0, 2.0, 3.0], [1.0, 2.0])


@pytest.mark.parametrize("estimator", ESTIMATORS)
def test_exact_static_relation_is_degenerate(estimator):
    x = np.cumsum(np.random.default_rng(61).standard_normal(30))
    fit = estimator(1.0 + 2.0 * x, x, names=("x",))
    assert fit.degenerate
    assert fit.names == ("x", "C")
    np.testing.assert_allclose(fit.coefficients, [2.0, 1.0], atol=1e-8)
    assert np.all(fit.std_errors == 0)
    assert np.all(np.isnan(fit.t_stats))
    assert fit.warnings


@pytest.mark.parametrize("estimator", ESTIMATORS)
def test_no_endogeneity_no_serial_correlation_reduces_to_ols(estimator):
    """Injected covariances without cross terms leave the static regression on observations 2..T"""
    rng = np.random.default_rng(62)
    y, x = _system(rng, 80, betas=(2.0, -1.0))
    lrc = LongRunCov(omega=np.eye(3), lambda_=np.zeros((3, 3)), sigma=np.eye(3), bandwidth=0)
    fit = estimator(y, x, names=("a", "b"), lrc=lrc)
    reference = ols(y[1:], np.column_stack([x[1:], np.ones(79)]))
    np.testing.assert_allclose(fit.coefficients, reference.coefficients, rtol=1e-8, atol=1e-10)
    assert fit.n_obs == 79


@pytest.mark.parametrize("estimator", ESTIMATORS)
def test_regressor_order_does_not_matter(estimator):
    rng = np.random.default_rng(63)
    y, x = _system(rng, 120, betas=(2.0, -1.0))
    forward = estimator(y, x, names=("a", "b"))
    backward = estimator(y, x[:, ::-1], names=("b", "a"))
    for name in ("a", "b", "C"):
        assert backward.coef(name) == pytest.approx(forward.coef(name), rel=1e-8)
    assert forward.omega_112 == pytest.approx(backward.omega_112, rel=1e-8)


@pytest.mark.parametrize("estimator", ESTIMATORS)
def test_df_adjustment_scales_conditional_variance(estimator):
    rng = np.random.default_rng(64)
    y, x = _system(rng, 60)
    plain = estimator(y, x, opts=2)
    adjusted = estimator(y, x, opts=2, df_adjust=True)
    np.testing.assert_allclose(adjusted.coefficients, plain.coefficients)
    assert adjusted.omega_112 == pytest.approx(plain.omega_112 * 59 / 57)
    assert adjusted.bandwidth == plain.bandwidth == 2


@pytest.mark.parametrize("estimator", ESTIMATORS)
def test_slope_is_consistent_under_endogeneity(estimator):
    rng = np.random.default_rng(65)
    slopes = []
    for _ in range(200):
        y, x = _system(rng, 200)
        fit = estimator(y, x)
        assert not fit.degenerate
        assert fit.std_errors[0] > 0
        slopes.append(fit.coefficients[0])
    assert np.mean(slopes) == pytest.approx(2.0, abs=0.02)
    assert np.std(slopes) < 0.05


def test_fmols_and_ccr_agree_around_the_true_slope():
    rng = np.random.default_rng(68)
    fmols_slopes, ccr_slopes = [], []
    for _ in range(500):
        y, x = _system(rng, 200)
        fmols_slopes.append(fmols(y, x).coefficients[0])
        ccr_slopes.append(ccr(y, x).coefficients[0])
    fmols_slopes, ccr_slopes = np.array(fmols_slopes), np.array(ccr_slopes)
    assert np.median(fmols_slopes) == pytest.approx(2.0, abs=0.05)
    assert np.median(ccr_slopes) == pytest.approx(2.0, abs=0.05)
    assert np.max(np.abs(fmols_slopes - ccr_slopes)) < 0.1


def test_methods_are_labelled():
    rng = np.random.default_rng(66)
    y, x = _system(rng, 50)
    assert fmols(y, x).method == CointMethod.FMOLS
    assert ccr(y, x).method == CointMethod.CCR
    assert fmols(y, x).bandwidth == HacOptions().resolve(49)


@pytest.mark.parametrize("estimator", ESTIMATORS)
def test_input_errors(estimator):
    with pytest.raises(SampleTooShortError):
        estimator(np.arange(3.0), np.arange(3.0) ** 2)
    rng = np.random.default_rng(67)
    y, x = _system(rng, 30)
    with pytest.raises(DataValidationError):
        estimator(y, x, names=("a", "b"))
    singular = LongRunCov(omega=np.zeros((2, 2)), lambda_=np.zeros((2, 2)), sigma=np.eye(2), bandwidth=0)
    with pytest.raises(SingularCovarianceError):
        estimator(y, x, lrc=singular)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
