#!/usr/bin/env python3
"""
Tests for residual diagnostics and recursive stability paths
"""
import math

import numpy as np
import pytest

from econometrics.diagnostics import (
    EDGERTON_WELLS,
    bg_lm,
    cusum,
    cusumsq,
    durbin_c0,
    het_test,
    jarque_bera,
    ramsey_reset,
    recursive_residuals,
)
from econometrics.exceptions import (
    CriticalValueError,
    DataValidationError,
    DegenerateFitError,
    SampleTooShortError,
)
from econometrics.linreg import ols
from models.schemas import StabilityVerdict


def _regression(rng, n=100, errors=None):
    x = rng.standard_normal(n)
    X = np.column_stack([np.ones(n), x])
    e = rng.standard_normal(n) if errors is None else errors
    return 1.0 + 0.5 * x + e, X


def test_jarque_bera_hand_value():
    result = jarque_bera([1.0, -1.0, 1.0, -1.0])
    assert result.statistic == pytest.approx(2.0 / 3.0)
    assert result.df == (2,)
    assert result.p_value == pytest.approx(math.exp(-1.0 / 3.0))


def test_jarque_bera_detects_skewed_residuals():
    e = np.random.default_rng(41).exponential(size=500)
    assert jarque_bera(e).p_value < 0.001


def test_jarque_bera_ignores_scale():
    e = np.random.default_rng(54).standard_t(5, size=80)
    base = jarque_bera(e)
    for c in (0.01, 3.0, 250.0):
        assert jarque_bera(c * e).statistic == pytest.approx(base.statistic, rel=1e-10)


def test_jarque_bera_accepts_large_normal_samples():
    rng = np.random.default_rng(55)
    accepted = sum(jarque_bera(rng.standard_normal(10_000)).p_value > 0.01 for _ in range(100))
    assert accepted >= 95


def test_jarque_bera_input_errors():
    with pytest.raises(SampleTooShortError):
        jarque_bera([1.0, 2.0, 3.0])
    with pytest.raises(DegenerateFitError):
        jarque_bera([2.0] * 10)


def test_breusch_godfrey_detects_autocorrelation():
    rng = np.random.default_rng(42)
    n = 200
    e = np.zeros(n)
    shocks = rng.standard_normal(n)
    for t in range(1, n):
        e[t] = 0.8 * e[t - 1] + shocks[t]
    y, X = _regression(rng, n, e)
    result = bg_lm(ols(y, X), lags=2)
    assert result.df == (2,)
    assert result.p_value < 0.01


def test_breusch_godfrey_power():
    rng = np.random.default_rng(57)
    rejections = 0
    for _ in range(200):
        shocks = rng.standard_normal(100)
        e = np.zeros(100)
        for t in range(1, 100):
            e[t] = 0.8 * e[t - 1] + shocks[t]
        rejections += bg_lm(ols(*_regression(rng, 100, e)), lags=2).p_value < 0.05
    assert rejections / 200 >= 0.90


def test_breusch_godfrey_size():
    rng = np.random.default_rng(43)
    rejections = 0
    for _ in range(300):
        y, X = _regression(rng)
        rejections += bg_lm(ols(y, X), lags=2).p_value < 0.05
    assert 0.01 <= rejections / 300 <= 0.10


def test_heteroskedasticity_is_detected():
    rng = np.random.default_rng(44)
    n = 200
    x = rng.standard_normal(n)
    X = np.column_stack([np.ones(n), x])
    y = 1.0 + x + (0.2 + 2.0 * np.abs(x)) * rng.standard_normal(n)
    result = het_test(ols(y, X))
    assert result.df == (1,)
    assert result.p_value < 0.01


def test_heteroskedasticity_size():
    rng = np.random.default_rng(56)
    rejections = sum(het_test(ols(*_regression(rng))).p_value < 0.05 for _ in range(500))
    assert 0.02 <= rejections / 500 <= 0.09


def test_heteroskedasticity_needs_a_regressor():
    rng = np.random.default_rng(45)
    fit = ols(rng.standard_normal(20), np.ones((20, 1)))
    with pytest.raises(DataValidationError):
        het_test(fit)


def test_reset_detects_omitted_curvature():
    rng = np.random.default_rng(46)
    n = 100
    x = rng.uniform(0, 3, n)
    X = np.column_stack([np.ones(n), x])
    y = 1.0 + x ** 2 + 0.3 * rng.standard_normal(n)
    result = ramsey_reset(ols(y, X), powers=(2,))
    assert result.distribution == "f"
    assert result.df == (1, n - 3)
    assert result.p_value < 0.001


def test_reset_power_against_curvature():
    rng = np.random.default_rng(58)
    rejections = 0
    for _ in range(200):
        x = rng.uniform(0, 3, 100)
        y = 1.0 + x ** 2 + 0.3 * rng.standard_normal(100)
        rejections += ramsey_reset(ols(y, np.column_stack([np.ones(100), x]))).p_value < 0.05
    assert rejections / 200 >= 0.90


def test_reset_rejects_invalid_powers():
    rng = np.random.default_rng(47)
    y, X = _regression(rng, 30)
    with pytest.raises(DataValidationError):
        ramsey_reset(ols(y, X), powers=(1,))


def test_exact_fit_diagnostics_do_not_reject():
    x = np.arange(12.0)
    X = np.column_stack([np.ones(12), x])
    fit = ols(3.0 - 0.5 * x, X)
    assert fit.exact_fit
    assert bg_lm(fit).p_value == 1.0
    assert het_test(fit).p_value == 1.0
    assert ramsey_reset(fit).p_value == 1.0


def test_recursive_residuals_sum_of_squares_equals_rss():
    rng = np.random.default_rng(48)
    y, X = _regression(rng, 40)
    w = recursive_residuals(y, X)
    assert w.shape == (38,)
    assert float(w @ w) == pytest.approx(ols(y, X).rss, rel=1e-8)


def test_recursive_residuals_of_a_mean():
    y = np.array([1.0, 3.0, 2.0, 6.0])
    w = recursive_residuals(y, np.ones((4, 1)))
    assert w[0] == pytest.approx((3.0 - 1.0) / math.sqrt(2.0))
    assert w[1] == pytest.approx((2.0 - 2.0) / math.sqrt(1.5))
    assert w[2] == pytest.approx((6.0 - 2.0) / math.sqrt(4.0 / 3.0))


def test_recursive_residuals_need_enough_rows():
    with pytest.raises(SampleTooShortError):
        recursive_residuals(np.arange(3.0), np.column_stack([np.ones(3), np.arange(3.0)]))


def test_durbin_constants():
    assert durbin_c0(1, "5%") == pytest.approx(0.475)
    assert durbin_c0(2, "5%") == pytest.approx(0.50855, abs=1e-3)
    assert durbin_c0(1.5, "5%") == pytest.approx(0.5 * (durbin_c0(1, "5%") + durbin_c0(2, "5%")))
    assert durbin_c0(10, "1%") > durbin_c0(10, "5%") > durbin_c0(10, "10%")

    a, b, c = EDGERTON_WELLS["5%"]
    assert durbin_c0(40, "5%") == pytest.approx(a / math.sqrt(40) + b / 40 + c / 40 ** 1.5)
    assert abs(durbin_c0(30, "5%") - (a / math.sqrt(30) + b / 30 + c / 30 ** 1.5)) < 0.01

    with pytest.raises(SampleTooShortError):
        durbin_c0(0.5)
    with pytest.raises(CriticalValueError):
        durbin_c0(10, "2.5%")


def test_cusum_band_and_break_detection():
    rng = np.random.default_rng(49)
    n = 100
    y, X = _regression(rng, n)
    y[n // 2:] += 5.0
    path = cusum(y, X)
    assert path.name == "CUSUM"
    assert path.times[0] == 3 and path.times[-1] == n
    assert path.upper[-1] == pytest.approx(0.948 * 3 * math.sqrt(n - 2))
    assert path.verdict == StabilityVerdict.UNSTABLE


def test_cusum_stable_under_constant_parameters():
    rng = np.random.default_rng(50)
    stable = sum(cusum(*_regression(rng)).verdict == StabilityVerdict.STABLE for _ in range(500))
    assert stable / 500 >= 0.90


def test_cusumsq_detects_variance_break():
    rng = np.random.default_rng(51)
    n = 100
    errors = rng.standard_normal(n) * np.where(np.arange(n) < n // 2, 1.0, 4.0)
    path = cusumsq(*_regression(rng, n, errors))
    assert path.statistic[-1] == 1.0
    assert path.verdict == StabilityVerdict.UNSTABLE


def test_cusumsq_stable_under_constant_variance():
    rng = np.random.default_rng(52)
    stable = sum(cusumsq(*_regression(rng, 60)).verdict == StabilityVerdict.STABLE for _ in range(200))
    assert stable / 200 >= 0.90


def test_stability_input_errors():
    rng = np.random.default_rng(53)
    y, X = _regression(rng, 30)
    with pytest.raises(CriticalValueError):
        cusum(y, X, "2.5%")
    x = np.arange(10.0)
    with pytest.raises(DegenerateFitError):
        cusumsq(2.0 + x, np.column_stack([np.ones(10), x]))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
