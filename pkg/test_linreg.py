#!/usr/bin/env python3
"""
Tests for the least-squares core: OLS, HAC covariance, long-run variance,
information criteria, F tests and tail probabilities
"""
import math

import numpy as np
import pytest
import scipy.stats as scs

from econometrics.exceptions import (
    DataValidationError,
    RankDeficiencyError,
    SampleTooShortError,
    SeriesMismatchError,
)
from econometrics.linreg import (
    automatic_bandwidth,
    f_statistic,
    info_criteria,
    newey_west_lrv,
    ols,
    pvalue,
    stack_columns,
    wald_f,
)
from models.schemas import HacOptions


def _instance(rng, nobs, k):
    X = np.column_stack([np.ones(nobs), rng.standard_normal((nobs, k - 1))])
    y = X @ rng.standard_normal(k) + rng.standard_normal(nobs)
    return y, X


def test_ols_matches_normal_equations():
    """20 seeded well-conditioned problems against (X'X)^-1 X'y"""
    rng = np.random.default_rng(20240601)
    for _ in range(20):
        k = int(rng.integers(1, 6))
        nobs = int(rng.integers(k + 5, 51))
        y, X = _instance(rng, nobs, k)
        fit = ols(y, X)
        expected = np.linalg.solve(X.T @ X, X.T @ y)
        np.testing.assert_allclose(fit.coefficients, expected, rtol=1e-10, atol=1e-10)

        resid = y - X @ expected
        s2 = resid @ resid / (nobs - k)
        np.testing.assert_allclose(fit.covariance, s2 * np.linalg.inv(X.T @ X), rtol=1e-8, atol=1e-12)
        assert fit.rss == pytest.approx(resid @ resid, rel=1e-10)
        assert fit.df_resid == nobs - k


def test_ols_column_order_only_permutes_coefficients():
    rng = np.random.default_rng(7)
    y, X = _instance(rng, 30, 4)
    order = [2, 0, 3, 1]
    fit = ols(y, X)
    permuted = ols(y, X[:, order])
    np.testing.assert_allclose(permuted.coefficients, fit.coefficients[order], rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(permuted.fitted, fit.fitted, rtol=1e-10, atol=1e-10)
    assert permuted.rss == pytest.approx(fit.rss, rel=1e-10)


def test_scaling_y_scales_coefficients_not_t_statistics():
    rng = np.random.default_rng(8)
    y, X = _instance(rng, 30, 3)
    fit = ols(y, X)
    scaled = ols(3.5 * y, X)
    np.testing.assert_allclose(scaled.coefficients, 3.5 * fit.coefficients, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(scaled.residuals, 3.5 * fit.residuals, rtol=1e-10, atol=1e-12)
    assert scaled.rss == pytest.approx(3.5 ** 2 * fit.rss, rel=1e-10)
    np.testing.assert_allclose(scaled.t_stats, fit.t_stats, rtol=1e-10)


def test_ols_fit_statistics():
    rng = np.random.default_rng(1)
    y, X = _instance(rng, 40, 3)
    fit = ols(y, X, names=("C", "a", "b"))
    tss = float(np.sum((y - y.mean()) ** 2))
    assert fit.r_squared == pytest.approx(1 - fit.rss / tss)
    assert fit.adj_r_squared == pytest.approx(1 - (fit.rss / 37) / (tss / 39))
    np.testing.assert_allclose(fit.t_stats, fit.coefficients / fit.std_errors)
    np.testing.assert_allclose(fit.fitted + fit.residuals, y)
    assert fit.coef("a") == fit.coefficients[1]
    with pytest.raises(KeyError):
        fit.index("missing")


def test_rank_deficient_design_is_rejected():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(20)
    X = np.column_stack([np.ones(20), x, 2 * x])
    with pytest.raises(RankDeficiencyError):
        ols(rng.standard_normal(20), X)


def test_too_few_observations():
    with pytest.raises(SampleTooShortError):
        ols(np.arange(3.0), np.column_stack([np.ones(3), np.arange(3.0), np.arange(3.0) ** 2]))


def test_shape_mismatch():
    with pytest.raises(DataValidationError):
        ols(np.arange(5.0), np.ones((4, 1)))


def test_exact_fit_flags_and_infinite_criteria():
    x = np.arange(10.0)
    X = np.column_stack([np.ones(10), x])
    fit = ols(1.0 + 2.0 * x, X)
    assert fit.exact_fit
    ic = info_criteria(fit)
    assert ic.exact_fit
    assert ic.aic == -math.inf and ic.sic == -math.inf and ic.hq == -math.inf


def test_information_criteria_formulas():
    rng = np.random.default_rng(3)
    y, X = _instance(rng, 30, 3)
    fit = ols(y, X)
    scale = math.log(fit.rss / 30)
    ic = info_criteria(fit)
    assert ic.aic == pytest.approx(scale + 2 * 3 / 30)
    assert ic.sic == pytest.approx(scale + 3 * math.log(30) / 30)
    assert ic.hq == pytest.approx(scale + 2 * 3 * math.log(math.log(30)) / 30)
    assert ic.get("sic") == ic.sic


def test_newey_west_hand_value():
    assert newey_west_lrv(np.array([1.0, -1.0, 1.0, -1.0]), 1) == pytest.approx(0.25, abs=1e-12)


def test_newey_west_bandwidth_zero_is_second_moment():
    u = np.array([0.5, -1.0, 2.0, 0.0, 1.5])
    assert newey_west_lrv(u, 0) == pytest.approx(np.mean(u ** 2))


def test_newey_west_matrix_is_symmetric_psd():
    rng = np.random.default_rng(4)
    for _ in range(25):
        u = rng.standard_normal((60, 3))
        omega = newey_west_lrv(u, HacOptions(bandwidth=4))
        np.testing.assert_allclose(omega, omega.T)
        assert np.linalg.eigvalsh(omega).min() > -1e-12


def test_newey_west_rejects_large_bandwidth():
    with pytest.raises(DataValidationError):
        newey_west_lrv(np.ones(4), 4)
    with pytest.raises(DataValidationError):
        newey_west_lrv(np.ones(1), 0)


def test_automatic_bandwidth():
    assert automatic_bandwidth(100) == 4
    assert automatic_bandwidth(23) == 2
    assert HacOptions(bandwidth=3).resolve(1000) == 3


def test_hac_bandwidth_zero_is_white_covariance():
    rng = np.random.default_rng(5)
    y, X = _instance(rng, 50, 3)
    fit = ols(y, X, hac=HacOptions(bandwidth=0))
    e = fit.residuals
    bread = np.linalg.inv(X.T @ X)
    white = bread @ (X.T * e ** 2) @ X @ bread
    np.testing.assert_allclose(fit.covariance, white, rtol=1e-8)
    assert fit.cov_type.startswith("hac")


def test_wald_f_matches_hand_formula():
    rng = np.random.default_rng(6)
    y, X = _instance(rng, 40, 4)
    unrestricted = ols(y, X)
    restricted = ols(y, X[:, :2])
    test = wald_f(unrestricted, restricted, 2)
    expected = ((restricted.rss - unrestricted.rss) / 2) / (unrestricted.rss / 36)
    assert test.statistic == pytest.approx(expected)
    assert test.p_value == pytest.approx(scs.f.sf(expected, 2, 36))
    assert (test.df_num, test.df_den) == (2, 36)


def test_wald_f_requires_same_dependent_variable():
    rng = np.random.default_rng(7)
    y, X = _instance(rng, 30, 3)
    with pytest.raises(SeriesMismatchError):
        wald_f(ols(y, X), ols(y + 1.0, X[:, :2]), 1)


def test_f_statistic_edge_cases():
    assert f_statistic(5.0, 5.0, 2, 10) == 0.0
    with pytest.raises(DataValidationError):
        f_statistic(4.0, 5.0, 2, 10)
    with pytest.raises(DataValidationError):
        f_statistic(5.0, 4.0, 0, 10)
    with pytest.raises(SampleTooShortError):
        f_statistic(5.0, 4.0, 1, 0)


def test_pvalues():
    assert pvalue("normal", 1.959963984540054) == pytest.approx(0.05, abs=1e-12)
    assert pvalue("t", 0.0, 10) == pytest.approx(1.0)
    assert pvalue("chi2", -2 * math.log(0.05), 2) == pytest.approx(0.05)
    assert pvalue("f", 0.0, (2, 10)) == 1.0
    assert pvalue("f", 4.1028, (2, 10)) == pytest.approx(scs.f.sf(4.1028, 2, 10))
    with pytest.raises(DataValidationError):
        pvalue("f", 1.0, 3)
    with pytest.raises(DataValidationError):
        pvalue("gamma", 1.0, 3)
    with pytest.raises(DataValidationError):
        pvalue("normal", float("nan"))
    with pytest.raises(DataValidationError):
        pvalue("chi2", 1.0, 0)


def test_stack_columns():
    X, names = stack_columns([("C", np.ones(3)), ("x", np.arange(3.0))])
    assert names == ("C", "x")
    assert X.shape == (3, 2)
    with pytest.raises(DataValidationError):
        stack_columns([])


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
