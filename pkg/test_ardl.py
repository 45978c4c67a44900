#!/usr/bin/env python3
"""
Tests for ARDL selection, the bounds F test and error-correction estimation
"""
from pathlib import Path

import numpy as np
import pytest

from econometrics.ardl import (
    ar_root_moduli,
    bounds_decision,
    bounds_f,
    fit_conditional_ecm,
    fit_ecm,
    fit_levels_ardl,
    pesaran_cv,
    select_ardl,
)
from econometrics.exceptions import CriticalValueError, DataValidationError, SampleTooShortError
from econometrics.linreg import info_criteria, ols
from econometrics.timeseries import load_csv
from models.schemas import BOUNDS_LEVELS, ArdlSpec, BoundsDecision, Dataset, DatasetRoles, TimeSeries

DATA_CSV = Path(__file__).parent / "data" / "turkiye_2000_2022.csv"


def _dataset(columns, dependent="y"):
    series = {name: TimeSeries(name=name, start_year=1950, values=tuple(values)) for name, values in columns.items()}
    regressors = tuple(name for name in columns if name != dependent)
    return Dataset(series=series, roles=DatasetRoles(dependent=dependent, regressors=regressors))


def _cointegrated(rng, n=100, beta=2.0, rho=0.3):
    x = np.cumsum(rng.standard_normal(n))
    u = np.zeros(n)
    e = rng.standard_normal(n)
    for t in range(1, n):
        u[t] = rho * u[t - 1] + e[t]
    return _dataset({"y": 1.0 + beta * x + u, "x": x})


def test_pesaran_bounds():
    assert pesaran_cv(5, "5%") == (2.39, 3.38)
    assert pesaran_cv(5, 0.01) == (3.06, 4.15)
    assert pesaran_cv(5, "5%", case="III") == (2.62, 3.79)
    assert pesaran_cv(1, "1%", case="III") == (6.84, 7.84)
    for case in ("II", "III"):
        for k in range(1, 11):
            for level in BOUNDS_LEVELS:
                lower, upper = pesaran_cv(k, level, case)
                assert lower < upper
            assert pesaran_cv(k, "1%", case)[0] > pesaran_cv(k, "5%", case)[0] > pesaran_cv(k, "10%", case)[0]
    with pytest.raises(CriticalValueError):
        pesaran_cv(11, "5%")
    with pytest.raises(CriticalValueError):
        pesaran_cv(3, "7%")
    with pytest.raises(CriticalValueError):
        pesaran_cv(3, "5%", case="V")


def test_bounds_decision():
    bounds = {"5%": (2.39, 3.38)}
    assert bounds_decision(5.557, bounds, "5%") == BoundsDecision.COINTEGRATED
    assert bounds_decision(1.0, bounds, "5%") == BoundsDecision.NOT_COINTEGRATED
    assert bounds_decision(2.39, bounds, "5%") == BoundsDecision.INCONCLUSIVE
    assert bounds_decision(3.38, bounds, "5%") == BoundsDecision.INCONCLUSIVE
    with pytest.raises(CriticalValueError):
        bounds_decision(3.0, bounds, "1%")


def test_bounds_statistic_matches_hand_restrictions():
    """Case III drops the levels, Case II drops the levels and the intercept"""
    d = _cointegrated(np.random.default_rng(39))
    y, x = d.series["y"].as_array(), d.series["x"].as_array()
    spec = ArdlSpec(dep="y", regressors=("x",), lags=(2, 1))
    unrestricted = fit_conditional_ecm(spec, d)

    t = np.arange(2, y.size)
    dy, dy1, dx = y[t] - y[t - 1], y[t - 1] - y[t - 2], x[t] - x[t - 1]
    s2 = unrestricted.rss / unrestricted.df_resid
    rss_iii = ols(dy, np.column_stack([np.ones(t.size), dy1, dx])).rss
    rss_ii = ols(dy, np.column_stack([dy1, dx])).rss

    case_iii = bounds_f(spec, d, case="III")
    case_ii = bounds_f(spec, d, case="II")
    assert case_iii.f_stat == pytest.approx((rss_iii - unrestricted.rss) / 2 / s2, rel=1e-8)
    assert case_ii.f_stat == pytest.approx((rss_ii - unrestricted.rss) / 3 / s2, rel=1e-8)
    assert case_ii.case == "II" and case_iii.case == "III"
    assert case_ii.bounds["5%"] == pesaran_cv(1, "5%", "II")
    assert case_iii.bounds["5%"] == pesaran_cv(1, "5%", "III")


def test_case_ii_without_short_run_terms():
    d = _cointegrated(np.random.default_rng(40))
    y = d.series["y"].as_array()
    spec = ArdlSpec(dep="y", regressors=("x",), lags=(1, 0))
    unrestricted = fit_conditional_ecm(spec, d)
    dy = np.diff(y)
    result = bounds_f(spec, d, case="II")
    expected = (dy @ dy - unrestricted.rss) / 3 / (unrestricted.rss / unrestricted.df_resid)
    assert result.rss_restricted == pytest.approx(dy @ dy, rel=1e-12)
    assert result.f_stat == pytest.approx(expected, rel=1e-8)
    with pytest.raises(CriticalValueError):
        bounds_f(spec, d, case="IV")


@pytest.mark.parametrize("case", ["II", "III"])
def test_bounds_statistic_ignores_regressor_order(case):
    rng = np.random.default_rng(41)
    walks = {name: np.cumsum(rng.standard_normal(60)) for name in ("x1", "x2", "x3")}
    y = 0.5 * walks["x1"] - walks["x3"] + rng.standard_normal(60)
    listed = _dataset({"y": y, **walks})
    reordered = _dataset({"y": y, "x3": walks["x3"], "x1": walks["x1"], "x2": walks["x2"]})
    first = bounds_f(ArdlSpec(dep="y", regressors=("x1", "x2", "x3"), lags=(2, 1, 0, 2)), listed, case)
    second = bounds_f(ArdlSpec(dep="y", regressors=("x3", "x1", "x2"), lags=(2, 2, 1, 0)), reordered, case)
    assert second.f_stat == pytest.approx(first.f_stat, rel=1e-10, abs=1e-10)
    assert second.rss_unrestricted == pytest.approx(first.rss_unrestricted, rel=1e-10)


def test_levels_and_error_correction_forms_fit_identically():
    d = _cointegrated(np.random.default_rng(31))
    spec = ArdlSpec(dep="y", regressors=("x",), lags=(2, 2))
    levels = fit_levels_ardl(spec, d)
    ecm = fit_conditional_ecm(spec, d)
    assert levels.n_obs == ecm.n_obs == 98
    assert ecm.rss == pytest.approx(levels.rss, rel=1e-8)


def test_long_run_and_adjustment_identities():
    d = _cointegrated(np.random.default_rng(32))
    spec = ArdlSpec(dep="y", regressors=("x",), lags=(2, 1))
    fit = fit_ecm(spec, d)
    levels = fit.levels_fit
    phi_sum = levels.coef("y(-1)") + levels.coef("y(-2)")
    theta_sum = levels.coef("x") + levels.coef("x(-1)")

    long_run = {c.name: c for c in fit.long_run}
    assert long_run["x"].coefficient == pytest.approx(theta_sum / (1 - phi_sum), rel=1e-10)
    assert long_run["C"].coefficient == pytest.approx(levels.coef("C") / (1 - phi_sum), rel=1e-10)
    assert fit.ect.coefficient == pytest.approx(-(1 - phi_sum), rel=1e-10)
    assert fit.ecm_fit.coef("y(-1)") == pytest.approx(fit.ect.coefficient, rel=1e-8)

    short_run = {c.name: c for c in fit.short_run}
    assert short_run["x"].coefficient == pytest.approx(levels.coef("x"), rel=1e-8)


def test_cointegrated_process_is_detected_and_stable():
    d = _cointegrated(np.random.default_rng(33))
    spec = ArdlSpec(dep="y", regressors=("x",), lags=(1, 1))
    result = bounds_f(spec, d)
    assert result.k == 1
    assert result.decision["5%"] == BoundsDecision.COINTEGRATED
    assert result.rss_restricted >= result.rss_unrestricted

    fit = fit_ecm(spec, d)
    assert fit.stable
    assert -2 < fit.ect.coefficient < 0
    assert all(m > 1 for m in fit.ar_root_moduli)
    assert {c.name: c.coefficient for c in fit.long_run}["x"] == pytest.approx(2.0, abs=0.15)


def test_regressor_without_lags_enters_at_time_t():
    d = _cointegrated(np.random.default_rng(34))
    spec = ArdlSpec(dep="y", regressors=("x",), lags=(1, 0))
    ecm = fit_conditional_ecm(spec, d)
    assert "x" in ecm.names and "D(x)" not in ecm.names
    fit = fit_ecm(spec, d)
    assert fit.short_run[0].coefficient == pytest.approx(fit.levels_fit.coef("x"), rel=1e-8)


def test_selection_prefers_smallest_total_lag_on_ties():
    """Exactly determined data ties every nesting candidate at -inf"""
    rng = np.random.default_rng(35)
    n = 40
    x = rng.standard_normal(n)
    y = np.zeros(n)
    for t in range(1, n):
        y[t] = 1.0 + 0.5 * y[t - 1] + x[t]
    d = _dataset({"y": y, "x": x})
    spec = select_ardl(d, 2, 2)
    assert spec.lags == (1, 0)
    assert spec.criterion_value == -np.inf


def test_selection_is_independent_of_worker_count():
    d = _cointegrated(np.random.default_rng(36), n=60)
    serial = select_ardl(d, 2, 2, "sic", workers=1)
    threaded = select_ardl(d, 2, 2, "sic", workers=3)
    assert serial.lags == threaded.lags
    assert serial.criterion_value == pytest.approx(threaded.criterion_value)
    assert serial.candidates_evaluated == 2 * 3


def test_selection_input_errors():
    d = _cointegrated(np.random.default_rng(37), n=30)
    with pytest.raises(DataValidationError):
        select_ardl(d, 0, 2)
    short = _dataset({"y": np.arange(5.0) ** 2, "x": np.arange(5.0) * 3 + 1, "z": np.cos(np.arange(5.0))})
    with pytest.raises(SampleTooShortError):
        select_ardl(short, 2, 2)


def test_selection_matches_exhaustive_refit():
    rng = np.random.default_rng(42)
    n = 60
    x = np.cumsum(rng.standard_normal(n))
    y = np.zeros(n)
    for t in range(1, n):
        y[t] = 0.5 + 0.6 * y[t - 1] + 0.8 * x[t] - 0.3 * x[t - 1] + rng.standard_normal()
    d = _dataset({"y": y, "x": x})

    rows = np.arange(2, n)
    scores = {}
    for p in (1, 2):
        for q in (0, 1, 2):
            columns = [np.ones(rows.size)]
            columns.extend(y[rows - i] for i in range(1, p + 1))
            columns.extend(x[rows - l] for l in range(q + 1))
            scores[(p, q)] = info_criteria(ols(y[rows], np.column_stack(columns))).aic
    best = min(scores, key=scores.get)

    spec = select_ardl(d, 2, 2, "aic")
    assert spec.lags == best
    assert spec.criterion_value == pytest.approx(scores[best], rel=1e-10)
    assert spec.candidates_evaluated == 6


def test_noise_free_ardl_recovers_adjustment_and_long_run():
    rng = np.random.default_rng(43)
    n = 40
    x = rng.standard_normal(n)
    y = np.zeros(n)
    y[0] = 2.0 * x[0]
    for t in range(1, n):
        y[t] = 0.5 * y[t - 1] + 2.0 * x[t]
    fit = fit_ecm(ArdlSpec(dep="y", regressors=("x",), lags=(1, 0)), _dataset({"y": y, "x": x}))
    assert fit.ect.coefficient == pytest.approx(-0.5, abs=1e-8)
    assert {c.name: c.coefficient for c in fit.long_run}["x"] == pytest.approx(4.0, abs=1e-8)


@pytest.mark.parametrize("case", ["II", "III"])
def test_independent_random_walks_rarely_look_cointegrated(case):
    rng = np.random.default_rng(44 if case == "II" else 45)
    spec = ArdlSpec(dep="y", regressors=("x",), lags=(1, 1))
    decisions = []
    for _ in range(200):
        d = _dataset({name: np.cumsum(rng.standard_normal(200)) for name in ("y", "x")})
        decisions.append(bounds_f(spec, d, case).decision["5%"])
    not_cointegrated = sum(dec == BoundsDecision.NOT_COINTEGRATED for dec in decisions) / 200
    cointegrated = sum(dec == BoundsDecision.COINTEGRATED for dec in decisions) / 200
    assert not_cointegrated >= 0.78
    assert cointegrated <= 0.10


def test_independent_random_walks_with_lag_selection():
    rng = np.random.default_rng(38)
    decisions = []
    for _ in range(200):
        walks = {name: np.cumsum(rng.standard_normal(80)) for name in ("y", "x1", "x2")}
        d = _dataset(walks)
        spec = select_ardl(d, 2, 2)
        decisions.append(bounds_f(spec, d).decision["5%"])
    share = sum(dec == BoundsDecision.NOT_COINTEGRATED for dec in decisions) / len(decisions)
    assert share > 0.5


def test_ar_root_moduli():
    assert ar_root_moduli([0.5]) == pytest.approx((2.0,))
    assert ar_root_moduli([0.5, 0.0]) == pytest.approx((2.0,))
    assert ar_root_moduli([]) == ()
    assert min(ar_root_moduli([1.2])) < 1


def test_bundled_study_runs_end_to_end():
    d = load_csv(DATA_CSV)
    spec = select_ardl(d, 2, 2)
    assert len(spec.lags) == 6
    assert spec.candidates_evaluated <= 2 * 3 ** 5
    result = bounds_f(spec, d)
    assert result.k == 5
    assert result.bounds["5%"] == (2.39, 3.38)
    assert set(result.decision) == set(BOUNDS_LEVELS)
    assert result.case == "II"
    assert result.decision["1%"] == BoundsDecision.COINTEGRATED
    assert fit_ecm(spec, d).ect.coefficient < 0


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
