"""
Augmented Dickey-Fuller and Phillips-Perron unit-root tests.

Both tests share the Dickey-Fuller regression

    D(y)_t = deterministics + g * y_{t-1} + sum_{j=1..p} f_j D(y)_{t-j} + e_t

and test g = 0 against g < 0. Critical values come from the MacKinnon (2010)
response surfaces, evaluated at the regression sample size.
"""
import logging
import math
from typing import Dict, Optional, Union

import numpy as np

from econometrics.exceptions import (
    CriticalValueError,
    DataValidationError,
    DegenerateFitError,
    SampleTooShortError,
    SeriesMismatchError,
)
from econometrics.linreg import info_criteria, newey_west_lrv, ols, stack_columns
from econometrics.timeseries import AlignedSample, align
from models.schemas import (
    SIGNIFICANCE_LEVELS,
    Criterion,
    DeterministicSpec,
    HacOptions,
    IntegrationOrder,
    RegressionFit,
    TimeSeries,
    UnitRootResult,
    normalize_level,
)

logger = logging.getLogger(__name__)

# cv(T) = b0 + b1/T + b2/T^2 + b3/T^3, one regressor, MacKinnon (2010)
MACKINNON_2010: Dict[DeterministicSpec, Dict[str, tuple]] = {
    DeterministicSpec.CONSTANT: {
        "1%": (-3.43035, -6.5393, -16.786, -79.433),
        "5%": (-2.86154, -2.8903, -4.234, -40.040),
        "10%": (-2.56677, -1.5384, -2.809, 0.0),
    },
    DeterministicSpec.CONSTANT_TREND: {
        "1%": (-3.95877, -9.0531, -28.428, -134.155),
        "5%": (-3.41049, -4.3904, -9.036, -45.374),
        "10%": (-3.12705, -2.5856, -3.925, -22.380),
    },
}

MIN_CV_SAMPLE = 10


def mackinnon_cv(spec: Union[DeterministicSpec, str], nobs: int, level: Union[str, float]) -> float:
    """Finite-sample Dickey-Fuller critical value for the given deterministic case."""
    spec = DeterministicSpec(spec)
    try:
        label = normalize_level(level)
    except ValueError as e:
        raise CriticalValueError(str(e))
    if label not in MACKINNON_2010[spec]:
        raise CriticalValueError(f"No Dickey-Fuller critical value at {label}; supported: {SIGNIFICANCE_LEVELS}")
    if nobs < MIN_CV_SAMPLE:
        raise DataValidationError(f"Critical values need at least {MIN_CV_SAMPLE} observations, got {nobs}")

    b0, b1, b2, b3 = MACKINNON_2010[spec][label]
    return b0 + b1 / nobs + b2 / nobs ** 2 + b3 / nobs ** 3


def default_max_lag(nobs: int) -> int:
    """min(4, floor((T-1)/5)) for small annual samples."""
    return max(0, min(4, (nobs - 1) // 5))


def _level_name(name: str) -> str:
    return f"{name}(-1)"


def _df_regression(sample: AlignedSample, name: str, spec: DeterministicSpec, p: int) -> RegressionFit:
    columns = [("C", sample.constant())]
    if spec == DeterministicSpec.CONSTANT_TREND:
        columns.append(("@TREND", sample.trend()))
    columns.append((_level_name(name), sample.level(name, 1)))
    columns.extend((f"D({name}(-{j}))", sample.delta(name, j)) for j in range(1, p + 1))

    X, names = stack_columns(columns)
    y = sample.delta(name, 0)
    if y.shape[0] < X.shape[1] + 2:
        raise SampleTooShortError(
            f"Dickey-Fuller regression for '{name}' has {y.shape[0]} observations for {X.shape[1]} parameters"
        )
    return ols(y, X, names=names)


def _build_result(
    test: str,
    series: str,
    tau: float,
    lag_or_bandwidth: int,
    spec: DeterministicSpec,
    nobs: int,
    criterion: Optional[Criterion] = None,
) -> UnitRootResult:
    critical_values = {level: mackinnon_cv(spec, nobs, level) for level in SIGNIFICANCE_LEVELS}
    return UnitRootResult(
        test=test,
        series=series,
        tau=tau,
        lag_or_bandwidth=lag_or_bandwidth,
        spec=spec,
        critical_values=critical_values,
        reject={level: bool(tau < cv) for level, cv in critical_values.items()},
        n_obs=nobs,
        criterion=criterion,
    )


def _check_effective_sample(s: TimeSeries, nobs: int) -> None:
    if nobs < MIN_CV_SAMPLE:
        raise SampleTooShortError(
            f"Dickey-Fuller regression for '{s.name}' keeps {nobs} observations; critical values need {MIN_CV_SAMPLE}"
        )


def _select_lag(s: TimeSeries, spec: DeterministicSpec, criterion: Criterion, max_lag: int) -> int:
    """Lag minimizing the criterion, every candidate fitted on the max-lag sample."""
    common = align(s, max_lag, diff_order=1)
    best_p, best_value = 0, math.inf
    for p in range(max_lag + 1):
        value = info_criteria(_df_regression(common, s.name, spec, p)).get(criterion)
        if value < best_value:
            best_p, best_value = p, value
    logger.debug("ADF lag for %s (%s): %d of 0..%d by %s", s.name, spec.value, best_p, max_lag, criterion.value)
    return best_p


def adf(
    s: TimeSeries,
    spec: Union[DeterministicSpec, str] = DeterministicSpec.CONSTANT,
    lags: Union[int, str] = "auto",
    criterion: Union[Criterion, str] = Criterion.AIC,
    max_lag: Optional[int] = None,
) -> UnitRootResult:
    """
    Augmented Dickey-Fuller test.

    `lags` is a fixed augmentation order or "auto"; under "auto" the order
    minimizing `criterion` over 0..max_lag is refit on its own full sample.
    """
    spec = DeterministicSpec(spec)
    criterion = Criterion(criterion)
    usable = len(s) - 1

    if lags == "auto" or lags is None:
        max_lag = default_max_lag(len(s)) if max_lag is None else int(max_lag)
        if max_lag < 0:
            raise DataValidationError("Maximum lag must be nonnegative")
        if max_lag >= usable:
            raise DataValidationError(f"Maximum lag {max_lag} must be below the usable sample {usable}")
        p = _select_lag(s, spec, criterion, max_lag)
        chosen_by = criterion
    else:
        p = int(lags)
        if p < 0:
            raise DataValidationError("Lag order must be nonnegative")
        if p >= usable:
            raise DataValidationError(f"Lag order {p} must be below the usable sample {usable}")
        chosen_by = None

    _check_effective_sample(s, usable - p)
    fit = _df_regression(align(s, p, diff_order=1), s.name, spec, p)
    if fit.exact_fit:
        raise DegenerateFitError(f"Dickey-Fuller regression for '{s.name}' has zero residual variance")

    tau = float(fit.t_stats[fit.index(_level_name(s.name))])
    return _build_result("ADF", s.name, tau, p, spec, fit.n_obs, chosen_by)


def pp(
    s: TimeSeries,
    spec: Union[DeterministicSpec, str] = DeterministicSpec.CONSTANT,
    bandwidth: Union[int, str, HacOptions] = "automatic",
) -> UnitRootResult:
    """
    Phillips-Perron Z(t) test.

    Z = sqrt(g0/l2) t - (l2 - g0) / (2 sqrt(l2)) * T se(g) / s, where g0 is the
    residual variance about zero, l2 its Bartlett long-run variance and s the
    regression standard error. With bandwidth 0 the correction vanishes.
    """
    spec = DeterministicSpec(spec)
    _check_effective_sample(s, len(s) - 1)
    fit = _df_regression(align(s, 0, diff_order=1), s.name, spec, 0)
    if fit.exact_fit:
        raise DegenerateFitError(f"Dickey-Fuller regression for '{s.name}' has zero residual variance")

    opts = bandwidth if isinstance(bandwidth, HacOptions) else HacOptions(bandwidth=bandwidth)
    nobs, k = fit.n_obs, fit.n_params
    lag_window = opts.resolve(nobs)

    u = fit.residuals
    gamma0 = newey_west_lrv(u, 0)
    lam2 = newey_west_lrv(u, lag_window)
    if lam2 <= 0:
        raise DegenerateFitError(f"Long-run variance of '{s.name}' residuals is not positive")

    idx = fit.index(_level_name(s.name))
    t_stat = float(fit.t_stats[idx])
    se = float(fit.std_errors[idx])
    s_e = math.sqrt(fit.rss / (nobs - k))
    tau = math.sqrt(gamma0 / lam2) * t_stat - 0.5 * ((lam2 - gamma0) / math.sqrt(lam2)) * (nobs * se / s_e)

    logger.debug("PP %s (%s): bandwidth %d, tau %.4f", s.name, spec.value, lag_window, tau)
    return _build_result("PP", s.name, float(tau), lag_window, spec, nobs)


def classify_order(
    level_result: UnitRootResult,
    diff_result: UnitRootResult,
    level: Union[str, float] = "5%",
) -> IntegrationOrder:
    """I(0) if the level rejects, I(1) if only the first difference rejects, higher otherwise."""
    if diff_result.series not in (level_result.series, f"D({level_result.series})"):
        raise SeriesMismatchError(
            f"Difference test on '{diff_result.series}' does not belong to '{level_result.series}'"
        )
    if diff_result.spec != level_result.spec or diff_result.test != level_result.test:
        raise SeriesMismatchError("Level and difference results use different tests or deterministic specs")

    label = normalize_level(level)
    if label not in level_result.reject:
        raise CriticalValueError(f"Unsupported significance level {label}")

    if level_result.reject[label]:
        return IntegrationOrder.I0
    if diff_result.reject[label]:
        return IntegrationOrder.I1
    return IntegrationOrder.HIGHER


def rejection_rate(results, level: str = "5%") -> float:
    """Share of results rejecting the unit root at `level`."""
    flags = np.array([r.reject[normalize_level(level)] for r in results], dtype=bool)
    return float(flags.mean()) if flags.size else 0.0
