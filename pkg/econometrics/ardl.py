"""
ARDL lag selection, bounds F-test and error-correction estimation.

Levels form for spec (p, q_1..q_k):

    y_t = c + sum_{i=1..p} phi_i y_{t-i} + sum_j sum_{l=0..q_j} theta_jl x_{j,t-l} + e_t

Conditional error-correction form (same column space, identical fit):

    D(y)_t = c + pi_y y_{t-1} + sum_j pi_j x_{j,t-1}
             + sum_{i=1..p-1} psi_i D(y)_{t-i} + sum_j sum_{l=0..q_j-1} w_jl D(x_j)_{t-l} + e_t

A regressor with q_j = 0 enters the levels part at time t instead of t-1 and has
no difference terms.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from econometrics.exceptions import (
    CriticalValueError,
    DataValidationError,
    EstimationError,
    RankDeficiencyError,
    SampleTooShortError,
)
from econometrics.linreg import f_statistic, info_criteria, ols, pvalue, stack_columns
from econometrics.timeseries import AlignedSample, align
from models.schemas import (
    BOUNDS_LEVELS,
    ArdlSpec,
    BoundsDecision,
    BoundsResult,
    Coefficient,
    Criterion,
    Dataset,
    EcmFit,
    RegressionFit,
    normalize_level,
)

logger = logging.getLogger(__name__)

# Asymptotic F bounds by case and k (number of regressors): level -> (I0, I1).
# Case II restricts the intercept to the levels relation; Case III leaves it
# unrestricted. Neither case has a trend.
PESARAN_BOUNDS: Dict[str, Dict[int, Dict[str, Tuple[float, float]]]] = {
    "II": {
        1: {"10%": (3.02, 3.51), "5%": (3.62, 4.16), "2.5%": (4.18, 4.79), "1%": (4.94, 5.58)},
        2: {"10%": (2.63, 3.35), "5%": (3.10, 3.87), "2.5%": (3.55, 4.38), "1%": (4.13, 5.00)},
        3: {"10%": (2.37, 3.20), "5%": (2.79, 3.67), "2.5%": (3.15, 4.08), "1%": (3.65, 4.66)},
        4: {"10%": (2.20, 3.09), "5%": (2.56, 3.49), "2.5%": (2.88, 3.87), "1%": (3.29, 4.37)},
        5: {"10%": (2.08, 3.00), "5%": (2.39, 3.38), "2.5%": (2.70, 3.73), "1%": (3.06, 4.15)},
        6: {"10%": (1.99, 2.94), "5%": (2.27, 3.28), "2.5%": (2.55, 3.61), "1%": (2.88, 3.99)},
        7: {"10%": (1.92, 2.89), "5%": (2.17, 3.21), "2.5%": (2.43, 3.51), "1%": (2.73, 3.90)},
        8: {"10%": (1.85, 2.85), "5%": (2.11, 3.15), "2.5%": (2.33, 3.42), "1%": (2.62, 3.77)},
        9: {"10%": (1.80, 2.80), "5%": (2.04, 3.08), "2.5%": (2.24, 3.35), "1%": (2.50, 3.68)},
        10: {"10%": (1.76, 2.77), "5%": (1.98, 3.04), "2.5%": (2.18, 3.28), "1%": (2.41, 3.61)},
    },
    "III": {
        1: {"10%": (4.04, 4.78), "5%": (4.94, 5.73), "2.5%": (5.77, 6.68), "1%": (6.84, 7.84)},
        2: {"10%": (3.17, 4.14), "5%": (3.79, 4.85), "2.5%": (4.41, 5.52), "1%": (5.15, 6.36)},
        3: {"10%": (2.72, 3.77), "5%": (3.23, 4.35), "2.5%": (3.69, 4.89), "1%": (4.29, 5.61)},
        4: {"10%": (2.45, 3.52), "5%": (2.86, 4.01), "2.5%": (3.25, 4.49), "1%": (3.74, 5.06)},
        5: {"10%": (2.26, 3.35), "5%": (2.62, 3.79), "2.5%": (2.96, 4.18), "1%": (3.41, 4.68)},
        6: {"10%": (2.12, 3.23), "5%": (2.45, 3.61), "2.5%": (2.75, 3.99), "1%": (3.15, 4.43)},
        7: {"10%": (2.03, 3.13), "5%": (2.32, 3.50), "2.5%": (2.60, 3.84), "1%": (2.96, 4.26)},
        8: {"10%": (1.95, 3.06), "5%": (2.22, 3.39), "2.5%": (2.48, 3.70), "1%": (2.79, 4.10)},
        9: {"10%": (1.88, 2.99), "5%": (2.14, 3.30), "2.5%": (2.37, 3.60), "1%": (2.65, 3.97)},
        10: {"10%": (1.83, 2.94), "5%": (2.06, 3.24), "2.5%": (2.28, 3.50), "1%": (2.54, 3.86)},
    },
}

SUPPORTED_CASES = tuple(PESARAN_BOUNDS)
DEFAULT_CASE = "II"
CASE_LABELS = {
    "II": "II (restricted intercept, no trend)",
    "III": "III (unrestricted intercept, no trend)",
}


def pesaran_cv(k: int, level: Union[str, float], case: str = DEFAULT_CASE) -> Tuple[float, float]:
    """(I0, I1) critical bounds for k regressors."""
    if case not in SUPPORTED_CASES:
        raise CriticalValueError(f"Bounds case {case!r} is not supported; available: {SUPPORTED_CASES}")
    try:
        label = normalize_level(level)
    except ValueError as e:
        raise CriticalValueError(str(e))
    try:
        return PESARAN_BOUNDS[case][int(k)][label]
    except KeyError:
        raise CriticalValueError(f"No bounds critical values for k={k} at {label} (k must be 1..10)")


def bounds_decision(f_stat: float, bounds: Mapping[str, Sequence[float]], level: Union[str, float]) -> BoundsDecision:
    """cointegrated above I1, not_cointegrated below I0, inconclusive on or between the bounds."""
    label = normalize_level(level)
    try:
        lower, upper = bounds[label]
    except KeyError:
        raise CriticalValueError(f"No bounds at {label}")
    if f_stat > upper:
        return BoundsDecision.COINTEGRATED
    if f_stat < lower:
        return BoundsDecision.NOT_COINTEGRATED
    return BoundsDecision.INCONCLUSIVE


# ------------------------------------------------------------------ designs

def _lag_name(name: str, lag: int) -> str:
    return name if lag == 0 else f"{name}(-{lag})"


def _levels_design(spec: ArdlSpec, sample: AlignedSample):
    columns = [("C", sample.constant())]
    columns.extend((_lag_name(spec.dep, i), sample.level(spec.dep, i)) for i in range(1, spec.p + 1))
    for name, q in spec.q.items():
        columns.extend((_lag_name(name, l), sample.level(name, l)) for l in range(q + 1))
    return stack_columns(columns)


def level_term(name: str, q: int) -> str:
    """Name of a regressor's lagged-level term in the error-correction form."""
    return _lag_name(name, 1 if q >= 1 else 0)


def _ecm_columns(spec: ArdlSpec, sample: AlignedSample, include_levels: bool = True):
    columns = [("C", sample.constant())]
    if include_levels:
        columns.append((_lag_name(spec.dep, 1), sample.level(spec.dep, 1)))
        for name, q in spec.q.items():
            columns.append((level_term(name, q), sample.level(name, 1 if q >= 1 else 0)))
    columns.extend((f"D({_lag_name(spec.dep, i)})", sample.delta(spec.dep, i)) for i in range(1, spec.p))
    for name, q in spec.q.items():
        columns.extend((f"D({_lag_name(name, l)})", sample.delta(name, l)) for l in range(q))
    return columns


def _sample_for(spec: ArdlSpec, d: Dataset, sample: Optional[AlignedSample]) -> AlignedSample:
    if sample is not None:
        if sample.offset < spec.max_lag:
            raise DataValidationError(f"Sample offset {sample.offset} is shorter than spec max lag {spec.max_lag}")
        return sample
    return align(d, spec.max_lag)


def fit_levels_ardl(spec: ArdlSpec, d: Dataset, sample: Optional[AlignedSample] = None) -> RegressionFit:
    """OLS on the levels ARDL; the sample defaults to the model's own max-lag sample."""
    sample = _sample_for(spec, d, sample)
    X, names = _levels_design(spec, sample)
    return ols(sample.level(spec.dep, 0), X, names=names)


def fit_conditional_ecm(spec: ArdlSpec, d: Dataset, sample: Optional[AlignedSample] = None) -> RegressionFit:
    """OLS on the conditional error-correction form used by the bounds test."""
    sample = _sample_for(spec, d, sample)
    X, names = stack_columns(_ecm_columns(spec, sample))
    return ols(sample.delta(spec.dep, 0), X, names=names)


# ---------------------------------------------------------------- selection

def _candidate_value(
    lags: Tuple[int, ...], d: Dataset, sample: AlignedSample, criterion: Criterion
) -> Tuple[Tuple[int, ...], Optional[float]]:
    spec = ArdlSpec(dep=d.roles.dependent, regressors=d.roles.regressors, lags=lags, criterion=criterion)
    try:
        fit = fit_levels_ardl(spec, d, sample)
    except (SampleTooShortError, RankDeficiencyError) as e:
        logger.debug("Skipping ARDL%s: %s", spec.label, e)
        return lags, None
    return lags, info_criteria(fit).get(criterion)


def select_ardl(
    d: Dataset,
    max_p: int,
    max_q: int,
    criterion: Union[Criterion, str] = Criterion.AIC,
    workers: int = 1,
) -> ArdlSpec:
    """
    Exhaustive grid search over p in 1..max_p and every q_j in 0..max_q.

    All candidates are fitted on the sample aligned to max(max_p, max_q).
    The minimum criterion wins; ties go to the smallest total lag, then to
    the lexicographically smallest lag vector.
    """
    criterion = Criterion(criterion)
    if max_p < 1 or max_q < 0:
        raise DataValidationError("Grid requires max_p >= 1 and max_q >= 0")

    k = len(d.roles.regressors)
    sample = align(d, max(max_p, max_q))
    smallest = 2 + k
    if sample.n_obs <= smallest:
        raise SampleTooShortError(
            f"Common sample of {sample.n_obs} observations cannot fit even the smallest ARDL ({smallest} parameters)"
        )

    grid = [
        (p, *qs)
        for p in range(1, max_p + 1)
        for qs in itertools.product(range(max_q + 1), repeat=k)
    ]
    logger.debug("Evaluating %d ARDL candidates on %d observations", len(grid), sample.n_obs)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scored = list(pool.map(lambda lags: _candidate_value(lags, d, sample, criterion), grid))
    else:
        scored = [_candidate_value(lags, d, sample, criterion) for lags in grid]

    feasible = [(value, sum(lags), lags) for lags, value in scored if value is not None]
    if not feasible:
        raise EstimationError("No ARDL candidate in the grid is estimable on the common sample")

    value, _, lags = min(feasible)
    logger.debug("Selected ARDL%s by %s = %.4f (%d candidates)", lags, criterion.value, value, len(feasible))
    return ArdlSpec(
        dep=d.roles.dependent,
        regressors=d.roles.regressors,
        lags=lags,
        criterion=criterion,
        criterion_value=value,
        candidates_evaluated=len(feasible),
    )


# ------------------------------------------------------------------- bounds

def bounds_f(spec: ArdlSpec, d: Dataset, case: str = DEFAULT_CASE) -> BoundsResult:
    """
    F test that the long-run levels drop out of the conditional error-correction form.

    Case III restricts the lagged dependent level and every regressor level
    (k + 1 restrictions). Case II also restricts the intercept (k + 2).
    """
    if case not in SUPPORTED_CASES:
        raise CriticalValueError(f"Bounds case {case!r} is not supported; available: {SUPPORTED_CASES}")
    sample = align(d, spec.max_lag)
    unrestricted = fit_conditional_ecm(spec, d, sample)
    dy = sample.delta(spec.dep, 0)
    k = len(spec.regressors)

    restricted_columns = _ecm_columns(spec, sample, include_levels=False)
    if case == "II":
        restricted_columns = [(name, column) for name, column in restricted_columns if name != "C"]
        n_restrictions = k + 2
    else:
        n_restrictions = k + 1

    if restricted_columns:
        X_r, names_r = stack_columns(restricted_columns)
        rss_restricted = ols(dy, X_r, names=names_r).rss
    else:
        rss_restricted = float(dy @ dy)
    f_stat = f_statistic(rss_restricted, unrestricted.rss, n_restrictions, unrestricted.df_resid)

    bounds = {level: pesaran_cv(k, level, case) for level in BOUNDS_LEVELS}
    decision = {level: bounds_decision(f_stat, bounds, level) for level in BOUNDS_LEVELS}

    logger.debug("Bounds F = %.4f for ARDL%s (k=%d, case %s)", f_stat, spec.label, k, case)
    return BoundsResult(
        f_stat=f_stat,
        k=k,
        case=case,
        bounds=bounds,
        decision=decision,
        lags=spec.lags,
        n_obs=unrestricted.n_obs,
        rss_restricted=rss_restricted,
        rss_unrestricted=unrestricted.rss,
    )


# ---------------------------------------------------------------------- ECM

def _coefficient(name: str, value: float, se: float, df_resid: int) -> Coefficient:
    t_stat = value / se if se > 0 else float("nan")
    p = pvalue("t", t_stat, df_resid) if np.isfinite(t_stat) else None
    return Coefficient(name=name, coefficient=value, std_error=se, t_stat=t_stat, p_value=p)


def ar_root_moduli(phi: Sequence[float]) -> Tuple[float, ...]:
    """Moduli of the roots of 1 - phi_1 z - ... - phi_p z^p."""
    poly = np.r_[-np.asarray(phi, dtype=float)[::-1], 1.0]
    while poly.size > 1 and poly[0] == 0.0:
        poly = poly[1:]
    if poly.size == 1:
        return ()
    return tuple(sorted(float(m) for m in np.abs(np.roots(poly))))


def fit_ecm(spec: ArdlSpec, d: Dataset) -> EcmFit:
    """
    Short-run, adjustment and long-run coefficients of a selected ARDL.

    Long-run effects are sum(theta_j) / (1 - sum(phi)) from the levels fit,
    with delta-method standard errors from the levels covariance. The
    adjustment coefficient is -(1 - sum(phi)); its standard error is that of
    y(-1) in the error-correction form.
    """
    sample = align(d, spec.max_lag)
    levels = fit_levels_ardl(spec, d, sample)
    ecm = fit_conditional_ecm(spec, d, sample)
    beta, cov = levels.coefficients, levels.covariance

    phi_idx = [levels.index(_lag_name(spec.dep, i)) for i in range(1, spec.p + 1)]
    phi_sum = float(beta[phi_idx].sum())
    denom = 1.0 - phi_sum
    if abs(denom) < 1e-12:
        raise EstimationError("Autoregressive coefficients sum to one; long-run effects are undefined")

    warnings: List[str] = []
    if levels.exact_fit:
        warnings.append("Levels ARDL fits exactly; standard errors are zero")

    def long_run(name: str, idx: Sequence[int]) -> Coefficient:
        numerator = float(beta[list(idx)].sum())
        gradient = np.zeros_like(beta)
        gradient[list(idx)] = 1.0 / denom
        gradient[phi_idx] = numerator / denom ** 2
        se = float(np.sqrt(max(gradient @ cov @ gradient, 0.0)))
        return _coefficient(name, numerator / denom, se, levels.df_resid)

    long_run_set = [
        long_run(name, [levels.index(_lag_name(name, l)) for l in range(q + 1)])
        for name, q in spec.q.items()
    ]
    long_run_set.append(long_run("C", [levels.index("C")]))

    ect_se = float(ecm.std_errors[ecm.index(_lag_name(spec.dep, 1))])
    ect = _coefficient("ECT(-1)", -denom, ect_se, ecm.df_resid)

    short_run = []
    for name, q in spec.q.items():
        term = f"D({name})" if q >= 1 else name
        idx = ecm.index(term)
        short_run.append(
            _coefficient(name, float(ecm.coefficients[idx]), float(ecm.std_errors[idx]), ecm.df_resid)
        )

    ecm_terms = tuple(
        _coefficient(name, float(value), float(se), ecm.df_resid)
        for name, value, se in zip(ecm.names, ecm.coefficients, ecm.std_errors)
    )

    moduli = ar_root_moduli(beta[phi_idx])
    roots_outside = all(m > 1.0 for m in moduli)
    ect_in_range = -2.0 < ect.coefficient < 0.0
    if not roots_outside:
        warnings.append("Autoregressive polynomial has a root on or inside the unit circle")
    if not ect_in_range:
        warnings.append(f"Adjustment coefficient {ect.coefficient:.4f} lies outside (-2, 0)")
    for message in warnings:
        logger.warning("ARDL%s: %s", spec.label, message)

    return EcmFit(
        spec=spec,
        short_run=tuple(short_run),
        ect=ect,
        long_run=tuple(long_run_set),
        ecm_terms=ecm_terms,
        levels_fit=levels,
        ecm_fit=ecm,
        ar_root_moduli=moduli,
        stable=roots_outside and ect_in_range,
        warnings=tuple(warnings),
    )
