"""
Post-estimation diagnostics: Breusch-Godfrey serial correlation LM,
Breusch-Pagan-Godfrey heteroskedasticity, Jarque-Bera normality, Ramsey RESET,
and CUSUM / CUSUM-of-squares stability paths on recursive residuals.
"""
import logging
import math
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as scl
from scipy.optimize import brentq
from scipy.special import gammaln

from econometrics.exceptions import (
    CriticalValueError,
    DataValidationError,
    DegenerateFitError,
    RankDeficiencyError,
    SampleTooShortError,
)
from econometrics.linreg import RCOND_TOLERANCE, ols, pvalue, wald_f
from models.schemas import RegressionFit, StabilityPath, StabilityVerdict, TestResult, normalize_level

logger = logging.getLogger(__name__)

# Brownian-motion crossing constants for the CUSUM band
CUSUM_CRITICAL_VALUES = {"1%": 1.143, "5%": 0.948, "10%": 0.850}

# Edgerton-Wells response surface for the CUSUM-of-squares constant,
# c0 = a / sqrt(n) + b / n + c / n^1.5, keyed by two-sided level
EDGERTON_WELLS = {
    "10%": (1.2238734, -0.6700069, -0.7351697),
    "5%": (1.3581015, -0.6701218, -0.8858694),
    "1%": (1.6276236, -0.6703724, -1.2365861),
}

EXACT_C0_MAX_N = 30
RECURSIVE_ZERO_TOLERANCE = 1e-10


def _design(fit: RegressionFit, X) -> np.ndarray:
    if X is None:
        return fit.design
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != fit.n_obs:
        raise DataValidationError(f"Regressor matrix has {X.shape[0]} rows, fit has {fit.n_obs}")
    return X


def _has_constant(X: np.ndarray) -> bool:
    return any(np.ptp(X[:, j]) == 0 and X[0, j] != 0 for j in range(X.shape[1]))


def bg_lm(fit: RegressionFit, X=None, lags: int = 2) -> TestResult:
    """
    Breusch-Godfrey LM test for serial correlation up to order `lags`.

    Residuals are regressed on the original regressors and their own lags,
    pre-sample lags set to zero; statistic T * R^2 ~ chi2(lags).
    """
    if lags < 1:
        raise DataValidationError("Breusch-Godfrey needs at least one lag")
    X = _design(fit, X)
    e = fit.residuals
    variant = f"T*R2, {lags} lag(s), zero-padded"

    if fit.exact_fit or not np.any(e):
        return TestResult(name="Breusch-Godfrey LM", statistic=0.0, df=(lags,), p_value=1.0, variant=variant)

    lagged = np.column_stack([np.r_[np.zeros(j), e[:-j]] for j in range(1, lags + 1)])
    aux = ols(e, np.column_stack([X, lagged]))
    statistic = max(fit.n_obs * aux.r_squared, 0.0)
    return TestResult(
        name="Breusch-Godfrey LM",
        statistic=statistic,
        df=(lags,),
        p_value=pvalue("chi2", statistic, lags),
        variant=variant,
    )


def het_test(fit: RegressionFit, X=None) -> TestResult:
    """Breusch-Pagan-Godfrey: squared residuals on the regressors, T * R^2 ~ chi2(regressors)."""
    X = _design(fit, X)
    if not _has_constant(X):
        X = np.column_stack([np.ones(X.shape[0]), X])
    df = X.shape[1] - 1
    if df < 1:
        raise DataValidationError("Heteroskedasticity test needs at least one non-constant regressor")

    e2 = fit.residuals ** 2
    if fit.exact_fit or np.ptp(e2) == 0:
        return TestResult(name="Breusch-Pagan-Godfrey", statistic=0.0, df=(df,), p_value=1.0, variant="T*R2")

    aux = ols(e2, X)
    statistic = max(fit.n_obs * aux.r_squared, 0.0)
    return TestResult(
        name="Breusch-Pagan-Godfrey",
        statistic=statistic,
        df=(df,),
        p_value=pvalue("chi2", statistic, df),
        variant="T*R2",
    )


def jarque_bera(residuals) -> TestResult:
    """JB = T/6 (S^2 + (K - 3)^2 / 4) with central moment skewness S and kurtosis K."""
    e = np.asarray(residuals, dtype=float).ravel()
    nobs = e.shape[0]
    if nobs < 4:
        raise SampleTooShortError("Jarque-Bera needs at least 4 residuals")

    centered = e - e.mean()
    m2 = float(np.mean(centered ** 2))
    if m2 <= 0:
        raise DegenerateFitError("Residuals have zero variance")
    skew = float(np.mean(centered ** 3)) / m2 ** 1.5
    kurt = float(np.mean(centered ** 4)) / m2 ** 2
    statistic = nobs / 6.0 * (skew ** 2 + (kurt - 3.0) ** 2 / 4.0)
    return TestResult(
        name="Jarque-Bera",
        statistic=statistic,
        df=(2,),
        p_value=pvalue("chi2", statistic, 2),
        variant=f"skewness {skew:.4f}, kurtosis {kurt:.4f}",
    )


def ramsey_reset(fit: RegressionFit, X=None, y=None, powers: Sequence[int] = (2,)) -> TestResult:
    """F test on powers of the fitted values added to the original regression."""
    powers = tuple(sorted(set(int(p) for p in powers)))
    if not powers or powers[0] < 2:
        raise DataValidationError("RESET powers must be integers >= 2")
    X = _design(fit, X)
    y = fit.y if y is None else np.asarray(y, dtype=float).ravel()
    variant = "F, powers " + ",".join(str(p) for p in powers)
    q = len(powers)

    fitted = fit.fitted
    if np.ptp(fitted) == 0:
        raise DataValidationError("Fitted values are constant; RESET terms are undefined")
    if fit.exact_fit:
        return TestResult(name="Ramsey RESET", statistic=0.0, df=(q, fit.df_resid - q), p_value=1.0,
                          distribution="f", variant=variant)

    # Scale before powering to keep the augmented design well conditioned
    scaled = fitted / np.max(np.abs(fitted))
    augmented = np.column_stack([X] + [scaled ** p for p in powers])
    try:
        unrestricted = ols(y, augmented)
    except RankDeficiencyError as e:
        raise RankDeficiencyError(f"RESET augmentation is collinear with the regressors: {e}")

    restricted = fit if X is fit.design else ols(y, X)
    test = wald_f(unrestricted, restricted, q)
    return TestResult(
        name="Ramsey RESET",
        statistic=test.statistic,
        df=(test.df_num, test.df_den),
        p_value=test.p_value,
        distribution="f",
        variant=variant,
    )


# ------------------------------------------------------------------ stability

def recursive_residuals(y, X) -> np.ndarray:
    """
    Standardized one-step-ahead prediction errors w_t, t = k+1..T.

    w_t = (y_t - x_t' b_{t-1}) / sqrt(1 + x_t' (X_{t-1}' X_{t-1})^-1 x_t),
    with b_{t-1} the OLS estimate on the first t-1 observations.
    """
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    nobs, k = X.shape
    if nobs <= k + 1:
        raise SampleTooShortError(f"Recursive residuals need T > k + 1 (T={nobs}, k={k})")

    w = np.empty(nobs - k)
    for t in range(k, nobs):
        head = X[:t]
        s = np.linalg.svd(head, compute_uv=False)
        if s[0] == 0 or s[-1] / s[0] < RCOND_TOLERANCE:
            raise RankDeficiencyError(f"Recursive regression on the first {t} observations is singular")
        Q, R = scl.qr(head, mode="economic")
        beta = scl.solve_triangular(R, Q.T @ y[:t])
        z = scl.solve_triangular(R, X[t], trans="T")
        w[t - k] = (y[t] - X[t] @ beta) / math.sqrt(1.0 + z @ z)

    scale = max(float(np.max(np.abs(y))), 1.0)
    w[np.abs(w) <= RECURSIVE_ZERO_TOLERANCE * scale] = 0.0
    return w


def _stability_verdict(path, lower, upper) -> StabilityVerdict:
    inside = all(lo < s < hi for s, lo, hi in zip(path, lower, upper))
    return StabilityVerdict.STABLE if inside else StabilityVerdict.UNSTABLE


def cusum(y, X, level: Union[str, float] = "5%") -> StabilityPath:
    """
    CUSUM of recursive residuals scaled by their standard deviation, against
    the band +-a [sqrt(T-k) + 2 (t-k)/sqrt(T-k)].
    """
    label = normalize_level(level)
    if label not in CUSUM_CRITICAL_VALUES:
        raise CriticalValueError(f"No CUSUM constant at {label}")
    a = CUSUM_CRITICAL_VALUES[label]

    X = np.asarray(X, dtype=float)
    k = X.shape[1] if X.ndim == 2 else 1
    w = recursive_residuals(y, X)
    n = w.shape[0]

    sigma = float(np.std(w, ddof=1)) if n > 1 else 0.0
    path = np.cumsum(w) / sigma if sigma > 0 else np.zeros(n)

    r = np.arange(1, n + 1, dtype=float)
    root = math.sqrt(n)
    upper = a * (root + 2.0 * r / root)
    times = tuple(range(k + 1, k + n + 1))
    return StabilityPath(
        name="CUSUM",
        times=times,
        statistic=tuple(float(v) for v in path),
        lower=tuple(float(v) for v in -upper),
        upper=tuple(float(v) for v in upper),
        verdict=_stability_verdict(path, -upper, upper),
        level=label,
    )


def _upper_band_probability(n: int, c: float) -> float:
    """P(U_(i) <= i/(n+1) + c for all i) for n uniform order statistics (Steck determinant)."""
    b = np.minimum(1.0, np.arange(1, n + 1) / (n + 1.0) + c)
    M = np.zeros((n, n))
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            d = j - i + 1
            M[i, j] = math.exp(d * math.log(b[i]) - gammaln(d + 1)) if b[i] > 0 else (1.0 if d == 0 else 0.0)
    sign, logdet = np.linalg.slogdet(M)
    if sign <= 0:
        return 0.0
    return float(math.exp(gammaln(n + 1) + logdet))


@lru_cache(maxsize=None)
def _exact_c0(n: int, one_sided: float) -> float:
    if n == 1:
        return 0.5 - one_sided
    return brentq(lambda c: _upper_band_probability(n, c) - (1.0 - one_sided), 1e-9, 1.0, xtol=1e-12)


def durbin_c0(n: float, level: Union[str, float] = "5%") -> float:
    """
    Critical constant for the CUSUM-of-squares band, n = (T - k)/2 - 1.

    For n up to 30 the constant is the exact quantile of the largest deviation
    of uniform order statistics from their expectation line; half-integer n
    interpolates linearly between neighbours. Larger n use the Edgerton-Wells
    response surface.
    """
    label = normalize_level(level)
    if label not in EDGERTON_WELLS:
        raise CriticalValueError(f"No CUSUM-of-squares constant at {label}")
    if n < 1:
        raise SampleTooShortError(f"CUSUM of squares needs n >= 1, got {n}")

    if n > EXACT_C0_MAX_N:
        a, b, c = EDGERTON_WELLS[label]
        return a / math.sqrt(n) + b / n + c / n ** 1.5

    one_sided = float(label.rstrip("%")) / 200.0
    lo = int(math.floor(n))
    hi = int(math.ceil(n))
    if lo == hi:
        return _exact_c0(lo, one_sided)
    weight = n - lo
    return (1.0 - weight) * _exact_c0(lo, one_sided) + weight * _exact_c0(hi, one_sided)


def cusumsq(y, X, level: Union[str, float] = "5%") -> StabilityPath:
    """
    Cumulative share of squared recursive residuals against
    (t-k)/(T-k) +- c0 with c0 = durbin_c0((T-k)/2 - 1, level).
    """
    label = normalize_level(level)
    X = np.asarray(X, dtype=float)
    k = X.shape[1] if X.ndim == 2 else 1
    w = recursive_residuals(y, X)
    n = w.shape[0]

    total = float(w @ w)
    if total <= 0:
        raise DegenerateFitError("All recursive residuals are zero; CUSUM of squares is undefined")
    if n < 10:
        logger.warning("CUSUM of squares on %d recursive residuals; band is wide", n)

    path = np.cumsum(w ** 2) / total
    path[-1] = 1.0
    c0 = durbin_c0(0.5 * n - 1.0, label)
    line = np.arange(1, n + 1, dtype=float) / n
    lower, upper = line - c0, line + c0
    return StabilityPath(
        name="CUSUMSQ",
        times=tuple(range(k + 1, k + n + 1)),
        statistic=tuple(float(v) for v in path),
        lower=tuple(float(v) for v in lower),
        upper=tuple(float(v) for v in upper),
        verdict=_stability_verdict(path, lower, upper),
        level=label,
    )
