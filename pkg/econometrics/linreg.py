"""
Least-squares core: QR-based OLS with classical or Newey-West covariance,
Bartlett long-run variance, information criteria, restriction F-tests and
distribution tail probabilities.
"""
import logging
import math
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as scl
import scipy.stats as scs

from econometrics.exceptions import (
    DataValidationError,
    DegenerateFitError,
    RankDeficiencyError,
    SampleTooShortError,
    SeriesMismatchError,
)
from models.schemas import FTestResult, HacOptions, InformationCriteria, RegressionFit

logger = logging.getLogger(__name__)

RCOND_TOLERANCE = 1e-12
EXACT_FIT_TOLERANCE = 1e-20


def stack_columns(columns: Iterable[Tuple[str, np.ndarray]]) -> Tuple[np.ndarray, Tuple[str, ...]]:
    """Build a design matrix from (name, column) pairs."""
    pairs = list(columns)
    if not pairs:
        raise DataValidationError("Design matrix needs at least one column")
    names = tuple(name for name, _ in pairs)
    X = np.column_stack([np.asarray(col, dtype=float) for _, col in pairs])
    return X, names


def automatic_bandwidth(nobs: int) -> int:
    """Newey-West plug-in: floor(4 (T/100)^(2/9))."""
    return HacOptions().resolve(nobs)


def _resolve_bandwidth(opts: Union[HacOptions, int, None], nobs: int) -> int:
    if opts is None:
        return automatic_bandwidth(nobs)
    if isinstance(opts, HacOptions):
        return opts.resolve(nobs)
    if isinstance(opts, (int, np.integer)) and opts >= 0:
        return int(opts)
    raise DataValidationError(f"Invalid bandwidth: {opts!r}")


def newey_west_lrv(u, opts: Union[HacOptions, int, None] = None) -> Union[float, np.ndarray]:
    """
    Bartlett-kernel long-run (co)variance about zero.

    omega = G0 + sum_{j=1..L} (1 - j/(L+1)) (Gj + Gj'), Gj = (1/T) sum_t u_t u_{t-j}'.
    A vector input returns a float, a T x m matrix returns an m x m matrix.
    """
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 1
    if scalar:
        arr = arr[:, None]
    nobs = arr.shape[0]
    if nobs < 2:
        raise DataValidationError("Long-run variance needs at least 2 observations")

    bandwidth = _resolve_bandwidth(opts, nobs)
    if bandwidth >= nobs:
        raise DataValidationError(f"Bandwidth {bandwidth} must be below the sample size {nobs}")

    omega = arr.T @ arr / nobs
    for j in range(1, bandwidth + 1):
        gamma = arr[j:].T @ arr[:-j] / nobs
        omega += (1.0 - j / (bandwidth + 1.0)) * (gamma + gamma.T)

    if scalar:
        return float(omega[0, 0])
    return 0.5 * (omega + omega.T)


def ols(
    y,
    X,
    names: Optional[Sequence[str]] = None,
    hac: Optional[HacOptions] = None,
) -> RegressionFit:
    """
    Least squares through a thin QR decomposition.

    Raises RankDeficiencyError when the reciprocal condition number of X
    falls below 1e-12. With `hac` the coefficient covariance is the
    Newey-West sandwich instead of s^2 (X'X)^-1.
    """
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    nobs, nparams = X.shape
    if nobs != y.shape[0]:
        raise DataValidationError(f"y has {y.shape[0]} rows but X has {nobs}")
    if nobs <= nparams:
        raise SampleTooShortError(f"{nobs} observations cannot identify {nparams} parameters")
    if names is None:
        names = tuple(f"x{i}" for i in range(nparams))
    names = tuple(names)
    if len(names) != nparams:
        raise DataValidationError("One name per design column is required")

    singular_values = np.linalg.svd(X, compute_uv=False)
    rcond = singular_values[-1] / singular_values[0] if singular_values[0] > 0 else 0.0
    if rcond < RCOND_TOLERANCE:
        raise RankDeficiencyError(
            f"Design matrix is rank deficient (reciprocal condition number {rcond:.3e}); columns {list(names)}"
        )

    Q, R = scl.qr(X, mode="economic")
    beta = scl.solve_triangular(R, Q.T @ y)
    fitted = X @ beta
    residuals = y - fitted
    rss = float(residuals @ residuals)
    tss = float(np.sum((y - y.mean()) ** 2))
    exact_fit = rss <= EXACT_FIT_TOLERANCE * max(float(y @ y), 1.0)

    R_inv = scl.solve_triangular(R, np.eye(nparams))
    xtx_inv = R_inv @ R_inv.T

    if hac is None:
        covariance = (rss / (nobs - nparams)) * xtx_inv
        cov_type = "classical"
    else:
        bandwidth = hac.resolve(nobs)
        meat = nobs * newey_west_lrv(X * residuals[:, None], bandwidth)
        covariance = xtx_inv @ meat @ xtx_inv
        cov_type = f"hac(bartlett, {bandwidth})"
    covariance = 0.5 * (covariance + covariance.T)

    if exact_fit:
        logger.debug("Exact fit: rss=%.3e on %d observations", rss, nobs)

    return RegressionFit(
        coefficients=beta,
        covariance=covariance,
        residuals=residuals,
        fitted=fitted,
        y=y,
        design=X,
        names=names,
        rss=rss,
        tss=tss,
        n_obs=nobs,
        n_params=nparams,
        exact_fit=exact_fit,
        cov_type=cov_type,
    )


def info_criteria(fit: RegressionFit) -> InformationCriteria:
    """Concentrated-likelihood AIC, SIC and HQ; -inf with the exact-fit flag when rss is zero."""
    nobs, k = fit.n_obs, fit.n_params
    if fit.exact_fit or fit.rss <= 0:
        logger.warning("Information criteria undefined for an exact fit; returning -inf")
        return InformationCriteria(aic=-math.inf, sic=-math.inf, hq=-math.inf, exact_fit=True)
    scale = fit.log_sigma2
    return InformationCriteria(
        aic=scale + 2.0 * k / nobs,
        sic=scale + k * math.log(nobs) / nobs,
        hq=scale + 2.0 * k * math.log(math.log(nobs)) / nobs,
    )


def f_statistic(rss_restricted: float, rss_unrestricted: float, q: int, df_resid: int) -> float:
    """((rss_r - rss_u)/q) / (rss_u/df_resid)."""
    if q <= 0:
        raise DataValidationError("Number of restrictions must be positive")
    if df_resid <= 0:
        raise SampleTooShortError("Unrestricted model has no residual degrees of freedom")
    gain = rss_restricted - rss_unrestricted
    if gain < -1e-10 * max(rss_restricted, rss_unrestricted, 1e-300):
        raise DataValidationError(
            f"Restricted rss {rss_restricted:.6g} is below unrestricted rss {rss_unrestricted:.6g}"
        )
    gain = max(gain, 0.0)
    if gain == 0.0:
        return 0.0
    if rss_unrestricted <= 0:
        raise DegenerateFitError("Unrestricted model fits exactly; F statistic is unbounded")
    return (gain / q) / (rss_unrestricted / df_resid)


def wald_f(fit_unrestricted: RegressionFit, fit_restricted: RegressionFit, q: int) -> FTestResult:
    """F test of q linear restrictions from the two residual sums of squares."""
    if fit_unrestricted.n_obs != fit_restricted.n_obs or not np.array_equal(fit_unrestricted.y, fit_restricted.y):
        raise SeriesMismatchError("Restricted and unrestricted fits use different samples or dependent variables")
    df_den = fit_unrestricted.df_resid
    statistic = f_statistic(fit_restricted.rss, fit_unrestricted.rss, q, df_den)
    return FTestResult(
        statistic=statistic,
        p_value=pvalue("f", statistic, (q, df_den)),
        df_num=q,
        df_den=df_den,
    )


def pvalue(dist: str, stat: float, df=None) -> float:
    """
    Tail probability of `stat`.

    normal and t are two-sided; chi2 and f are upper-tail. `df` is an integer
    for t and chi2 and a (numerator, denominator) pair for f.
    """
    if stat is None or math.isnan(stat):
        raise DataValidationError("Test statistic is NaN")

    if dist == "normal":
        p = 2.0 * scs.norm.sf(abs(stat))
    elif dist == "t":
        _check_df(df)
        p = 2.0 * scs.t.sf(abs(stat), df)
    elif dist == "chi2":
        _check_df(df)
        p = 1.0 if stat <= 0 else scs.chi2.sf(stat, df)
    elif dist == "f":
        try:
            dfn, dfd = df
        except (TypeError, ValueError):
            raise DataValidationError("F distribution needs (numerator, denominator) degrees of freedom")
        _check_df(dfn)
        _check_df(dfd)
        p = 1.0 if stat <= 0 else scs.f.sf(stat, dfn, dfd)
    else:
        raise DataValidationError(f"Unknown distribution: {dist}")

    return float(min(max(p, 0.0), 1.0))


def _check_df(df) -> None:
    if df is None or df <= 0:
        raise DataValidationError(f"Degrees of freedom must be positive, got {df!r}")
