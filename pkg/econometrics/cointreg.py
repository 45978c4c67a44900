"""
Fully modified OLS (Phillips-Hansen) and canonical cointegrating regression (Park)
for a single cointegrating equation with a constant.

Both start from the static OLS regression y_t = x_t' b + c + u_t and use the
Bartlett long-run covariance of eta_t = [u_t, D(x_t)]:

    Gamma_j = (1/T) sum_t eta_t eta_{t-j}'
    Omega   = Gamma_0 + sum_j w_j (Gamma_j + Gamma_j')
    Lambda  = Gamma_0 + sum_j w_j Gamma_j
"""
import logging
from typing import List, Optional, Sequence, Union

import numpy as np

from econometrics.exceptions import DataValidationError, SampleTooShortError, SingularCovarianceError
from econometrics.linreg import RCOND_TOLERANCE, newey_west_lrv, ols
from models.schemas import CointMethod, CointRegFit, HacOptions, LongRunCov, RegressionFit

logger = logging.getLogger(__name__)


def _bandwidth(opts: Union[HacOptions, int, None], nobs: int) -> int:
    if opts is None:
        return HacOptions().resolve(nobs)
    if isinstance(opts, HacOptions):
        return opts.resolve(nobs)
    if int(opts) < 0:
        raise DataValidationError(f"Invalid bandwidth: {opts!r}")
    return int(opts)


def long_run_cov(u, v=None, opts: Union[HacOptions, int, None] = None) -> LongRunCov:
    """Two-sided and one-sided (lag 0 included) Bartlett long-run covariances of [u, v]."""
    u = np.asarray(u, dtype=float).ravel()
    if v is None:
        eta = u[:, None]
    else:
        v = np.asarray(v, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != u.shape[0]:
            raise DataValidationError(f"u has {u.shape[0]} rows but v has {v.shape[0]}")
        eta = np.column_stack([u, v])

    nobs = eta.shape[0]
    if nobs < 2:
        raise DataValidationError("Long-run covariance needs at least 2 observations")
    bandwidth = _bandwidth(opts, nobs)

    omega = newey_west_lrv(eta, bandwidth)
    sigma = eta.T @ eta / nobs
    lam = sigma.copy()
    for j in range(1, bandwidth + 1):
        lam += (1.0 - j / (bandwidth + 1.0)) * (eta[j:].T @ eta[:-j] / nobs)

    return LongRunCov(omega=omega, lambda_=lam, sigma=sigma, bandwidth=bandwidth)


def _inverse(matrix: np.ndarray, label: str) -> np.ndarray:
    s = np.linalg.svd(matrix, compute_uv=False)
    if s.size == 0 or s[0] == 0 or s[-1] / s[0] < RCOND_TOLERANCE:
        raise SingularCovarianceError(f"{label} is singular")
    return np.linalg.inv(matrix)


class _Setup:
    """Validated inputs and the first-stage static regression shared by both estimators."""

    def __init__(self, y, X, names: Optional[Sequence[str]]):
        self.y = np.asarray(y, dtype=float).ravel()
        X = np.asarray(X, dtype=float)
        self.x = X[:, None] if X.ndim == 1 else X
        self.nobs, self.kx = self.x.shape
        if self.y.shape[0] != self.nobs:
            raise DataValidationError(f"y has {self.y.shape[0]} rows but X has {self.nobs}")
        if self.nobs <= self.kx + 2:
            raise SampleTooShortError(f"Cointegrating regression needs T > k + 2 (T={self.nobs}, k={self.kx})")
        if names is None:
            names = [f"x{i}" for i in range(self.kx)]
        if len(names) != self.kx:
            raise DataValidationError("One name per regressor is required")
        self.names = tuple(names) + ("C",)
        self.z = np.column_stack([self.x, np.ones(self.nobs)])
        self.first_stage: RegressionFit = ols(self.y, self.z, names=self.names)

    def eta(self) -> np.ndarray:
        return np.column_stack([self.first_stage.residuals[1:], np.diff(self.x, axis=0)])

    def covariance(self, opts, lrc: Optional[LongRunCov]) -> LongRunCov:
        if lrc is not None:
            return lrc
        eta = self.eta()
        return long_run_cov(eta[:, 0], eta[:, 1:], opts)

    def r_squared(self, params: np.ndarray) -> float:
        resid = self.y - self.z @ params
        tss = float(np.sum((self.y - self.y.mean()) ** 2))
        return 1.0 - float(resid @ resid) / tss if tss > 0 else 0.0


def _degenerate(setup: _Setup, method: CointMethod, bandwidth: int) -> CointRegFit:
    message = "Static regression fits exactly; coefficients are exact and standard errors are zero"
    logger.warning("%s: %s", method.value, message)
    k = len(setup.names)
    return CointRegFit(
        method=method,
        names=setup.names,
        coefficients=setup.first_stage.coefficients.copy(),
        std_errors=np.zeros(k),
        t_stats=np.full(k, np.nan),
        covariance=np.zeros((k, k)),
        bandwidth=bandwidth,
        n_obs=setup.nobs,
        omega_112=0.0,
        r_squared=1.0,
        degenerate=True,
        warnings=(message,),
    )


def _finish(
    setup: _Setup,
    method: CointMethod,
    params: np.ndarray,
    zpz_inv: np.ndarray,
    omega_112: float,
    lrc: LongRunCov,
    n_eff: int,
    df_adjust: bool,
) -> CointRegFit:
    if df_adjust:
        omega_112 *= n_eff / (n_eff - len(params))
    warnings: List[str] = []
    if omega_112 < 0:
        warnings.append(f"Conditional long-run variance {omega_112:.3e} is negative; clipped to zero")
        omega_112 = 0.0
    covariance = omega_112 * zpz_inv
    covariance = 0.5 * (covariance + covariance.T)
    se = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = np.where(se > 0, params / np.where(se > 0, se, 1.0), np.nan)
    return CointRegFit(
        method=method,
        names=setup.names,
        coefficients=params,
        std_errors=se,
        t_stats=t_stats,
        covariance=covariance,
        bandwidth=lrc.bandwidth,
        n_obs=n_eff,
        omega_112=omega_112,
        r_squared=setup.r_squared(params),
        degenerate=bool(np.any(se == 0)),
        warnings=tuple(warnings),
    )


def fmols(
    y,
    X,
    names: Optional[Sequence[str]] = None,
    opts: Union[HacOptions, int, None] = None,
    df_adjust: bool = False,
    lrc: Optional[LongRunCov] = None,
) -> CointRegFit:
    """
    Fully modified OLS.

    y+ = y - D(x) Omega22^-1 Omega21 removes the endogeneity; the serial
    correlation bias T * (Lambda12 - Omega12 Omega22^-1 Lambda22) is
    subtracted from Z'y+. The coefficient covariance is
    omega_1.2 (Z'Z)^-1 with omega_1.2 = omega11 - Omega12 Omega22^-1 Omega21.
    """
    setup = _Setup(y, X, names)
    if setup.first_stage.exact_fit and lrc is None:
        return _degenerate(setup, CointMethod.FMOLS, _bandwidth(opts, setup.nobs - 1))

    cov = setup.covariance(opts, lrc)
    omega_12 = cov.omega_12
    omega_22_inv = _inverse(cov.omega_22, "Omega22 (long-run covariance of the regressor innovations)")

    eta_2 = np.diff(setup.x, axis=0)
    y_plus = setup.y[1:] - eta_2 @ omega_22_inv @ omega_12.ravel()
    lambda_12_plus = cov.lambda_12 - omega_12 @ omega_22_inv @ cov.lambda_22

    z = setup.z[1:]
    n_eff = z.shape[0]
    bias = np.zeros(z.shape[1])
    bias[: setup.kx] = lambda_12_plus.ravel()
    zpz_inv = np.linalg.inv(z.T @ z)
    params = zpz_inv @ (z.T @ y_plus - n_eff * bias)

    omega_112 = float(cov.omega_11 - (omega_12 @ omega_22_inv @ omega_12.T).item())
    logger.debug("FMOLS bandwidth %d, omega_1.2 %.4g", cov.bandwidth, omega_112)
    return _finish(setup, CointMethod.FMOLS, params, zpz_inv, omega_112, cov, n_eff, df_adjust)


def ccr(
    y,
    X,
    names: Optional[Sequence[str]] = None,
    opts: Union[HacOptions, int, None] = None,
    df_adjust: bool = False,
    lrc: Optional[LongRunCov] = None,
) -> CointRegFit:
    """
    Canonical cointegrating regression.

    x* = x - eta Sigma^-1 Lambda2 and
    y* = y - eta (Sigma^-1 Lambda2 b + [0, Omega22^-1 Omega21]'), with b the
    static OLS slopes; OLS of y* on [x*, 1] gives the estimates and
    omega_1.2 (Z*'Z*)^-1 their covariance.
    """
    setup = _Setup(y, X, names)
    if setup.first_stage.exact_fit and lrc is None:
        return _degenerate(setup, CointMethod.CCR, _bandwidth(opts, setup.nobs - 1))

    cov = setup.covariance(opts, lrc)
    omega_12 = cov.omega_12
    omega_22_inv = _inverse(cov.omega_22, "Omega22 (long-run covariance of the regressor innovations)")
    sigma_inv = _inverse(cov.sigma, "Sigma (contemporaneous covariance of [u, D(x)])")

    eta = setup.eta()
    lambda_2 = cov.lambda_[:, 1:]
    beta = setup.first_stage.coefficients[: setup.kx]

    x_star = setup.x[1:] - eta @ (sigma_inv @ lambda_2)
    shift = sigma_inv @ lambda_2 @ beta
    shift[1:] += omega_22_inv @ omega_12.ravel()
    y_star = setup.y[1:] - eta @ shift

    z_star = np.column_stack([x_star, np.ones(x_star.shape[0])])
    transformed = ols(y_star, z_star, names=setup.names)
    params = transformed.coefficients
    zpz_inv = np.linalg.inv(z_star.T @ z_star)

    omega_112 = float(cov.omega_11 - (omega_12 @ omega_22_inv @ omega_12.T).item())
    logger.debug("CCR bandwidth %d, omega_1.2 %.4g", cov.bandwidth, omega_112)
    return _finish(setup, CointMethod.CCR, params, zpz_inv, omega_112, cov, z_star.shape[0], df_adjust)
