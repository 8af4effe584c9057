"""Conditional-variance models and their maximum-likelihood estimation.

Three variance recursions over mean-adjusted residuals eps_t, each started
from the sample variance of eps:

* GARCH(1,1):      sig2_t = omega + alpha eps_{t-1}^2 + beta sig2_{t-1}
* GJR-GARCH(1,1,1): adds gamma eps_{t-1}^2 1[eps_{t-1} < 0]
* EGARCH(1,1,1):   ln sig2_t = omega + alpha (|Z_{t-1}| - E|Z|)
                               + gamma Z_{t-1} + beta ln sig2_{t-1}

with Z = eps/sig. The mean is either a constant mu or fixed at zero, and
the standardized residuals follow one of the families in
:mod:`volcast.distributions`. Estimation maximizes the exact conditional
log-likelihood

    sum_t [ log_density(eps_t / sig_t) - 0.5 ln sig2_t ]

over a transformed, unconstrained parameter space (log for omega, logistic
for the stationarity region), with a derivative-free simplex stage
followed by a quasi-Newton polish. Standard errors come from the inverse
numerical Hessian on the natural parameters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import optimize

from .distributions import DistKind, ResidualDistribution, make_distribution
from .errors import (
    ConvergenceError,
    InsufficientDataError,
    NumericError,
    ValidationError,
)


class MeanModel(enum.Enum):
    CONSTANT = "constant"
    ZERO = "zero"


class VarianceModel(enum.Enum):
    GARCH11 = "garch"
    GJR_GARCH111 = "gjr"
    EGARCH111 = "egarch"


@dataclass(frozen=True)
class ModelSpec:
    mean: MeanModel
    variance: VarianceModel
    dist: DistKind


@dataclass(frozen=True)
class GarchParams:
    """Natural-scale parameters of one model spec.

    ``mu`` is present only for a constant mean; ``gamma`` only for the
    asymmetric variants; ``nu``/``xi`` only for t and skew-t residuals.
    """

    omega: float
    alpha: float
    beta: float
    mu: float | None = None
    gamma: float | None = None
    nu: float | None = None
    xi: float | None = None

    def validate(self, spec: ModelSpec) -> None:
        if spec.mean is MeanModel.CONSTANT:
            if self.mu is None or not math.isfinite(self.mu):
                raise ValidationError("constant mean needs a finite mu")
        elif self.mu is not None:
            raise ValidationError("zero-mean model must not carry mu")

        v = spec.variance
        if v in (VarianceModel.GARCH11, VarianceModel.GJR_GARCH111):
            if not (self.omega > 0.0):
                raise ValidationError(f"omega must be positive, got {self.omega}")
            if self.alpha < 0.0 or self.beta < 0.0:
                raise ValidationError("alpha and beta must be non-negative")
        if v is VarianceModel.GARCH11:
            if self.gamma is not None:
                raise ValidationError("GARCH(1,1) has no gamma")
            if not (self.alpha + self.beta < 1.0):
                raise ValidationError(
                    f"alpha + beta = {self.alpha + self.beta} violates stationarity"
                )
        elif v is VarianceModel.GJR_GARCH111:
            if self.gamma is None:
                raise ValidationError("GJR needs gamma")
            if self.alpha + self.gamma < 0.0:
                raise ValidationError("negative-shock response alpha + gamma < 0")
            if not (self.alpha + self.beta + self.gamma / 2.0 < 1.0):
                raise ValidationError("alpha + beta + gamma/2 violates stationarity")
        else:
            if self.gamma is None:
                raise ValidationError("EGARCH needs gamma")
            if not (abs(self.beta) < 1.0):
                raise ValidationError(
                    f"|beta| must be < 1 for log-variance stationarity, got {self.beta}"
                )

        d = spec.dist
        if d in (DistKind.STUDENT_T, DistKind.SKEW_T):
            if self.nu is None or not (self.nu > 2.0):
                raise ValidationError("t-family residuals need nu > 2")
        elif self.nu is not None:
            raise ValidationError("normal residuals carry no nu")
        if d is DistKind.SKEW_T:
            if self.xi is None or not (abs(self.xi) < 1.0):
                raise ValidationError("skew-t residuals need xi in (-1, 1)")
        elif self.xi is not None:
            raise ValidationError("only skew-t residuals carry xi")


def residual_distribution(spec: ModelSpec, params: GarchParams) -> ResidualDistribution:
    return make_distribution(spec.dist, nu=params.nu, xi=params.xi)


def param_names(spec: ModelSpec) -> tuple[str, ...]:
    names: list[str] = []
    if spec.mean is MeanModel.CONSTANT:
        names.append("mu")
    names.append("omega")
    names.append("alpha")
    if spec.variance in (VarianceModel.GJR_GARCH111, VarianceModel.EGARCH111):
        names.append("gamma")
    names.append("beta")
    if spec.dist in (DistKind.STUDENT_T, DistKind.SKEW_T):
        names.append("nu")
    if spec.dist is DistKind.SKEW_T:
        names.append("xi")
    return tuple(names)


@dataclass(frozen=True)
class FitOptions:
    min_obs: int = 250
    tol: float = 1e-8
    max_iterations: int = 500


@dataclass(frozen=True)
class FitResult:
    spec: ModelSpec
    params: GarchParams
    stderr: dict[str, float | None]
    tstat: dict[str, float | None]
    pvalue: dict[str, float | None]
    loglik: float
    aic: float
    bic: float
    dates: tuple
    cond_var: np.ndarray
    cond_vol: np.ndarray
    std_residuals: np.ndarray
    residuals: np.ndarray
    init_var: float
    iterations: int
    func_evals: int
    grad_evals: int
    n_obs: int
    inference_available: bool = True

    def __post_init__(self):
        for name in ("cond_var", "cond_vol", "std_residuals", "residuals"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "dates", tuple(self.dates))

    def to_dict(self) -> dict:
        coefs = {}
        for name in param_names(self.spec):
            coefs[name] = {
                "coef": float(getattr(self.params, name)),
                "stderr": self.stderr[name],
                "tstat": self.tstat[name],
                "pvalue": self.pvalue[name],
            }
        return {
            "mean": self.spec.mean.value,
            "variance": self.spec.variance.value,
            "dist": self.spec.dist.value,
            "params": coefs,
            "loglik": float(self.loglik),
            "aic": float(self.aic),
            "bic": float(self.bic),
            "iterations": int(self.iterations),
            "func_evals": int(self.func_evals),
            "grad_evals": int(self.grad_evals),
            "n_obs": int(self.n_obs),
            "inference_available": bool(self.inference_available),
        }


@njit(cache=True)
def _garch11_filter(eps, omega, alpha, beta, init_var):
    n = eps.size
    sig2 = np.empty(n)
    sig2[0] = init_var
    for t in range(1, n):
        v = omega + alpha * eps[t - 1] * eps[t - 1] + beta * sig2[t - 1]
        if not (np.isfinite(v) and v > 0.0):
            return sig2, t
        sig2[t] = v
    return sig2, -1


@njit(cache=True)
def _gjr_filter(eps, omega, alpha, gamma, beta, init_var):
    n = eps.size
    sig2 = np.empty(n)
    sig2[0] = init_var
    for t in range(1, n):
        e = eps[t - 1]
        v = omega + alpha * e * e + beta * sig2[t - 1]
        if e < 0.0:
            v += gamma * e * e
        if not (np.isfinite(v) and v > 0.0):
            return sig2, t
        sig2[t] = v
    return sig2, -1


@njit(cache=True)
def _egarch_filter(eps, omega, alpha, gamma, beta, init_var, abs_mom):
    n = eps.size
    sig2 = np.empty(n)
    sig2[0] = init_var
    log_s2 = np.log(init_var)
    for t in range(1, n):
        z = eps[t - 1] / np.sqrt(sig2[t - 1])
        log_s2 = omega + alpha * (abs(z) - abs_mom) + gamma * z + beta * log_s2
        v = np.exp(log_s2)
        if not (np.isfinite(v) and v > 0.0):
            return sig2, t
        sig2[t] = v
    return sig2, -1


def _filter_core(spec: ModelSpec, params: GarchParams, eps: np.ndarray, init_var: float, dist: ResidualDistribution) -> np.ndarray:
    if spec.variance is VarianceModel.GARCH11:
        sig2, bad = _garch11_filter(eps, params.omega, params.alpha, params.beta, init_var)
    elif spec.variance is VarianceModel.GJR_GARCH111:
        sig2, bad = _gjr_filter(
            eps, params.omega, params.alpha, params.gamma, params.beta, init_var
        )
    else:
        sig2, bad = _egarch_filter(
            eps,
            params.omega,
            params.alpha,
            params.gamma,
            params.beta,
            init_var,
            dist.abs_moment(),
        )
    if bad >= 0:
        raise NumericError(f"variance recursion produced a non-finite value at t={bad}")
    return sig2


def variance_filter(spec: ModelSpec, params: GarchParams, residuals, init_var: float) -> np.ndarray:
    """Run the conditional-variance recursion; sig2[0] = init_var."""
    eps = np.asarray(getattr(residuals, "values", residuals), dtype=np.float64)
    if eps.size == 0:
        raise ValidationError("residuals must be non-empty")
    if not (init_var > 0.0 and math.isfinite(init_var)):
        raise ValidationError(f"init_var must be positive, got {init_var}")
    params.validate(spec)
    dist = residual_distribution(spec, params)
    return _filter_core(spec, params, eps, init_var, dist)


def _loglik_core(spec: ModelSpec, params: GarchParams, x: np.ndarray, dist: ResidualDistribution) -> float:
    mu = params.mu if spec.mean is MeanModel.CONSTANT else 0.0
    eps = x - mu
    init_var = float(np.var(eps, ddof=1))
    if not (init_var > 0.0):
        raise NumericError("degenerate residual variance")
    sig2 = _filter_core(spec, params, eps, init_var, dist)
    z = eps / np.sqrt(sig2)
    ll = float(np.sum(dist.log_density(z)) - 0.5 * np.sum(np.log(sig2)))
    if not math.isfinite(ll):
        raise NumericError("non-finite log-likelihood")
    return ll


def log_likelihood(spec: ModelSpec, params: GarchParams, data) -> float:
    """Exact conditional log-likelihood of a return series under the model."""
    x = np.asarray(getattr(data, "values", data), dtype=np.float64)
    if x.size < 10:
        raise InsufficientDataError(f"likelihood needs at least 10 observations, got {x.size}")
    params.validate(spec)
    dist = residual_distribution(spec, params)
    return _loglik_core(spec, params, x, dist)


# ---------------------------------------------------------------------------
# unconstrained reparameterization for the optimizer


def _sigmoid(u: float) -> float:
    if u >= 0.0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def _n_free(spec: ModelSpec) -> int:
    n = 0
    if spec.mean is MeanModel.CONSTANT:
        n += 1
    n += 3 if spec.variance is VarianceModel.GARCH11 else 4
    if spec.dist in (DistKind.STUDENT_T, DistKind.SKEW_T):
        n += 1
    if spec.dist is DistKind.SKEW_T:
        n += 1
    return n


def _u_to_params(spec: ModelSpec, u: np.ndarray) -> GarchParams:
    i = 0
    mu = None
    if spec.mean is MeanModel.CONSTANT:
        mu = float(u[i])
        i += 1
    v = spec.variance
    if v is VarianceModel.GARCH11:
        omega = math.exp(u[i])
        persistence = _sigmoid(u[i + 1])
        share = _sigmoid(u[i + 2])
        alpha = persistence * share
        beta = persistence * (1.0 - share)
        gamma = None
        i += 3
    elif v is VarianceModel.GJR_GARCH111:
        omega = math.exp(u[i])
        persistence = _sigmoid(u[i + 1])
        # softmax split of the persistence budget into alpha, gamma/2, beta
        e1, e2 = math.exp(u[i + 2]), math.exp(u[i + 3])
        total = e1 + e2 + 1.0
        alpha = persistence * e1 / total
        gamma = 2.0 * persistence * e2 / total
        beta = persistence / total
        i += 4
    else:
        omega = float(u[i])
        alpha = float(u[i + 1])
        gamma = float(u[i + 2])
        beta = math.tanh(u[i + 3])
        i += 4
    nu = None
    xi = None
    if spec.dist in (DistKind.STUDENT_T, DistKind.SKEW_T):
        nu = 2.0 + 98.0 * _sigmoid(u[i])
        i += 1
    if spec.dist is DistKind.SKEW_T:
        xi = math.tanh(u[i])
        i += 1
    return GarchParams(omega=omega, alpha=alpha, beta=beta, mu=mu, gamma=gamma, nu=nu, xi=xi)


def _initial_u(spec: ModelSpec, x: np.ndarray) -> np.ndarray:
    u: list[float] = []
    if spec.mean is MeanModel.CONSTANT:
        u.append(float(np.mean(x)))
        eps = x - np.mean(x)
    else:
        eps = x
    var = float(np.var(eps, ddof=1))
    v = spec.variance
    if v is VarianceModel.GARCH11:
        alpha0, beta0 = 0.05, 0.90
        persistence = alpha0 + beta0
        u += [math.log(0.1 * var), _logit(persistence), _logit(alpha0 / persistence)]
    elif v is VarianceModel.GJR_GARCH111:
        alpha0, gamma0, beta0 = 0.05, 0.02, 0.90
        persistence = alpha0 + gamma0 / 2.0 + beta0
        w1 = alpha0 / persistence
        w2 = (gamma0 / 2.0) / persistence
        w3 = beta0 / persistence
        u += [math.log(0.1 * var), _logit(persistence), math.log(w1 / w3), math.log(w2 / w3)]
    else:
        beta0 = 0.90
        # omega sets the log-variance level: omega/(1-beta) ~ ln(var)
        u += [(1.0 - beta0) * math.log(var), 0.05, 0.0, math.atanh(beta0)]
    if spec.dist in (DistKind.STUDENT_T, DistKind.SKEW_T):
        u.append(_logit((8.0 - 2.0) / 98.0))
    if spec.dist is DistKind.SKEW_T:
        u.append(0.0)
    return np.array(u, dtype=np.float64)


def _params_to_vector(spec: ModelSpec, params: GarchParams) -> np.ndarray:
    return np.array(
        [getattr(params, name) for name in param_names(spec)], dtype=np.float64
    )


def _vector_to_params(spec: ModelSpec, vec: np.ndarray) -> GarchParams:
    kw: dict[str, float] = {}
    for name, val in zip(param_names(spec), vec):
        kw[name] = float(val)
    return GarchParams(**kw)


def _natural_nll(spec: ModelSpec, vec: np.ndarray, x: np.ndarray) -> float:
    """Negative log-likelihood on natural parameters (for the Hessian).

    Mildly infeasible points are evaluated when the recursion still yields
    positive variances, so central differences at a near-boundary optimum
    remain usable; otherwise a large penalty is returned.
    """
    try:
        params = _vector_to_params(spec, vec)
        dist = make_distribution(spec.dist, nu=params.nu, xi=params.xi)
        return -_loglik_core(spec, params, x, dist)
    except Exception:
        return 1e300


def _fd_hessian(f, x0: np.ndarray) -> np.ndarray:
    d = x0.size
    h = 1e-4 * np.maximum(np.abs(x0), 1e-2)
    hess = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            pp = x0.copy(); pp[i] += h[i]; pp[j] += h[j]
            pm = x0.copy(); pm[i] += h[i]; pm[j] -= h[j]
            mp = x0.copy(); mp[i] -= h[i]; mp[j] += h[j]
            mm = x0.copy(); mm[i] -= h[i]; mm[j] -= h[j]
            val = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j])
            hess[i, j] = val
            hess[j, i] = val
    return hess


def fit(spec: ModelSpec, data, options: FitOptions | None = None) -> FitResult:
    """Maximum-likelihood fit of the model to a return series."""
    opts = options or FitOptions()
    x = np.asarray(getattr(data, "values", data), dtype=np.float64)
    dates = tuple(getattr(data, "dates", range(x.size)))
    n = x.size
    if n < opts.min_obs:
        raise InsufficientDataError(
            f"fitting needs at least {opts.min_obs} observations, got {n}"
        )

    def nll_u(u: np.ndarray) -> float:
        try:
            params = _u_to_params(spec, u)
            dist = make_distribution(spec.dist, nu=params.nu, xi=params.xi)
            return -_loglik_core(spec, params, x, dist)
        except (NumericError, ValidationError, OverflowError):
            return 1e300

    u0 = _initial_u(spec, x)
    simplex = optimize.minimize(
        nll_u,
        u0,
        method="Nelder-Mead",
        options={"maxiter": 200 * u0.size, "xatol": 1e-5, "fatol": 1e-7},
    )
    polish = optimize.minimize(
        nll_u,
        simplex.x,
        method="BFGS",
        options={"maxiter": opts.max_iterations, "gtol": 1e-6},
    )
    best = polish if polish.fun <= simplex.fun else simplex
    iterations = int(simplex.nit) + int(polish.nit)
    func_evals = int(simplex.nfev) + int(polish.nfev)
    grad_evals = int(getattr(polish, "njev", 0))

    if not math.isfinite(best.fun) or best.fun >= 1e300:
        raise ConvergenceError("optimizer never found a finite likelihood", best=None)
    improvement = abs(simplex.fun - polish.fun) / max(1.0, abs(polish.fun))
    if not (polish.success or simplex.success) and improvement > opts.tol:
        raise ConvergenceError(
            f"no convergence after {iterations} iterations",
            best=_u_to_params(spec, best.x),
        )

    params = _u_to_params(spec, best.x)
    params.validate(spec)
    dist = make_distribution(spec.dist, nu=params.nu, xi=params.xi)
    mu = params.mu if spec.mean is MeanModel.CONSTANT else 0.0
    eps = x - mu
    init_var = float(np.var(eps, ddof=1))
    cond_var = _filter_core(spec, params, eps, init_var, dist)
    cond_vol = np.sqrt(cond_var)
    std_resid = eps / cond_vol
    loglik = float(
        np.sum(dist.log_density(std_resid)) - 0.5 * np.sum(np.log(cond_var))
    )

    names = param_names(spec)
    k = len(names)
    aic = 2.0 * k - 2.0 * loglik
    bic = k * math.log(n) - 2.0 * loglik

    theta = _params_to_vector(spec, params)
    stderr: dict[str, float | None] = {}
    inference_ok = True
    try:
        hess = _fd_hessian(lambda v: _natural_nll(spec, v, x), theta)
        cov = np.linalg.inv(hess)
        diag = np.diag(cov)
        if np.any(~np.isfinite(diag)) or np.any(diag <= 0.0):
            raise np.linalg.LinAlgError("non-positive covariance diagonal")
        ses = np.sqrt(diag)
        stderr = {name: float(se) for name, se in zip(names, ses)}
    except np.linalg.LinAlgError:
        inference_ok = False
        stderr = {name: None for name in names}

    tstat: dict[str, float | None] = {}
    pvalue: dict[str, float | None] = {}
    for name in names:
        se = stderr[name]
        if se is None or se == 0.0:
            tstat[name] = None
            pvalue[name] = None
        else:
            t = float(getattr(params, name)) / se
            tstat[name] = t
            pvalue[name] = math.erfc(abs(t) / math.sqrt(2.0))

    return FitResult(
        spec=spec,
        params=params,
        stderr=stderr,
        tstat=tstat,
        pvalue=pvalue,
        loglik=loglik,
        aic=aic,
        bic=bic,
        dates=dates,
        cond_var=cond_var,
        cond_vol=cond_vol,
        std_residuals=std_resid,
        residuals=eps,
        init_var=init_var,
        iterations=iterations,
        func_evals=func_evals,
        grad_evals=grad_evals,
        n_obs=n,
        inference_available=inference_ok,
    )


def fit_on_arma_residuals(arma_fit, spec: ModelSpec, options: FitOptions | None = None) -> FitResult:
    """Fit a zero-mean variance model to the residuals of an ARMA fit."""
    if spec.mean is not MeanModel.ZERO:
        raise ValidationError("ARMA residuals are already mean-adjusted; use a zero mean")
    return fit(spec, arma_fit.residuals, options=options)


def long_run_variance(spec: ModelSpec, params: GarchParams) -> float:
    """Unconditional variance implied by the fitted recursion.

    GARCH: omega/(1 - alpha - beta). GJR: omega/(1 - alpha - gamma P_neg
    - beta) with P_neg the fitted probability of a negative shock. EGARCH:
    exp(omega/(1 - beta)), the fixed point of the log-variance recursion.
    """
    params.validate(spec)
    if spec.variance is VarianceModel.GARCH11:
        return params.omega / (1.0 - params.alpha - params.beta)
    if spec.variance is VarianceModel.GJR_GARCH111:
        p_neg = residual_distribution(spec, params).prob_negative()
        denom = 1.0 - params.alpha - params.gamma * p_neg - params.beta
        if denom <= 0.0:
            raise NumericError("integrated variance: no finite long-run level")
        return params.omega / denom
    return math.exp(params.omega / (1.0 - params.beta))
