"""Shared test utilities: independent oracles and simulators.

The likelihood oracle re-derives the variance path with a plain Python
loop and evaluates densities through scipy.stats, deliberately avoiding
the package's own vectorized code paths.
"""

import datetime as dt
import math

import numpy as np
from scipy import stats
from scipy.special import gamma as gamma_fn

from volcast.distributions import DistKind
from volcast.garch import GarchParams, MeanModel, ModelSpec, VarianceModel
from volcast.timeseries import ReturnKind, ReturnSeries


def make_returns(values, start=dt.date(2012, 1, 2), symbol="SIM"):
    values = np.asarray(values, dtype=float)
    dates = tuple(start + dt.timedelta(days=i) for i in range(values.size))
    return ReturnSeries(dates=dates, values=values, kind=ReturnKind.LOG, source_symbol=symbol)


def naive_log_density(kind: DistKind, z: np.ndarray, nu=None, xi=None) -> np.ndarray:
    """Density evaluation through scipy.stats, not the package formulas."""
    z = np.asarray(z, dtype=np.float64)
    if kind is DistKind.NORMAL:
        return stats.norm.logpdf(z)
    if kind is DistKind.STUDENT_T:
        s = math.sqrt(nu / (nu - 2.0))
        return stats.t.logpdf(z * s, nu) + math.log(s)
    # Hansen skew-t as a scaled piecewise t density
    c = gamma_fn((nu + 1.0) / 2.0) / (
        math.sqrt(math.pi * (nu - 2.0)) * gamma_fn(nu / 2.0)
    )
    a = 4.0 * xi * c * (nu - 2.0) / (nu - 1.0)
    b = math.sqrt(1.0 + 3.0 * xi * xi - a * a)
    s = math.sqrt(nu / (nu - 2.0))
    y = (b * z + a) / np.where(b * z + a < 0.0, 1.0 - xi, 1.0 + xi)
    return math.log(b) + math.log(s) + stats.t.logpdf(y * s, nu)


def naive_abs_moment(kind: DistKind, nu=None, xi=None) -> float:
    if kind is DistKind.NORMAL:
        return math.sqrt(2.0 / math.pi)
    if kind is DistKind.STUDENT_T:
        return (
            2.0
            * math.sqrt(nu - 2.0)
            * gamma_fn((nu + 1.0) / 2.0)
            / (math.sqrt(math.pi) * (nu - 1.0) * gamma_fn(nu / 2.0))
        )
    from scipy import integrate

    f = lambda z: abs(z) * math.exp(float(naive_log_density(kind, z, nu=nu, xi=xi)))
    lo, _ = integrate.quad(f, -np.inf, 0.0, limit=200)
    hi, _ = integrate.quad(f, 0.0, np.inf, limit=200)
    return lo + hi


def naive_loglik(spec: ModelSpec, params: GarchParams, data, abs_mom=None) -> float:
    """Term-by-term recomputation of the conditional log-likelihood.

    ``abs_mom`` overrides E|Z| for EGARCH; by default it is recomputed
    independently (closed form or quadrature).
    """
    x = np.asarray(getattr(data, "values", data), dtype=np.float64)
    mu = params.mu if spec.mean is MeanModel.CONSTANT else 0.0
    eps = [float(v) - mu for v in x]
    n = len(eps)
    mean_eps = sum(eps) / n
    init_var = sum((e - mean_eps) ** 2 for e in eps) / (n - 1)

    sig2 = [init_var]
    if spec.variance is VarianceModel.GARCH11:
        for t in range(1, n):
            sig2.append(
                params.omega + params.alpha * eps[t - 1] ** 2 + params.beta * sig2[t - 1]
            )
    elif spec.variance is VarianceModel.GJR_GARCH111:
        for t in range(1, n):
            v = params.omega + params.alpha * eps[t - 1] ** 2 + params.beta * sig2[t - 1]
            if eps[t - 1] < 0.0:
                v += params.gamma * eps[t - 1] ** 2
            sig2.append(v)
    else:
        if abs_mom is None:
            abs_mom = naive_abs_moment(spec.dist, nu=params.nu, xi=params.xi)
        log_s2 = math.log(init_var)
        for t in range(1, n):
            z = eps[t - 1] / math.sqrt(sig2[t - 1])
            log_s2 = (
                params.omega
                + params.alpha * (abs(z) - abs_mom)
                + params.gamma * z
                + params.beta * log_s2
            )
            sig2.append(math.exp(log_s2))

    sig2 = np.asarray(sig2)
    z = np.asarray(eps) / np.sqrt(sig2)
    dens = naive_log_density(spec.dist, z, nu=params.nu, xi=params.xi)
    return float(np.sum(dens) - 0.5 * np.sum(np.log(sig2)))


def simulate_returns(spec_variance: VarianceModel, params: GarchParams, n: int, seed: int, dist_kind: DistKind = DistKind.NORMAL, burn: int = 500, mu: float = 0.0) -> np.ndarray:
    """Plain-loop simulator for recovery tests, independent of the
    package's simulate module."""
    from volcast.distributions import make_distribution

    dist = make_distribution(dist_kind, nu=params.nu, xi=params.xi)
    rng = np.random.default_rng(seed)
    z = dist.sample(rng, n + burn)
    abs_mom = dist.abs_moment()

    total = n + burn
    eps = np.empty(total)
    if spec_variance is VarianceModel.EGARCH111:
        log_s2 = params.omega / (1.0 - params.beta)
        for t in range(total):
            s2 = math.exp(log_s2)
            eps[t] = z[t] * math.sqrt(s2)
            zt = eps[t] / math.sqrt(s2)
            log_s2 = (
                params.omega
                + params.alpha * (abs(zt) - abs_mom)
                + params.gamma * zt
                + params.beta * log_s2
            )
    else:
        if spec_variance is VarianceModel.GARCH11:
            s2 = params.omega / (1.0 - params.alpha - params.beta)
        else:
            p_neg = dist.prob_negative()
            s2 = params.omega / (
                1.0 - params.alpha - params.gamma * p_neg - params.beta
            )
        for t in range(total):
            eps[t] = z[t] * math.sqrt(s2)
            nxt = params.omega + params.alpha * eps[t] ** 2 + params.beta * s2
            if spec_variance is VarianceModel.GJR_GARCH111 and eps[t] < 0.0:
                nxt += params.gamma * eps[t] ** 2
            s2 = nxt
    return mu + eps[burn:]


def random_feasible_params(spec: ModelSpec, rng: np.random.Generator) -> GarchParams:
    """Draw parameters uniformly from a comfortably feasible region."""
    mu = float(rng.uniform(-0.1, 0.1)) if spec.mean is MeanModel.CONSTANT else None
    nu = float(rng.uniform(4.5, 30.0)) if spec.dist is not DistKind.NORMAL else None
    xi = float(rng.uniform(-0.7, 0.7)) if spec.dist is DistKind.SKEW_T else None
    if spec.variance is VarianceModel.GARCH11:
        alpha = float(rng.uniform(0.01, 0.25))
        beta = float(rng.uniform(0.4, 0.95 - alpha))
        return GarchParams(
            omega=float(rng.uniform(0.01, 0.5)), alpha=alpha, beta=beta,
            mu=mu, nu=nu, xi=xi,
        )
    if spec.variance is VarianceModel.GJR_GARCH111:
        alpha = float(rng.uniform(0.01, 0.15))
        gamma = float(rng.uniform(0.0, 0.2))
        beta = float(rng.uniform(0.4, 0.92 - alpha - gamma / 2.0))
        return GarchParams(
            omega=float(rng.uniform(0.01, 0.5)), alpha=alpha, beta=beta,
            gamma=gamma, mu=mu, nu=nu, xi=xi,
        )
    return GarchParams(
        omega=float(rng.uniform(-0.2, 0.2)),
        alpha=float(rng.uniform(0.0, 0.3)),
        beta=float(rng.uniform(-0.9, 0.95)),
        gamma=float(rng.uniform(-0.25, 0.25)),
        mu=mu, nu=nu, xi=xi,
    )
