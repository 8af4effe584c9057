"""Ground-truth path simulation for the GARCH model family.

The generative recursions use the same arithmetic, in the same order, as
:func:`volcast.garch.variance_filter`, so a filter run over a simulated
path's innovations with the true parameters reproduces the stored
variance path bit-for-bit from the second retained step onward. For
EGARCH this requires one subtlety: the recursion carries log-variance as
state, and at the burn-in boundary the carried value is re-derived as
``log(sigma2)`` so the recorded window starts exactly like a filter
initialized with the first retained variance.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np
from numba import njit

from .distributions import make_distribution
from .errors import ValidationError
from .garch import (
    FitOptions,
    FitResult,
    GarchParams,
    MeanModel,
    ModelSpec,
    VarianceModel,
    fit,
    long_run_variance,
    param_names,
)
from .timeseries import ReturnKind, ReturnSeries

DEFAULT_BURN_IN = 500
_BASE_DATE = dt.date(2015, 1, 5)  # a Monday


def synthetic_trading_dates(count: int, start: dt.date = _BASE_DATE) -> tuple[dt.date, ...]:
    """Consecutive weekdays starting at ``start`` (itself moved off a weekend)."""
    dates = []
    day = start
    while day.weekday() >= 5:
        day += dt.timedelta(days=1)
    while len(dates) < count:
        if day.weekday() < 5:
            dates.append(day)
        day += dt.timedelta(days=1)
    return tuple(dates)


@dataclass(frozen=True)
class SimulatedPath:
    """A synthetic return path with its generating truth attached.

    ``innovations`` holds the exact eps values fed through the recursion;
    ``returns.values`` equals mu + innovations, which is not bit-identical
    to the innovations whenever mu != 0.
    """

    returns: ReturnSeries
    true_sigma: np.ndarray
    true_sigma2: np.ndarray
    innovations: np.ndarray
    params: GarchParams
    spec: ModelSpec
    seed: int
    burn_in: int

    def __post_init__(self):
        for name in ("true_sigma", "true_sigma2", "innovations"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@njit(cache=True)
def _sim_garch11(z, omega, alpha, beta, sig2_0, burn):
    total = z.size
    eps = np.empty(total)
    sig2 = np.empty(total)
    s2 = sig2_0
    for t in range(total):
        sig2[t] = s2
        e = z[t] * np.sqrt(s2)
        eps[t] = e
        s2 = omega + alpha * e * e + beta * s2
    return eps[burn:], sig2[burn:]


@njit(cache=True)
def _sim_gjr(z, omega, alpha, gamma, beta, sig2_0, burn):
    total = z.size
    eps = np.empty(total)
    sig2 = np.empty(total)
    s2 = sig2_0
    for t in range(total):
        sig2[t] = s2
        e = z[t] * np.sqrt(s2)
        eps[t] = e
        nxt = omega + alpha * e * e + beta * s2
        if e < 0.0:
            nxt += gamma * e * e
        s2 = nxt
    return eps[burn:], sig2[burn:]


@njit(cache=True)
def _sim_egarch(z, omega, alpha, gamma, beta, log_s2_0, burn, abs_mom):
    total = z.size
    eps = np.empty(total)
    sig2 = np.empty(total)
    log_s2 = log_s2_0
    for t in range(total):
        s2 = np.exp(log_s2)
        if t == burn:
            # hand-over: carry exactly what a filter initialized with this
            # variance would carry
            log_s2 = np.log(s2)
        sig2[t] = s2
        e = z[t] * np.sqrt(s2)
        eps[t] = e
        zz = e / np.sqrt(s2)
        log_s2 = omega + alpha * (abs(zz) - abs_mom) + gamma * zz + beta * log_s2
    return eps[burn:], sig2[burn:]


def simulate_path(
    spec: ModelSpec,
    params: GarchParams,
    n: int,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    symbol: str = "SIM",
) -> SimulatedPath:
    """Draw a return path of length n from the model, discarding burn_in."""
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    if burn_in < 0:
        raise ValidationError(f"burn_in must be non-negative, got {burn_in}")
    params.validate(spec)
    dist = make_distribution(spec.dist, nu=params.nu, xi=params.xi)

    rng = np.random.default_rng(seed)
    z = dist.sample(rng, burn_in + n)

    if spec.variance is VarianceModel.GARCH11:
        eps, sig2 = _sim_garch11(
            z, params.omega, params.alpha, params.beta,
            long_run_variance(spec, params), burn_in,
        )
    elif spec.variance is VarianceModel.GJR_GARCH111:
        eps, sig2 = _sim_gjr(
            z, params.omega, params.alpha, params.gamma, params.beta,
            long_run_variance(spec, params), burn_in,
        )
    else:
        eps, sig2 = _sim_egarch(
            z, params.omega, params.alpha, params.gamma, params.beta,
            params.omega / (1.0 - params.beta), burn_in, dist.abs_moment(),
        )

    mu = params.mu if spec.mean is MeanModel.CONSTANT else 0.0
    dates = synthetic_trading_dates(n + 1)
    returns = ReturnSeries(
        dates=dates[1:],
        values=mu + eps,
        kind=ReturnKind.LOG,
        source_symbol=symbol,
    )
    return SimulatedPath(
        returns=returns,
        true_sigma=np.sqrt(sig2),
        true_sigma2=sig2,
        innovations=eps,
        params=params,
        spec=spec,
        seed=seed,
        burn_in=burn_in,
    )


def path_to_ohlcv_csv(path: SimulatedPath) -> str:
    """Synthetic close prices from 100.0 in the OHLCV input schema.

    Returns are treated as percent log returns, so parsing the file and
    recomputing log returns recovers the simulated series up to float
    round-trip noise.
    """
    n = len(path.returns)
    closes = 100.0 * np.exp(np.cumsum(path.returns.values / 100.0))
    dates = synthetic_trading_dates(n + 1)
    lines = ["date,open,high,low,close,adj_close,volume"]
    for date, close in zip(dates, [100.0, *closes.tolist()]):
        c = repr(float(close))
        lines.append(f"{date.isoformat()},{c},{c},{c},{c},{c},0")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RoundTripReport:
    spec: ModelSpec
    truth: GarchParams
    fitted: FitResult
    errors: dict[str, float]

    @property
    def max_error(self) -> float:
        return max(self.errors.values())


def round_trip(
    spec: ModelSpec,
    params: GarchParams,
    n: int,
    seed: int = 0,
    burn_in: int = DEFAULT_BURN_IN,
    options: FitOptions | None = None,
) -> RoundTripReport:
    """Simulate under known truth, refit, and report componentwise error."""
    path = simulate_path(spec, params, n, burn_in=burn_in, seed=seed)
    if options is None and n < FitOptions().min_obs:
        options = FitOptions(min_obs=max(20, n))
    fitted = fit(spec, path.returns, options=options)
    errors = {
        name: abs(float(getattr(fitted.params, name)) - float(getattr(params, name)))
        for name in param_names(spec)
    }
    return RoundTripReport(spec=spec, truth=params, fitted=fitted, errors=errors)
