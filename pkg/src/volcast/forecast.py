"""Out-of-sample volatility forecasting.

Two layers: an analytic multi-step variance recursion from a fitted
model's terminal state, and a rolling driver that walks forward through
a return series in fixed-length rounds, emitting per-day volatility
forecasts either from a single fit (fixed method) or from refits on
growing history (expanding method).

The fixed method estimates parameters once on the pre-start history and
never refits; each later round only advances the variance recursion
state through the observations realized since the previous round. With
a single round the two methods therefore differ only through their
fitting convention and produce identical output when handed identical
parameter estimates.
"""

from __future__ import annotations

import datetime as dt
import enum
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import ResidualDistribution, make_distribution
from .errors import (
    ConvergenceError,
    DateRangeError,
    InsufficientDataError,
    ValidationError,
)
from .garch import (
    FitOptions,
    FitResult,
    GarchParams,
    MeanModel,
    ModelSpec,
    VarianceModel,
    fit,
    variance_filter,
)
from .timeseries import ReturnSeries, split_at

DEFAULT_WINDOW = 5
DEFAULT_REFIT_EVERY = 5
DEFAULT_MC_PATHS = 10_000


class ForecastMethod(enum.Enum):
    FIXED = "fixed"
    EXPANDING = "expanding"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class ForecastResult:
    """Volatility forecasts (daily sigma, percent) for specific dates."""

    dates: tuple
    vol_forecast: np.ndarray
    method: ForecastMethod
    window: int
    refit_every: int
    spec: ModelSpec
    skipped_rounds: tuple = ()

    def __post_init__(self):
        arr = np.asarray(self.vol_forecast, dtype=np.float64).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "vol_forecast", arr)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "skipped_rounds", tuple(self.skipped_rounds))
        if len(self.dates) != self.vol_forecast.size:
            raise ValidationError("dates and vol_forecast lengths differ")
        if not np.all(self.vol_forecast > 0):
            raise ValidationError("volatility forecasts must be positive")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValidationError("forecast dates must be strictly increasing")

    def __len__(self) -> int:
        return self.vol_forecast.size


@dataclass(frozen=True)
class RoundInfo:
    """Per-round audit record handed to the on_round callback.

    ``last_obs_date`` is the date of the newest observation whose value
    informed this round's fit or recursion state; it is always strictly
    before ``origin``.
    """

    index: int
    origin: dt.date
    n_obs_used: int
    last_obs_date: dt.date
    target_dates: tuple


def _forecast_from_state(
    spec: ModelSpec,
    params: GarchParams,
    dist: ResidualDistribution,
    eps_last: float,
    sig2_last: float,
    horizon: int,
    mc_paths: int,
    seed: int,
) -> np.ndarray:
    """Expected variance per future step from the current recursion state.

    The one-step value is a single exact filter step. Squared-innovation
    recursions then iterate the affine map v -> omega + persistence * v,
    where the asymmetric term contributes through the probability of a
    negative shock. The exponential recursion has no closed form beyond
    one step, so later steps average simulated log-variance paths.
    """
    out = np.empty(horizon)
    e = eps_last
    s2 = sig2_last
    if spec.variance is VarianceModel.EGARCH111:
        abs_mom = dist.abs_moment()
        z = e / np.sqrt(s2)
        log_v = (
            params.omega
            + params.alpha * (abs(z) - abs_mom)
            + params.gamma * z
            + params.beta * np.log(s2)
        )
        out[0] = np.exp(log_v)
        if horizon > 1:
            rng = np.random.default_rng(seed)
            draws = dist.sample(rng, mc_paths * (horizon - 1))
            draws = draws.reshape(horizon - 1, mc_paths)
            log_paths = np.full(mc_paths, log_v)
            for k in range(1, horizon):
                zk = draws[k - 1]
                log_paths = (
                    params.omega
                    + params.alpha * (np.abs(zk) - abs_mom)
                    + params.gamma * zk
                    + params.beta * log_paths
                )
                out[k] = float(np.mean(np.exp(log_paths)))
        return out

    v1 = params.omega + params.alpha * e * e + params.beta * s2
    if spec.variance is VarianceModel.GJR_GARCH111:
        if e < 0.0:
            v1 += params.gamma * e * e
        persistence = params.alpha + params.gamma * dist.prob_negative() + params.beta
    else:
        persistence = params.alpha + params.beta
    out[0] = v1
    for k in range(1, horizon):
        out[k] = params.omega + persistence * out[k - 1]
    return out


def analytic_forecast(
    result: FitResult,
    horizon: int,
    mc_paths: int = DEFAULT_MC_PATHS,
    seed: int = 0,
) -> np.ndarray:
    """Multi-step variance forecast from a fitted model's terminal state."""
    if horizon < 1:
        raise ValidationError(f"horizon must be at least 1, got {horizon}")
    dist = make_distribution(
        result.spec.dist, nu=result.params.nu, xi=result.params.xi
    )
    return _forecast_from_state(
        result.spec,
        result.params,
        dist,
        float(result.residuals[-1]),
        float(result.cond_var[-1]),
        horizon,
        mc_paths,
        seed,
    )


def _subseries(series: ReturnSeries, stop: int) -> ReturnSeries:
    return ReturnSeries(
        dates=series.dates[:stop],
        values=series.values[:stop],
        kind=series.kind,
        source_symbol=series.source_symbol,
    )


def _state_from_filter(
    spec: ModelSpec,
    params: GarchParams,
    values: np.ndarray,
    init_var: float | None = None,
) -> tuple[float, float]:
    mu = params.mu if spec.mean is MeanModel.CONSTANT else 0.0
    eps = values - mu
    if init_var is None:
        init_var = float(np.var(eps, ddof=1))
    sig2 = variance_filter(spec, params, eps, init_var)
    return float(eps[-1]), float(sig2[-1])


def rolling_forecast(
    series: ReturnSeries,
    spec: ModelSpec,
    method: ForecastMethod,
    start: dt.date,
    steps: int,
    window: int = DEFAULT_WINDOW,
    refit_every: int = DEFAULT_REFIT_EVERY,
    options: FitOptions | None = None,
    mc_paths: int = DEFAULT_MC_PATHS,
    seed: int = 0,
    on_round: Callable[[RoundInfo], None] | None = None,
) -> ForecastResult:
    """Walk forward from ``start`` emitting ``steps`` daily vol forecasts.

    Rounds advance ``refit_every`` observations at a time. The expanding
    method refits the model each round on all observations strictly
    before the round origin. The fixed method fits once on the pre-start
    history and afterwards only advances the recursion state through the
    realized observations, so every round's forecast uses the original
    parameter estimates with state set by the trailing data.

    A failed refit falls back to the most recent successful parameters
    and records the round index in ``skipped_rounds``; failure of the
    first fit propagates.
    """
    if method is ForecastMethod.ANALYTIC:
        raise ValidationError("rolling_forecast requires the fixed or expanding method")
    if steps < 1:
        raise ValidationError(f"steps must be at least 1, got {steps}")
    if refit_every < 1 or window < 1:
        raise ValidationError("window and refit_every must be at least 1")
    opts = options or FitOptions()

    before, after = split_at(series, start)
    if before is None:
        raise InsufficientDataError("no observations before the forecast start")
    if after is None:
        raise DateRangeError("no observations on or after the forecast start")
    if len(after) < steps:
        raise InsufficientDataError(
            f"need {steps} observations on or after start for target dates, "
            f"got {len(after)}"
        )
    if len(before) < opts.min_obs:
        raise InsufficientDataError(
            f"need at least {opts.min_obs} observations before start, got {len(before)}"
        )

    start_idx = len(before)
    target_dates = tuple(after.dates[:steps])

    base_fit: FitResult | None = None
    if method is ForecastMethod.FIXED:
        base_fit = fit(spec, before, opts)

    chunks = []
    skipped = []
    last_params: GarchParams | None = None
    emitted = 0
    round_index = 0
    while emitted < steps:
        origin = start_idx + round_index * refit_every
        horizon = min(refit_every, steps - emitted)
        origin_date = series.dates[origin]

        if method is ForecastMethod.FIXED:
            params = base_fit.params
            dist = make_distribution(spec.dist, nu=params.nu, xi=params.xi)
            if round_index == 0:
                state = (
                    float(base_fit.residuals[-1]),
                    float(base_fit.cond_var[-1]),
                )
            else:
                state = _state_from_filter(
                    spec, params, series.values[:origin], base_fit.init_var
                )
        else:
            train = _subseries(series, origin)
            try:
                round_fit = fit(spec, train, opts)
                last_params = round_fit.params
                state = (
                    float(round_fit.residuals[-1]),
                    float(round_fit.cond_var[-1]),
                )
            except ConvergenceError:
                if last_params is None:
                    raise
                warnings.warn(
                    f"refit failed at round {round_index}; reusing previous "
                    "parameter estimates",
                    RuntimeWarning,
                    stacklevel=2,
                )
                skipped.append(round_index)
                state = _state_from_filter(spec, last_params, train.values)
            params = last_params
            dist = make_distribution(spec.dist, nu=params.nu, xi=params.xi)

        if on_round is not None:
            on_round(
                RoundInfo(
                    index=round_index,
                    origin=origin_date,
                    n_obs_used=origin,
                    last_obs_date=series.dates[origin - 1],
                    target_dates=tuple(series.dates[origin:origin + horizon]),
                )
            )

        variances = _forecast_from_state(
            spec,
            params,
            dist,
            state[0],
            state[1],
            horizon,
            mc_paths,
            seed + round_index,
        )
        chunks.append(np.sqrt(variances))
        emitted += horizon
        round_index += 1

    return ForecastResult(
        dates=target_dates,
        vol_forecast=np.concatenate(chunks),
        method=method,
        window=window,
        refit_every=refit_every,
        spec=spec,
        skipped_rounds=tuple(skipped),
    )


def forecast_to_csv(result: ForecastResult) -> str:
    lines = ["date,vol_forecast"]
    for date, vol in zip(result.dates, result.vol_forecast):
        lines.append(f"{date.isoformat()},{vol:.10g}")
    return "\n".join(lines) + "\n"
