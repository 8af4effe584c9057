"""Descriptive statistics for return and price series.

Covers the exploratory layer of the workflow: sample moments, a Hurst
exponent for trend/mean-reversion classification, volatility at daily,
monthly, and annual horizons, ACF/PACF correlograms, and Q-Q data against
the normal distribution.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _stats

from .errors import DegenerateSeriesError, InsufficientDataError, NumericError
from .timeseries import ReturnSeries

TRADING_DAYS_MONTH = 21
TRADING_DAYS_YEAR = 252


@dataclass(frozen=True)
class DescriptiveStats:
    """Sample moments. ``sd`` uses the n-1 denominator; ``skewness`` and
    ``kurtosis`` are standardized central moments, kurtosis in excess form
    (normal = 0)."""

    mean: float
    sd: float
    skewness: float
    kurtosis: float
    n: int


@dataclass(frozen=True)
class VolatilitySummary:
    daily_vol: float
    monthly_vol: float
    annual_vol: float
    hurst: float


class CorrelogramKind(enum.Enum):
    ACF = "acf"
    PACF = "pacf"


@dataclass(frozen=True)
class Correlogram:
    """Autocorrelations (or partial autocorrelations) at lags 1..max_lag.

    ``conf_band`` is the white-noise 95% band 1.96/sqrt(n);
    ``last_significant_lag`` is the largest lag whose value exceeds the band
    in absolute value, 0 if none do.
    """

    lags: np.ndarray
    values: np.ndarray
    kind: CorrelogramKind
    conf_band: float
    last_significant_lag: int

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=np.int64).copy()
        values = np.asarray(self.values, dtype=np.float64).copy()
        lags.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", values)


def moments(values) -> DescriptiveStats:
    """Mean, sd, skewness, and excess kurtosis of a sample.

    Needs n >= 4 (the kurtosis field is always populated). A zero-variance
    sample has undefined higher moments and raises
    :class:`DegenerateSeriesError`.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"moments need at least 2 observations, got {n}")
    if n < 4:
        raise InsufficientDataError(
            f"kurtosis needs at least 4 observations, got {n}"
        )
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite value in input")
    mean = float(np.mean(x))
    centered = x - mean
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise DegenerateSeriesError("zero-variance series: higher moments undefined")
    sd = float(np.std(x, ddof=1))
    skewness = float(np.mean(centered**3) / m2**1.5)
    kurtosis = float(np.mean(centered**4) / m2**2 - 3.0)
    return DescriptiveStats(mean=mean, sd=sd, skewness=skewness, kurtosis=kurtosis, n=n)


def hurst_exponent(values, max_lag: int = 100) -> float:
    """Hurst exponent by lagged-difference dispersion regression.

    For each lag tau in 2..max_lag take the dispersion s(tau) of the
    tau-step differences x[t+tau] - x[t], measured as their root mean
    square (uncentered, so a deterministic trend scales as s ~ tau); H is
    the slope of ln s(tau) on ln tau, clamped to [0, 1]. Applied to price
    levels, H < 0.5 reads as mean-reverting, H ~ 0.5 as a random walk,
    H > 0.5 as trending.
    """
    x = np.asarray(values, dtype=np.float64)
    if max_lag < 2:
        raise ValueError("max_lag must be at least 2")
    if x.size < 2 * max_lag:
        raise InsufficientDataError(
            f"hurst exponent needs at least {2 * max_lag} observations, got {x.size}"
        )
    lags = np.arange(2, max_lag + 1)
    tau = np.array(
        [math.sqrt(np.mean((x[lag:] - x[:-lag]) ** 2)) for lag in lags]
    )
    if np.any(tau <= 0.0):
        raise DegenerateSeriesError("zero dispersion at some lag")
    slope = np.polyfit(np.log(lags), np.log(tau), 1)[0]
    return float(min(max(slope, 0.0), 1.0))


def volatility_summary(returns: ReturnSeries, price_series_for_hurst) -> VolatilitySummary:
    """Daily/monthly/annual volatility of a return series plus the Hurst
    exponent of the accompanying price levels.

    monthly = daily * sqrt(21) and annual = daily * sqrt(252) hold exactly.
    """
    if len(returns) < 2:
        raise InsufficientDataError("volatility needs at least 2 returns")
    daily = float(np.std(returns.values, ddof=1))
    levels = getattr(price_series_for_hurst, "close", price_series_for_hurst)
    return VolatilitySummary(
        daily_vol=daily,
        monthly_vol=daily * math.sqrt(TRADING_DAYS_MONTH),
        annual_vol=daily * math.sqrt(TRADING_DAYS_YEAR),
        hurst=hurst_exponent(levels),
    )


def _sample_acf(x: np.ndarray, max_lag: int) -> np.ndarray:
    centered = x - np.mean(x)
    denom = float(np.dot(centered, centered))
    if denom == 0.0:
        raise DegenerateSeriesError("zero-variance series has no correlogram")
    out = np.empty(max_lag)
    for k in range(1, max_lag + 1):
        out[k - 1] = np.dot(centered[k:], centered[:-k]) / denom
    return out


def _pacf_durbin_levinson(acf: np.ndarray) -> np.ndarray:
    """Partial autocorrelations from autocorrelations.

    Levinson recursion on the Toeplitz system; ``acf`` holds lags 1..m.
    """
    m = acf.size
    rho = np.concatenate([[1.0], acf])
    pacf = np.empty(m)
    phi_prev = np.zeros(0)
    v = 1.0
    for k in range(1, m + 1):
        if v <= 0.0:
            raise NumericError("Levinson recursion broke down (singular system)")
        num = rho[k] - np.dot(phi_prev, rho[k - 1:0:-1])
        phi_kk = num / v
        pacf[k - 1] = phi_kk
        phi = np.empty(k)
        phi[:-1] = phi_prev - phi_kk * phi_prev[::-1]
        phi[-1] = phi_kk
        v *= 1.0 - phi_kk**2
        phi_prev = phi
    return pacf


def correlogram(values, max_lag: int, kind: CorrelogramKind) -> Correlogram:
    """ACF or PACF at lags 1..max_lag with the 1.96/sqrt(n) band."""
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if max_lag < 1:
        raise ValueError("max_lag must be at least 1")
    if n <= max_lag + 1:
        raise InsufficientDataError(
            f"correlogram to lag {max_lag} needs more than {max_lag + 1} observations"
        )
    acf = _sample_acf(x, max_lag)
    vals = acf if kind is CorrelogramKind.ACF else _pacf_durbin_levinson(acf)
    band = 1.96 / math.sqrt(n)
    significant = np.nonzero(np.abs(vals) > band)[0]
    last = int(significant[-1]) + 1 if significant.size else 0
    return Correlogram(
        lags=np.arange(1, max_lag + 1),
        values=vals,
        kind=kind,
        conf_band=band,
        last_significant_lag=last,
    )


def qq_points(values) -> np.ndarray:
    """Normal Q-Q data: shape (n, 2) array of (theoretical, sample) pairs.

    Sample quantiles are the sorted values; theoretical quantiles use the
    plotting position (i - 0.5)/n through the normal inverse CDF, scaled by
    the sample mean and sd.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if n < 3:
        raise InsufficientDataError(f"Q-Q plot needs at least 3 observations, got {n}")
    sample = np.sort(x)
    probs = (np.arange(1, n + 1) - 0.5) / n
    theoretical = np.mean(x) + np.std(x, ddof=1) * _stats.norm.ppf(probs)
    return np.column_stack([theoretical, sample])


def correlogram_to_csv(corr: Correlogram) -> str:
    """``lag,value,band`` rows for external plotting."""
    lines = ["lag,value,band"]
    for lag, value in zip(corr.lags, corr.values):
        lines.append(f"{lag},{value:.10g},{corr.conf_band:.10g}")
    return "\n".join(lines) + "\n"


def qq_to_csv(points: np.ndarray) -> str:
    lines = ["theoretical,sample"]
    for theo, samp in points:
        lines.append(f"{theo:.10g},{samp:.10g}")
    return "\n".join(lines) + "\n"
