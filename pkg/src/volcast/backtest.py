"""Forecast scoring against a realized volatility proxy.

The realized measure is a documented choice, not an estimate: absolute
daily returns by default (same percent units as the sigma forecasts),
squared returns behind a flag for variance-scale comparisons. Forecast
and realized series align by calendar date; dates present on one side
only are dropped and counted rather than treated as errors.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, ValidationError
from .timeseries import ReturnSeries


class Proxy(enum.Enum):
    ABS_RETURN = "abs_return"
    SQUARED_RETURN = "squared_return"


@dataclass(frozen=True)
class BacktestReport:
    """MAE/RMSE scorecard over the date-aligned overlap.

    ``dropped`` counts dates present in exactly one input. The
    mathematical guarantee rmse >= mae (Jensen) is enforced up to a few
    ulps of rounding slack at the equality boundary.
    """

    mae: float
    rmse: float
    n: int
    dropped: int
    proxy: Proxy
    period: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"report needs n >= 1, got {self.n}")
        if self.mae < 0 or self.rmse < 0:
            raise ValidationError("error metrics must be non-negative")
        if self.rmse < self.mae and (self.mae - self.rmse) > 8 * np.spacing(self.mae):
            raise ValidationError(
                f"rmse {self.rmse} below mae {self.mae}; metrics inconsistent"
            )
        object.__setattr__(self, "period", tuple(self.period))

    def to_dict(self) -> dict:
        return {
            "mae": self.mae,
            "rmse": self.rmse,
            "n": self.n,
            "dropped": self.dropped,
            "proxy": self.proxy.value,
            "period": [self.period[0].isoformat(), self.period[1].isoformat()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv_row(self, symbol: str, model: str) -> str:
        return f"{symbol},{model},{self.mae:.10g},{self.rmse:.10g},{self.n}\n"


def realized_proxy(returns: ReturnSeries, proxy: Proxy = Proxy.ABS_RETURN) -> ReturnSeries:
    """Per-date realized volatility proxy in forecast-comparable units."""
    if proxy is Proxy.ABS_RETURN:
        values = np.abs(returns.values)
    else:
        values = returns.values * returns.values
    return ReturnSeries(
        dates=returns.dates,
        values=values,
        kind=returns.kind,
        source_symbol=returns.source_symbol,
    )


def error_metrics(forecast, realized, proxy: Proxy = Proxy.ABS_RETURN) -> BacktestReport:
    """Score a forecast against a realized series on their common dates."""
    f_vals = getattr(forecast, "vol_forecast", None)
    if f_vals is None:
        f_vals = forecast.values
    f_map = dict(zip(forecast.dates, np.asarray(f_vals, dtype=np.float64)))
    r_map = dict(zip(realized.dates, np.asarray(realized.values, dtype=np.float64)))

    common = sorted(set(f_map) & set(r_map))
    if not common:
        raise AlignmentError("forecast and realized series share no dates")
    dropped = (len(f_map) - len(common)) + (len(r_map) - len(common))

    f = np.array([f_map[d] for d in common])
    x = np.array([r_map[d] for d in common])
    err = f - x
    mae = float(np.mean(np.abs(err)))
    rmse = float(np.sqrt(np.mean(err * err)))
    return BacktestReport(
        mae=mae,
        rmse=rmse,
        n=len(common),
        dropped=dropped,
        proxy=proxy,
        period=(common[0], common[-1]),
    )
