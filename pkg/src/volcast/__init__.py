"""Volatility modeling toolkit: return diagnostics, ARMA and GARCH-family
estimation, rolling volatility forecasts, and forecast backtesting."""

from .arma import ArmaFit, ArmaOrder, fit_arma, select_arma
from .backtest import BacktestReport, Proxy, error_metrics, realized_proxy
from .descriptive import (
    Correlogram,
    CorrelogramKind,
    DescriptiveStats,
    VolatilitySummary,
    correlogram,
    hurst_exponent,
    moments,
    qq_points,
    volatility_summary,
)
from .distributions import DistKind, make_distribution
from .errors import (
    AlignmentError,
    ConvergenceError,
    CsvParseError,
    DateRangeError,
    DegenerateSeriesError,
    EstimationError,
    InsufficientDataError,
    NumericError,
    ValidationError,
    VolcastError,
)
from .forecast import (
    ForecastMethod,
    ForecastResult,
    analytic_forecast,
    forecast_to_csv,
    rolling_forecast,
)
from .garch import (
    FitOptions,
    FitResult,
    GarchParams,
    MeanModel,
    ModelSpec,
    VarianceModel,
    fit,
    fit_on_arma_residuals,
    log_likelihood,
    long_run_variance,
    variance_filter,
)
from .simulate import SimulatedPath, path_to_ohlcv_csv, round_trip, simulate_path
from .timeseries import (
    PriceSeries,
    ReturnKind,
    ReturnSeries,
    log_returns,
    parse_ohlcv_csv,
    simple_returns,
    split_at,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "ArmaFit",
    "ArmaOrder",
    "BacktestReport",
    "ConvergenceError",
    "Correlogram",
    "CorrelogramKind",
    "CsvParseError",
    "DateRangeError",
    "DegenerateSeriesError",
    "DescriptiveStats",
    "DistKind",
    "EstimationError",
    "FitOptions",
    "FitResult",
    "ForecastMethod",
    "ForecastResult",
    "GarchParams",
    "InsufficientDataError",
    "MeanModel",
    "ModelSpec",
    "NumericError",
    "PriceSeries",
    "Proxy",
    "ReturnKind",
    "ReturnSeries",
    "SimulatedPath",
    "ValidationError",
    "VarianceModel",
    "VolatilitySummary",
    "VolcastError",
    "analytic_forecast",
    "correlogram",
    "error_metrics",
    "fit",
    "fit_arma",
    "fit_on_arma_residuals",
    "forecast_to_csv",
    "hurst_exponent",
    "log_likelihood",
    "log_returns",
    "long_run_variance",
    "make_distribution",
    "moments",
    "parse_ohlcv_csv",
    "path_to_ohlcv_csv",
    "qq_points",
    "realized_proxy",
    "rolling_forecast",
    "round_trip",
    "select_arma",
    "simple_returns",
    "simulate_path",
    "split_at",
    "variance_filter",
    "volatility_summary",
]
