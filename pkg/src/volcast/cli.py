"""Command-line front end.

Composes the library into four subcommands: ``stats`` for return
diagnostics, ``fit`` for model estimation, ``backtest`` for rolling
forecasts scored against a realized proxy, and ``simulate`` for
generating synthetic fixtures with known ground truth. Output is
machine-readable CSV/JSON only; every command is a pure function of its
input files, flags, and seed, so repeated runs produce byte-identical
files.

Exit codes: 0 on success, 1 for IO/validation problems, 2 for bad
flags (argparse), 3 when model estimation fails to converge.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as dt
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .arma import select_arma
from .backtest import Proxy, error_metrics, realized_proxy
from .descriptive import (
    CorrelogramKind,
    correlogram,
    correlogram_to_csv,
    moments,
    qq_points,
    qq_to_csv,
    volatility_summary,
)
from .distributions import DistKind
from .errors import ConvergenceError, ValidationError, VolcastError
from .forecast import ForecastMethod, forecast_to_csv, rolling_forecast
from .garch import (
    GarchParams,
    MeanModel,
    ModelSpec,
    VarianceModel,
    fit,
    fit_on_arma_residuals,
)
from .simulate import path_to_ohlcv_csv, simulate_path
from .timeseries import ReturnSeries, log_returns, parse_ohlcv_csv, split_at

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONVERGENCE = 3

_MODELS = {
    "garch": VarianceModel.GARCH11,
    "gjr": VarianceModel.GJR_GARCH111,
    "egarch": VarianceModel.EGARCH111,
}
_DISTS = {"normal": DistKind.NORMAL, "t": DistKind.STUDENT_T, "skewt": DistKind.SKEW_T}
_MEANS = {"constant": MeanModel.CONSTANT, "zero": MeanModel.ZERO}
_METHODS = {"fixed": ForecastMethod.FIXED, "expanding": ForecastMethod.EXPANDING}
_PROXIES = {"abs": Proxy.ABS_RETURN, "squared": Proxy.SQUARED_RETURN}

_DEFAULT_SIM_PARAMS = {
    VarianceModel.GARCH11: dict(omega=0.1, alpha=0.08, beta=0.9),
    VarianceModel.GJR_GARCH111: dict(omega=0.1, alpha=0.05, beta=0.88, gamma=0.08),
    VarianceModel.EGARCH111: dict(omega=0.03, alpha=0.10, beta=0.97, gamma=-0.06),
}


@dataclass(frozen=True)
class RunConfig:
    """Validated flag bundle shared by the subcommands."""

    input: Path | None
    symbol: str
    model: VarianceModel
    dist: DistKind
    mean: MeanModel
    split_date: dt.date | None
    method: ForecastMethod
    window: int
    steps: int
    proxy: Proxy
    seed: int
    output_dir: Path

    def __post_init__(self):
        if self.window < 1:
            raise ValidationError(f"window must be at least 1, got {self.window}")
        if self.steps < 1:
            raise ValidationError(f"steps must be at least 1, got {self.steps}")


def _config_from(args: argparse.Namespace) -> RunConfig:
    seed = int(os.environ.get("VOLCAST_SEED", args.seed))
    split = None
    if getattr(args, "split_date", None):
        split = dt.date.fromisoformat(args.split_date)
    return RunConfig(
        input=Path(args.input) if getattr(args, "input", None) else None,
        symbol=args.symbol,
        model=_MODELS[args.model],
        dist=_DISTS[args.dist],
        mean=_MEANS[args.mean],
        split_date=split,
        method=_METHODS[args.method],
        window=args.window,
        steps=args.steps,
        proxy=_PROXIES[args.proxy],
        seed=seed,
        output_dir=Path(args.output_dir),
    )


def _dump_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _write_outputs(outdir: Path, files: dict[str, str]) -> None:
    """Write all output files, removing any already written on failure."""
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        for name, text in files.items():
            path = outdir / name
            path.write_text(text)
            written.append(path)
    except OSError:
        for path in written:
            path.unlink(missing_ok=True)
        raise


def _load_returns(config: RunConfig):
    prices = parse_ohlcv_csv(config.input.read_text(), symbol=config.symbol)
    return prices, log_returns(prices)


def cmd_stats(config: RunConfig) -> int:
    prices, returns = _load_returns(config)
    stats = moments(returns.values)
    summary = volatility_summary(returns, prices)
    max_lag = min(30, len(returns) - 2)
    acf = correlogram(returns.values, max_lag, CorrelogramKind.ACF)
    pacf = correlogram(returns.values, max_lag, CorrelogramKind.PACF)
    points = qq_points(returns.values)
    _write_outputs(
        config.output_dir,
        {
            "moments.json": _dump_json(dataclasses.asdict(stats)),
            "vol_summary.json": _dump_json(dataclasses.asdict(summary)),
            "acf.csv": correlogram_to_csv(acf),
            "pacf.csv": correlogram_to_csv(pacf),
            "qq.csv": qq_to_csv(points),
        },
    )
    return EXIT_OK


def cmd_fit(config: RunConfig) -> int:
    _, returns = _load_returns(config)
    spec = ModelSpec(mean=config.mean, variance=config.model, dist=config.dist)
    arma_section = None
    if config.mean is MeanModel.ZERO:
        # conditional-mean cleanup first, then the variance model on what is left
        arma_fit = select_arma(returns)
        arma_section = arma_fit.to_dict()
        result = fit_on_arma_residuals(arma_fit, spec)
    else:
        result = fit(spec, returns)

    payload = {"symbol": config.symbol, "arma": arma_section, **result.to_dict()}
    cond_lines = ["date,cond_vol"]
    resid_lines = ["date,std_resid"]
    for date, vol, z in zip(result.dates, result.cond_vol, result.std_residuals):
        cond_lines.append(f"{date.isoformat()},{vol:.10g}")
        resid_lines.append(f"{date.isoformat()},{z:.10g}")
    _write_outputs(
        config.output_dir,
        {
            "fit.json": _dump_json(payload),
            "cond_vol.csv": "\n".join(cond_lines) + "\n",
            "std_resid.csv": "\n".join(resid_lines) + "\n",
        },
    )
    return EXIT_OK


def cmd_backtest(config: RunConfig) -> int:
    if config.split_date is None:
        raise ValidationError("backtest requires --split-date")
    _, returns = _load_returns(config)
    spec = ModelSpec(mean=config.mean, variance=config.model, dist=config.dist)
    result = rolling_forecast(
        returns,
        spec,
        config.method,
        start=config.split_date,
        steps=config.steps,
        window=config.window,
        seed=config.seed,
    )
    _, test_segment = split_at(returns, config.split_date)
    scored = ReturnSeries(
        dates=test_segment.dates[: config.steps],
        values=test_segment.values[: config.steps],
        kind=test_segment.kind,
        source_symbol=test_segment.source_symbol,
    )
    report = error_metrics(
        result, realized_proxy(scored, config.proxy), proxy=config.proxy
    )
    payload = {
        "symbol": config.symbol,
        "model": config.model.value,
        "dist": config.dist.value,
        "method": config.method.value,
        "skipped_rounds": list(result.skipped_rounds),
        **report.to_dict(),
    }
    _write_outputs(
        config.output_dir,
        {
            "forecast.csv": forecast_to_csv(result),
            "backtest.json": _dump_json(payload),
        },
    )
    return EXIT_OK


def cmd_simulate(config: RunConfig, args: argparse.Namespace) -> int:
    defaults = dict(_DEFAULT_SIM_PARAMS[config.model])
    for name in ("omega", "alpha", "beta", "gamma", "mu", "nu", "xi"):
        value = getattr(args, name)
        if value is not None:
            defaults[name] = value
    if config.mean is MeanModel.CONSTANT:
        defaults.setdefault("mu", 0.0)
    else:
        defaults.pop("mu", None)
    if config.dist in (DistKind.STUDENT_T, DistKind.SKEW_T):
        defaults.setdefault("nu", 8.0)
    if config.dist is DistKind.SKEW_T:
        defaults.setdefault("xi", -0.1)
    if config.model is not VarianceModel.GJR_GARCH111 and config.model is not VarianceModel.EGARCH111:
        defaults.pop("gamma", None)

    spec = ModelSpec(mean=config.mean, variance=config.model, dist=config.dist)
    params = GarchParams(**defaults)
    path = simulate_path(
        spec, params, n=args.n, burn_in=args.burn_in,
        seed=config.seed, symbol=config.symbol,
    )
    vol_lines = ["date,true_sigma"]
    for date, sigma in zip(path.returns.dates, path.true_sigma):
        vol_lines.append(f"{date.isoformat()},{sigma:.10g}")
    _write_outputs(
        config.output_dir,
        {
            "simulated.csv": path_to_ohlcv_csv(path),
            "true_vol.csv": "\n".join(vol_lines) + "\n",
        },
    )
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, needs_input: bool) -> None:
    if needs_input:
        parser.add_argument("--input", required=True, help="OHLCV CSV file")
    parser.add_argument("--symbol", default="SERIES")
    parser.add_argument("--model", choices=sorted(_MODELS), default="garch")
    parser.add_argument("--dist", choices=sorted(_DISTS), default="normal")
    parser.add_argument("--mean", choices=sorted(_MEANS), default="zero")
    parser.add_argument("--split-date", dest="split_date", default=None)
    parser.add_argument("--method", choices=sorted(_METHODS), default="expanding")
    parser.add_argument("--window", type=int, default=5)
    parser.add_argument("--steps", type=int, default=80)
    parser.add_argument("--proxy", choices=sorted(_PROXIES), default="abs")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output-dir", dest="output_dir", default=".")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volcast", description="Volatility modeling and forecasting toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="return diagnostics")
    _add_common(p_stats, needs_input=True)

    p_fit = sub.add_parser("fit", help="estimate a volatility model")
    _add_common(p_fit, needs_input=True)

    p_back = sub.add_parser("backtest", help="rolling forecast and scoring")
    _add_common(p_back, needs_input=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic fixture")
    _add_common(p_sim, needs_input=False)
    p_sim.add_argument("--n", type=int, default=1000)
    p_sim.add_argument("--burn-in", dest="burn_in", type=int, default=500)
    for name in ("omega", "alpha", "beta", "gamma", "mu", "nu", "xi"):
        p_sim.add_argument(f"--{name}", type=float, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from(args)
        if args.command == "stats":
            return cmd_stats(config)
        if args.command == "fit":
            return cmd_fit(config)
        if args.command == "backtest":
            return cmd_backtest(config)
        return cmd_simulate(config, args)
    except ConvergenceError as exc:
        print(f"error: estimation did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (VolcastError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
