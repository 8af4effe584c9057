"""OHLCV parsing and return-series construction.

Prices come in as CSV with the fixed header
``date,open,high,low,close,adj_close,volume`` (ISO-8601 dates, ``.`` decimal
separator, UTF-8). Returns are expressed in percent per day. Missing trading
days are not imputed: consecutive rows are treated as consecutive steps in
trading time.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CsvParseError,
    DateRangeError,
    InsufficientDataError,
    ValidationError,
)

OHLCV_HEADER = ("date", "open", "high", "low", "close", "adj_close", "volume")

_PRICE_FIELDS = ("open", "high", "low", "close", "adj_close")


def _readonly(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).copy()
    arr.setflags(write=False)
    return arr


class ReturnKind(enum.Enum):
    SIMPLE = "simple"
    LOG = "log"


@dataclass(frozen=True)
class PriceSeries:
    """Dated OHLCV observations for one symbol.

    Dates are strictly increasing trading days; all price fields are strictly
    positive, volume is non-negative, and every field has the same length >= 2.
    Arrays are read-only once constructed.
    """

    symbol: str
    dates: tuple[dt.date, ...]
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    adj_close: np.ndarray
    volume: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        for name in (*_PRICE_FIELDS, "volume"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        n = len(self.dates)
        if n < 2:
            raise ValidationError("price series needs at least 2 rows")
        for name in (*_PRICE_FIELDS, "volume"):
            if len(getattr(self, name)) != n:
                raise ValidationError(f"field {name!r} length differs from dates")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise ValidationError(f"dates not strictly increasing at {b}")
        for name in _PRICE_FIELDS:
            vals = getattr(self, name)
            if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
                raise ValidationError(f"non-positive or non-finite {name} price")
        if not np.all(np.isfinite(self.volume)) or np.any(self.volume < 0.0):
            raise ValidationError("negative or non-finite volume")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    """Percent returns per day, derived from a price series or simulated."""

    dates: tuple[dt.date, ...]
    values: np.ndarray
    kind: ReturnKind
    source_symbol: str

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _readonly(self.values))
        if len(self.dates) != self.values.size:
            raise ValidationError("dates and values length mismatch")
        if self.values.size < 1:
            raise ValidationError("empty return series")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise ValidationError(f"dates not strictly increasing at {b}")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("non-finite return value")

    def __len__(self) -> int:
        return len(self.dates)


def parse_ohlcv_csv(source: str | io.TextIOBase, symbol: str) -> PriceSeries:
    """Parse OHLCV CSV text into a validated :class:`PriceSeries`.

    Rows may arrive out of date order; the result is sorted. Malformed rows
    (wrong field count, unparseable number or date, empty numeric field) raise
    :class:`CsvParseError` with the offending line number. Non-positive prices
    and duplicate dates raise :class:`ValidationError`.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError("empty input", line=1) from None
    if tuple(h.strip() for h in header) != OHLCV_HEADER:
        raise CsvParseError(
            f"expected header {','.join(OHLCV_HEADER)!r}, got {','.join(header)!r}",
            line=1,
        )

    rows: list[tuple[dt.date, list[float], int]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if len(row) != len(OHLCV_HEADER):
            raise CsvParseError(
                f"expected {len(OHLCV_HEADER)} fields, got {len(row)}", line=lineno
            )
        try:
            date = dt.date.fromisoformat(row[0].strip())
        except ValueError:
            raise CsvParseError(f"bad date {row[0]!r}", line=lineno) from None
        numbers = []
        for name, cell in zip(OHLCV_HEADER[1:], row[1:]):
            cell = cell.strip()
            if not cell:
                raise CsvParseError(f"empty {name} field", line=lineno)
            try:
                value = float(cell)
            except ValueError:
                raise CsvParseError(f"bad {name} value {cell!r}", line=lineno) from None
            if not math.isfinite(value):
                raise CsvParseError(f"non-finite {name} value", line=lineno)
            numbers.append(value)
        rows.append((date, numbers, lineno))

    seen: dict[dt.date, int] = {}
    for date, _, lineno in rows:
        if date in seen:
            raise ValidationError(f"duplicate date {date} (lines {seen[date]} and {lineno})")
        seen[date] = lineno
    for date, numbers, lineno in rows:
        for name, value in zip(OHLCV_HEADER[1:6], numbers[:5]):
            if value <= 0.0:
                raise ValidationError(f"line {lineno}: non-positive {name} ({value}) on {date}")
        if numbers[5] < 0.0:
            raise ValidationError(f"line {lineno}: negative volume on {date}")

    rows.sort(key=lambda r: r[0])
    dates = tuple(r[0] for r in rows)
    cols = np.array([r[1] for r in rows], dtype=np.float64).reshape(len(rows), 6)
    return PriceSeries(
        symbol=symbol,
        dates=dates,
        open=cols[:, 0],
        high=cols[:, 1],
        low=cols[:, 2],
        close=cols[:, 3],
        adj_close=cols[:, 4],
        volume=cols[:, 5],
    )


def price_series_to_csv(prices: PriceSeries) -> str:
    """Serialize back to the input CSV schema (round-trip exact)."""
    lines = [",".join(OHLCV_HEADER)]
    for i, date in enumerate(prices.dates):
        cells = [date.isoformat()]
        for name in (*_PRICE_FIELDS, "volume"):
            cells.append(repr(float(getattr(prices, name)[i])))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _price_column(prices: PriceSeries, use_adj_close: bool) -> np.ndarray:
    return prices.adj_close if use_adj_close else prices.close


def simple_returns(prices: PriceSeries, use_adj_close: bool = False) -> ReturnSeries:
    """Percent change of close: 100 * (p[i+1] - p[i]) / p[i]."""
    if len(prices) < 2:
        raise InsufficientDataError("need at least 2 prices for returns")
    p = _price_column(prices, use_adj_close)
    values = 100.0 * (p[1:] - p[:-1]) / p[:-1]
    return ReturnSeries(
        dates=prices.dates[1:],
        values=values,
        kind=ReturnKind.SIMPLE,
        source_symbol=prices.symbol,
    )


def log_returns(prices: PriceSeries, use_adj_close: bool = False) -> ReturnSeries:
    """Percent log return: 100 * (ln p[i+1] - ln p[i])."""
    if len(prices) < 2:
        raise InsufficientDataError("need at least 2 prices for returns")
    p = _price_column(prices, use_adj_close)
    if np.any(p <= 0.0):
        raise ValidationError("log returns need strictly positive prices")
    logs = np.log(p)
    values = 100.0 * np.diff(logs)
    return ReturnSeries(
        dates=prices.dates[1:],
        values=values,
        kind=ReturnKind.LOG,
        source_symbol=prices.symbol,
    )


def split_at(series: ReturnSeries, split_date: dt.date) -> tuple[ReturnSeries | None, ReturnSeries | None]:
    """Split into (strictly before split_date, on/after split_date).

    The concatenation of the two parts reproduces the input. An empty part is
    returned as ``None`` (a :class:`ReturnSeries` cannot be empty).
    """
    if split_date < series.dates[0] or split_date > series.dates[-1]:
        raise DateRangeError(
            f"split date {split_date} outside series range "
            f"[{series.dates[0]}, {series.dates[-1]}]"
        )
    k = sum(1 for d in series.dates if d < split_date)

    def _part(sl: slice) -> ReturnSeries | None:
        dates = series.dates[sl]
        if not dates:
            return None
        return ReturnSeries(
            dates=dates,
            values=series.values[sl],
            kind=series.kind,
            source_symbol=series.source_symbol,
        )

    return _part(slice(None, k)), _part(slice(k, None))


def return_series_to_csv(series: ReturnSeries) -> str:
    """``date,value`` CSV with 10 significant digits."""
    lines = ["date,value"]
    for date, value in zip(series.dates, series.values):
        lines.append(f"{date.isoformat()},{value:.10g}")
    return "\n".join(lines) + "\n"
