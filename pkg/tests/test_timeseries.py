import datetime as dt
import math

import numpy as np
import pytest

from volcast.errors import (
    CsvParseError,
    DateRangeError,
    InsufficientDataError,
    ValidationError,
)
from volcast.timeseries import (
    PriceSeries,
    ReturnKind,
    ReturnSeries,
    log_returns,
    parse_ohlcv_csv,
    price_series_to_csv,
    return_series_to_csv,
    simple_returns,
    split_at,
)


def make_prices(closes, start=dt.date(2020, 1, 1), symbol="TST"):
    dates = [start + dt.timedelta(days=i) for i in range(len(closes))]
    closes = np.asarray(closes, dtype=float)
    return PriceSeries(
        symbol=symbol,
        dates=tuple(dates),
        open=closes,
        high=closes * 1.01,
        low=closes * 0.99,
        close=closes,
        adj_close=closes,
        volume=np.full(len(closes), 1000.0),
    )


def csv_text(rows):
    header = "date,open,high,low,close,adj_close,volume"
    return "\n".join([header, *rows]) + "\n"


class TestParse:
    def test_basic_parse(self):
        text = csv_text(
            [
                "2020-01-01,10,11,9,10.5,10.4,100",
                "2020-01-02,10.5,12,10,11.5,11.4,200",
            ]
        )
        ps = parse_ohlcv_csv(text, "ABC")
        assert ps.symbol == "ABC"
        assert len(ps) == 2
        assert ps.dates[0] == dt.date(2020, 1, 1)
        assert ps.close[1] == 11.5
        assert ps.volume[0] == 100.0

    def test_rows_sorted_by_date(self):
        text = csv_text(
            [
                "2020-01-03,1,1,1,3,3,0",
                "2020-01-01,1,1,1,1,1,0",
                "2020-01-02,1,1,1,2,2,0",
            ]
        )
        ps = parse_ohlcv_csv(text, "X")
        assert list(ps.close) == [1.0, 2.0, 3.0]

    def test_wrong_header_rejected(self):
        bad = "date,open,high,low,close,volume\n2020-01-01,1,1,1,1,1\n"
        with pytest.raises(CsvParseError):
            parse_ohlcv_csv(bad, "X")

    def test_malformed_row_reports_line(self):
        text = csv_text(
            [
                "2020-01-01,1,1,1,1,1,0",
                "2020-01-02,1,1,oops,1,1,0",
            ]
        )
        with pytest.raises(CsvParseError) as exc:
            parse_ohlcv_csv(text, "X")
        assert exc.value.line == 3
        assert "line 3" in str(exc.value)

    def test_empty_field_reports_line(self):
        text = csv_text(["2020-01-01,1,1,,1,1,0"])
        with pytest.raises(CsvParseError) as exc:
            parse_ohlcv_csv(text, "X")
        assert exc.value.line == 2

    def test_bad_date_rejected(self):
        text = csv_text(["01/02/2020,1,1,1,1,1,0", "2020-01-03,1,1,1,1,1,0"])
        with pytest.raises(CsvParseError):
            parse_ohlcv_csv(text, "X")

    def test_wrong_field_count(self):
        text = csv_text(["2020-01-01,1,1,1,1,1", "2020-01-02,1,1,1,1,1,0"])
        with pytest.raises(CsvParseError) as exc:
            parse_ohlcv_csv(text, "X")
        assert exc.value.line == 2

    def test_nonpositive_price_rejected(self):
        text = csv_text(
            [
                "2020-01-01,1,1,1,0,1,0",
                "2020-01-02,1,1,1,1,1,0",
            ]
        )
        with pytest.raises(ValidationError):
            parse_ohlcv_csv(text, "X")

    def test_duplicate_date_rejected(self):
        text = csv_text(
            [
                "2020-01-01,1,1,1,1,1,0",
                "2020-01-01,1,1,1,2,2,0",
            ]
        )
        with pytest.raises(ValidationError):
            parse_ohlcv_csv(text, "X")

    def test_negative_volume_rejected(self):
        text = csv_text(
            [
                "2020-01-01,1,1,1,1,1,-5",
                "2020-01-02,1,1,1,1,1,0",
            ]
        )
        with pytest.raises(ValidationError):
            parse_ohlcv_csv(text, "X")

    def test_single_row_rejected(self):
        text = csv_text(["2020-01-01,1,1,1,1,1,0"])
        with pytest.raises(ValidationError):
            parse_ohlcv_csv(text, "X")

    def test_round_trip_exact(self):
        text = csv_text(
            [
                "2020-01-01,10.123,11.456,9.789,10.5,10.333333333333334,100",
                "2020-01-02,10.5,12.25,10.1,11.5,11.000000000000002,200",
                "2020-01-06,11.5,12.5,11.0,12.0,11.875,0",
            ]
        )
        ps1 = parse_ohlcv_csv(text, "RT")
        ps2 = parse_ohlcv_csv(price_series_to_csv(ps1), "RT")
        assert ps1.dates == ps2.dates
        for name in ("open", "high", "low", "close", "adj_close", "volume"):
            np.testing.assert_array_equal(getattr(ps1, name), getattr(ps2, name))


class TestReturns:
    def test_simple_two_points(self):
        ps = make_prices([100.0, 110.0])
        rs = simple_returns(ps)
        assert rs.values.tolist() == [10.0]
        assert rs.kind is ReturnKind.SIMPLE
        assert rs.dates == ps.dates[1:]

    def test_simple_three_points(self):
        ps = make_prices([100.0, 90.0, 99.0])
        rs = simple_returns(ps)
        np.testing.assert_allclose(rs.values, [-10.0, 10.0], rtol=0, atol=1e-12)

    def test_log_two_points(self):
        ps = make_prices([100.0, 110.0])
        rs = log_returns(ps)
        assert rs.kind is ReturnKind.LOG
        np.testing.assert_allclose(rs.values, [100.0 * math.log(1.1)], rtol=1e-12)
        assert abs(rs.values[0] - 9.531) < 5e-4

    def test_adj_close_column_used(self):
        closes = np.array([100.0, 110.0])
        ps = PriceSeries(
            symbol="ADJ",
            dates=(dt.date(2020, 1, 1), dt.date(2020, 1, 2)),
            open=closes,
            high=closes,
            low=closes,
            close=closes,
            adj_close=np.array([50.0, 60.0]),
            volume=np.zeros(2),
        )
        assert simple_returns(ps).values[0] == pytest.approx(10.0)
        assert simple_returns(ps, use_adj_close=True).values[0] == pytest.approx(20.0)

    def test_simple_vs_log_first_order(self):
        # |simple - log| <= 0.02 * simple^2 for small daily moves
        rng = np.random.default_rng(7)
        closes = 100.0 * np.cumprod(1.0 + rng.normal(0, 0.01, size=500))
        ps = make_prices(closes)
        s = simple_returns(ps).values
        l = log_returns(ps).values
        assert np.all(np.abs(s - l) <= 0.02 * s**2 + 1e-12)

    def test_returns_length(self):
        ps = make_prices(np.linspace(100, 120, 11))
        assert len(simple_returns(ps)) == 10

    def test_returns_csv_format(self):
        rs = ReturnSeries(
            dates=(dt.date(2020, 1, 2),),
            values=np.array([1.2345678901234]),
            kind=ReturnKind.LOG,
            source_symbol="X",
        )
        text = return_series_to_csv(rs)
        lines = text.strip().split("\n")
        assert lines[0] == "date,value"
        assert lines[1] == "2020-01-02,1.23456789"


class TestSplit:
    def setup_method(self):
        self.rs = simple_returns(make_prices(np.linspace(100, 120, 11)))
        # dates run 2020-01-02 .. 2020-01-11

    def test_split_middle(self):
        before, after = split_at(self.rs, dt.date(2020, 1, 7))
        assert before is not None and after is not None
        assert all(d < dt.date(2020, 1, 7) for d in before.dates)
        assert all(d >= dt.date(2020, 1, 7) for d in after.dates)
        assert len(before) + len(after) == len(self.rs)
        merged = np.concatenate([before.values, after.values])
        np.testing.assert_array_equal(merged, self.rs.values)

    def test_split_on_first_date(self):
        before, after = split_at(self.rs, self.rs.dates[0])
        assert before is None
        assert after is not None and len(after) == len(self.rs)

    def test_split_on_last_date(self):
        before, after = split_at(self.rs, self.rs.dates[-1])
        assert before is not None and len(before) == len(self.rs) - 1
        assert after is not None and len(after) == 1

    def test_split_outside_range_raises(self):
        with pytest.raises(DateRangeError):
            split_at(self.rs, dt.date(2019, 12, 31))
        with pytest.raises(DateRangeError):
            split_at(self.rs, dt.date(2021, 1, 1))

    def test_split_date_absent_from_series(self):
        # a weekend-style gap: split date between observed dates
        dates = tuple(
            dt.date(2020, 1, 1) + dt.timedelta(days=i) for i in (0, 1, 4, 5)
        )
        rs = ReturnSeries(
            dates=dates,
            values=np.arange(4.0),
            kind=ReturnKind.SIMPLE,
            source_symbol="X",
        )
        before, after = split_at(rs, dt.date(2020, 1, 3))
        assert len(before) == 2
        assert len(after) == 2


class TestValidation:
    def test_price_series_arrays_read_only(self):
        ps = make_prices([100.0, 101.0])
        with pytest.raises(ValueError):
            ps.close[0] = 5.0

    def test_return_series_read_only(self):
        rs = simple_returns(make_prices([100.0, 101.0]))
        with pytest.raises(ValueError):
            rs.values[0] = 0.0

    def test_unsorted_dates_rejected(self):
        with pytest.raises(ValidationError):
            PriceSeries(
                symbol="X",
                dates=(dt.date(2020, 1, 2), dt.date(2020, 1, 1)),
                open=np.ones(2),
                high=np.ones(2),
                low=np.ones(2),
                close=np.ones(2),
                adj_close=np.ones(2),
                volume=np.zeros(2),
            )

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            PriceSeries(
                symbol="X",
                dates=(dt.date(2020, 1, 1), dt.date(2020, 1, 2)),
                open=np.ones(3),
                high=np.ones(2),
                low=np.ones(2),
                close=np.ones(2),
                adj_close=np.ones(2),
                volume=np.zeros(2),
            )

    def test_nan_return_rejected(self):
        with pytest.raises(ValidationError):
            ReturnSeries(
                dates=(dt.date(2020, 1, 1),),
                values=np.array([np.nan]),
                kind=ReturnKind.SIMPLE,
                source_symbol="X",
            )
