import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantroll.candles import (
    CandleSeries,
    FetchConfig,
    fetch_candles,
    parse_candles_csv,
    serialize_candles_csv,
    validate_series,
)
from quantroll.errors import (
    DuplicateTimestamp,
    EmptyRange,
    MalformedPayload,
    MalformedRow,
    NetworkError,
    NonPositivePrice,
    OhlcViolation,
)

from .conftest import DAY, bars_to_series, random_walk_bars

HEADER = "timestamp,open,high,low,close,volume\n"


class TestParseCsv:
    def test_single_row(self):
        series = parse_candles_csv(HEADER + "1700000000,100,110,90,105,5.0\n", DAY)
        assert len(series) == 1
        assert series.close[0] == 105.0
        assert series.timestamps[0] == 1700000000

    def test_out_of_order_rows_sorted(self):
        text = HEADER + "1700086400,101,111,91,106,5\n1700000000,100,110,90,105,5\n"
        series = parse_candles_csv(text, DAY)
        assert len(series) == 2
        assert list(series.timestamps) == [1700000000, 1700086400]

    def test_ohlc_violation_reports_line(self):
        text = HEADER + "1700000000,100,110,90,105,5\n1700086400,95,90,100,95,5\n"
        with pytest.raises(OhlcViolation, match="line 3"):
            parse_candles_csv(text, DAY)

    def test_duplicate_timestamp_rejected(self):
        text = HEADER + "1700000000,100,110,90,105,5\n1700000000,100,110,90,104,5\n"
        with pytest.raises(DuplicateTimestamp):
            parse_candles_csv(text, DAY)

    def test_non_positive_price_rejected(self):
        text = HEADER + "1700000000,0,110,0,105,5\n"
        with pytest.raises(NonPositivePrice):
            parse_candles_csv(text, DAY)

    def test_negative_volume_rejected(self):
        text = HEADER + "1700000000,100,110,90,105,-1\n"
        with pytest.raises(MalformedRow):
            parse_candles_csv(text, DAY)

    def test_malformed_field_reports_line(self):
        text = HEADER + "1700000000,100,110,90,abc,5\n"
        with pytest.raises(MalformedRow, match="line 2"):
            parse_candles_csv(text, DAY)

    def test_bad_header(self):
        with pytest.raises(MalformedRow):
            parse_candles_csv("time,o,h,l,c,v\n1,2,3,4,5,6\n", DAY)

    def test_crlf_accepted(self):
        text = HEADER.replace("\n", "\r\n") + "1700000000,100,110,90,105,5\r\n"
        assert len(parse_candles_csv(text, DAY)) == 1

    def test_round_trip_identity(self, fixture_40):
        again = parse_candles_csv(serialize_candles_csv(fixture_40), fixture_40.interval)
        assert again == fixture_40
        assert serialize_candles_csv(again) == serialize_candles_csv(fixture_40)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=0.01, max_value=1e6, allow_nan=False), min_size=1, max_size=20), st.randoms())
def test_round_trip_property(closes, rnd):
    bars = []
    for c in closes:
        o = c * (1 + rnd.uniform(-0.01, 0.01))
        h = max(o, c) * (1 + rnd.uniform(0, 0.01))
        l = min(o, c) / (1 + rnd.uniform(0, 0.01))
        bars.append((o, h, l, c, rnd.uniform(0, 10)))
    series = bars_to_series(bars)
    assert parse_candles_csv(serialize_candles_csv(series), series.interval) == series


class TestValidate:
    def test_clean_daily_series(self, fixture_40):
        assert validate_series(fixture_40).is_clean

    def test_single_candle_clean(self):
        series = bars_to_series([(100, 110, 90, 105, 5)])
        assert validate_series(series).is_clean

    def test_missing_day_reported(self):
        bars = random_walk_bars(5, seed=1)
        series = bars_to_series(bars)
        ts = series.timestamps.copy()
        ts[3:] += DAY  # open a one-day hole between index 2 and 3
        gapped = CandleSeries(ts, series.open, series.high, series.low, series.close, series.volume, DAY)
        report = validate_series(gapped)
        assert len(report.findings) == 1
        finding = report.findings[0]
        assert (finding.prev_timestamp, finding.next_timestamp) == (int(ts[2]), int(ts[3]))
        assert finding.gap == 2 * DAY


class TestSeriesInvariants:
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            bars = random_walk_bars(3, seed=2)
            series = bars_to_series(bars)
            CandleSeries(series.timestamps[::-1].copy(), series.open, series.high,
                         series.low, series.close, series.volume, DAY)

    def test_rejects_empty(self):
        with pytest.raises(EmptyRange):
            CandleSeries(np.array([], dtype=np.int64), np.array([]), np.array([]),
                         np.array([]), np.array([]), np.array([]), DAY)


def _rows(n, t0=1700000000):
    out = []
    price = 100.0
    for i in range(n):
        o = price
        price = price * (1.0 + 0.001 * ((i % 5) - 2))
        h = max(o, price) * 1.01
        l = min(o, price) * 0.99
        out.append([t0 + i * DAY, o, h, l, price, 2.5])
    return out


def _config(stub, page_limit=2, max_retries=3):
    return FetchConfig(
        base_url=stub.base_url,
        path_template="/candles?symbol={symbol}&interval={interval}&start={start}&end={end}&limit={limit}",
        page_limit=page_limit,
        max_retries=max_retries,
        retry_backoff=0.0,
    )


class TestFetch:
    def test_pages_concatenated(self, candle_stub):
        rows = _rows(6)
        candle_stub.reset()
        candle_stub.set_rows(rows)
        series = fetch_candles(_config(candle_stub), "BTC", DAY, rows[0][0], rows[-1][0] + DAY)
        assert len(series) == 6
        assert list(series.timestamps) == [r[0] for r in rows]
        assert candle_stub.server.state["requests"] >= 3  # 6 candles at 2 per page

    def test_retries_then_succeeds(self, candle_stub):
        rows = _rows(2)
        candle_stub.reset(fail_first=2)
        candle_stub.set_rows(rows)
        series = fetch_candles(_config(candle_stub, page_limit=10), "BTC", DAY, rows[0][0], rows[-1][0] + DAY)
        assert len(series) == 2

    def test_retries_exhausted(self, candle_stub):
        rows = _rows(2)
        candle_stub.reset(fail_first=10)
        candle_stub.set_rows(rows)
        with pytest.raises(NetworkError):
            fetch_candles(_config(candle_stub, max_retries=1), "BTC", DAY, rows[0][0], rows[-1][0] + DAY)

    def test_overlapping_pages_deduplicated(self, candle_stub):
        rows = _rows(6)
        candle_stub.reset(overlap=True)
        candle_stub.set_rows(rows)
        series = fetch_candles(_config(candle_stub), "BTC", DAY, rows[0][0], rows[-1][0] + DAY)
        assert len(series) == len({r[0] for r in rows})

    def test_server_overshoot_capped(self, candle_stub):
        rows = _rows(6)
        candle_stub.reset(overshoot=2)
        candle_stub.set_rows(rows)
        series = fetch_candles(_config(candle_stub), "BTC", DAY, rows[0][0], rows[-1][0] + DAY)
        assert len(series) == 6

    def test_empty_range(self, candle_stub):
        candle_stub.reset()
        candle_stub.set_rows([])
        with pytest.raises(EmptyRange):
            fetch_candles(_config(candle_stub), "BTC", DAY, 1700000000, 1700000000 + DAY)

    def test_start_after_end(self, candle_stub):
        with pytest.raises(EmptyRange):
            fetch_candles(_config(candle_stub), "BTC", DAY, 10, 10)

    def test_malformed_payload(self, candle_stub):
        candle_stub.reset()
        candle_stub.set_rows([[1700000000, 100, 110, 90]])  # 4 elements
        with pytest.raises(MalformedPayload):
            fetch_candles(_config(candle_stub), "BTC", DAY, 1700000000, 1700000000 + DAY)

    def test_deterministic(self, candle_stub):
        rows = _rows(5)
        candle_stub.reset()
        candle_stub.set_rows(rows)
        a = fetch_candles(_config(candle_stub), "BTC", DAY, rows[0][0], rows[-1][0] + DAY)
        b = fetch_candles(_config(candle_stub), "BTC", DAY, rows[0][0], rows[-1][0] + DAY)
        assert a == b
