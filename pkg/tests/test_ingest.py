from __future__ import annotations

import io
from datetime import date
from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from insidernet.errors import StrictModeViolation, UnreadableStream
from insidernet.ingest import (
    DailyQuote,
    DateSequence,
    IngestConfig,
    Side,
    TradeRecord,
    build_date_sequences,
    parse_quotes,
    parse_trades,
    read_quotes,
    read_trades,
    serialize_quotes,
    serialize_trades,
)

TRADES_HEAD = "insider_id,insider_name,company,date,side,shares,price\n"
QUOTES_HEAD = "company,date,close,volume\n"


def trade(insider="A", company="ACME", when=date(2014, 1, 2), side=Side.SALE, shares=100, price="10.00"):
    return TradeRecord(insider, "Name", company, when, side, shares, None if price is None else Decimal(price))


def test_parse_trades_reads_valid_rows():
    text = TRADES_HEAD + "A,Ann,ACME,2014-01-02,S,100,10.50\nB,Bob,ACME,2014-01-03,P,5,\n"
    records, errors = parse_trades(io.BytesIO(text.encode()))
    assert errors == []
    assert records[0] == TradeRecord("A", "Ann", "ACME", date(2014, 1, 2), Side.SALE, 100, Decimal("10.50"))
    assert records[1].side is Side.PURCHASE
    assert records[1].price is None


@pytest.mark.parametrize(
    "row, reason",
    [
        ("A,Ann,ACME,2014-13-40,S,100,1", "invalid date"),
        ("A,Ann,ACME,2014-01-02,X,100,1", "invalid side"),
        ("A,Ann,ACME,2014-01-02,S,0,1", "non-positive shares"),
        ("A,Ann,ACME,2014-01-02,S,abc,1", "invalid shares"),
        ("A,Ann,ACME,2014-01-02,S,10,-1", "negative price"),
        ("A,Ann,ACME,2014-01-02,S,10", "expected 7 fields, got 6"),
        (",Ann,ACME,2014-01-02,S,10,1", "empty insider_id"),
    ],
)
def test_malformed_trade_rows_are_reported_with_line(row, reason):
    text = TRADES_HEAD + "A,Ann,ACME,2014-01-02,S,100,1\n" + row + "\n"
    records, errors = parse_trades(text)
    assert len(records) == 1
    assert [(e.line, e.reason) for e in errors] == [(3, reason)]


def test_strict_mode_raises_with_all_errors():
    text = TRADES_HEAD + "A,Ann,ACME,bad,S,100,1\nB,Bob,ACME,2014-01-02,S,x,1\n"
    with pytest.raises(StrictModeViolation) as info:
        parse_trades(text, IngestConfig(strict=True))
    assert len(info.value.errors) == 2


def test_bad_header_is_unreadable():
    with pytest.raises(UnreadableStream):
        parse_trades("who,what\n1,2\n")
    with pytest.raises(UnreadableStream):
        parse_trades(b"")
    with pytest.raises(UnreadableStream):
        parse_trades(b"\xff\xfe\x00garbage")


def test_missing_file_names_path(tmp_path):
    missing = tmp_path / "nope.csv"
    with pytest.raises(UnreadableStream, match="nope.csv"):
        read_trades(missing)
    with pytest.raises(UnreadableStream, match="nope.csv"):
        read_quotes(missing)


def test_quotes_validation_and_duplicates():
    text = QUOTES_HEAD + (
        "ACME,2014-01-02,10.5,1000\n"
        "ACME,2014-01-02,11.0,2000\n"
        "ACME,2014-01-03,0,1000\n"
        "ACME,2014-01-06,10,0\n"
        "ACME,20140107,10,1\n"
    )
    quotes, errors = parse_quotes(text)
    assert quotes == [DailyQuote("ACME", date(2014, 1, 2), Decimal("10.5"), 1000)]
    assert [e.reason for e in errors] == [
        "duplicate quote", "non-positive close", "non-positive volume", "invalid date"]


def test_date_sequence_dedups_same_day_trades():
    trades = [trade(when=date(2014, 1, d)) for d in (2, 2, 3, 3, 6, 6)]
    (s,) = build_date_sequences(trades, min_trades=5)
    assert s.dates == (date(2014, 1, 2), date(2014, 1, 3), date(2014, 1, 6))
    assert len(s) == 3
    assert s.trade_count == 6


def test_min_trades_filter_is_per_group():
    trades = [trade(when=date(2014, 1, d)) for d in range(2, 6)]
    trades += [trade(when=date(2014, 2, d), side=Side.PURCHASE) for d in range(2, 8)]
    seqs = build_date_sequences(trades, min_trades=5)
    assert [(s.side, len(s)) for s in seqs] == [(Side.PURCHASE, 6)]


def test_date_sequence_rejects_unsorted():
    with pytest.raises(ValueError):
        DateSequence("A", "ACME", Side.SALE, (date(2014, 1, 3), date(2014, 1, 2)))


def test_side_parse_accepts_labels():
    assert Side.parse("sale") is Side.SALE
    assert Side.parse("P") is Side.PURCHASE
    assert Side.SALE.label == "sale"
    with pytest.raises(ValueError):
        Side.parse("hold")


dates = st.dates(min_value=date(2010, 1, 1), max_value=date(2016, 12, 31))
trade_records = st.builds(
    TradeRecord,
    insider_id=st.sampled_from(["A", "B", "C"]),
    insider_name=st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")), max_size=12),
    company=st.sampled_from(["ACME", "GLOBEX"]),
    date=dates,
    side=st.sampled_from(list(Side)),
    shares=st.integers(1, 10**7),
    price=st.one_of(st.none(), st.decimals(min_value=0, max_value=10**5, places=2)),
)


@settings(max_examples=100, deadline=None)
@given(st.lists(trade_records, max_size=30))
def test_trades_roundtrip(records):
    text = serialize_trades(records)
    parsed, errors = parse_trades(text)
    assert errors == []
    assert parsed == records
    assert serialize_trades(parsed) == text


@settings(max_examples=50, deadline=None)
@given(st.lists(trade_records, max_size=60), st.integers(1, 6))
def test_date_sequences_invariants(records, min_trades):
    seqs = build_date_sequences(records, min_trades)
    keys = [(s.insider_id, s.company, s.side.value) for s in seqs]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    for s in seqs:
        assert list(s.dates) == sorted(set(s.dates))
        assert s.trade_count >= min_trades
        mine = [r for r in records if (r.insider_id, r.company, r.side) == (s.insider_id, s.company, s.side)]
        assert set(s.dates) == {r.date for r in mine}
        assert s.trade_count == len(mine)


def test_quotes_roundtrip():
    quotes = [DailyQuote("ACME", date(2014, 1, 2), Decimal("10.10"), 5), DailyQuote("B", date(2014, 1, 3), Decimal("3"), 1)]
    text = serialize_quotes(quotes)
    assert parse_quotes(text) == (quotes, [])


def test_documented_rows():
    records, _ = parse_trades(TRADES_HEAD + "I001,John Doe,ACME,2014-03-05,P,100,9.50\n")
    assert records == [TradeRecord("I001", "John Doe", "ACME", date(2014, 3, 5), Side.PURCHASE, 100, Decimal("9.50"))]
    quotes, _ = parse_quotes(QUOTES_HEAD + "ACME,2014-03-05,10.00,1000000\n")
    assert quotes == [DailyQuote("ACME", date(2014, 3, 5), Decimal("10.00"), 1_000_000)]


def test_min_trades_boundary():
    five = [trade(when=date(2014, 1, d)) for d in range(2, 7)]
    assert [len(s) for s in build_date_sequences(five, 5)] == [5]
    assert build_date_sequences(five[:4], 5) == []
    assert build_date_sequences([], 5) == []
    with pytest.raises(ValueError):
        build_date_sequences(five, 0)
