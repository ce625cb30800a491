"""Parsing and validation of trade filings and daily quotes.

Both files are UTF-8 CSV with a fixed header.  Malformed rows never abort a
parse (unless ``strict`` is set); they are returned as :class:`RowError`
entries alongside the good records.
"""

from __future__ import annotations

import csv
import io
import logging
from collections import defaultdict
from dataclasses import dataclass
from datetime import date
from decimal import Decimal, InvalidOperation
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Sequence

from insidernet.errors import StrictModeViolation, UnreadableStream

LOGGER = logging.getLogger(__name__)

TRADES_HEADER = ("insider_id", "insider_name", "company", "date", "side", "shares", "price")
QUOTES_HEADER = ("company", "date", "close", "volume")


class Side(str, Enum):
    PURCHASE = "P"
    SALE = "S"

    @property
    def label(self) -> str:
        return "purchase" if self is Side.PURCHASE else "sale"

    @classmethod
    def parse(cls, value: "str | Side") -> "Side":
        if isinstance(value, Side):
            return value
        key = str(value).strip().lower()
        if key in ("p", "purchase"):
            return cls.PURCHASE
        if key in ("s", "sale"):
            return cls.SALE
        raise ValueError(f"unknown side {value!r}")


@dataclass(frozen=True)
class TradeRecord:
    insider_id: str
    insider_name: str
    company: str
    date: date
    side: Side
    shares: int
    price: Decimal | None = None


@dataclass(frozen=True)
class DailyQuote:
    company: str
    date: date
    close: Decimal
    volume: int


@dataclass(frozen=True)
class DateSequence:
    """Distinct trading dates of one insider for one (company, side).

    ``trade_count`` is the number of underlying trades before same-day
    deduplication; it is what the minimum-trade filter looks at.
    """

    insider_id: str
    company: str
    side: Side
    dates: tuple[date, ...]
    trade_count: int = 0

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if self.trade_count == 0:
            object.__setattr__(self, "trade_count", len(self.dates))

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class RowError:
    line: int
    reason: str
    raw: str = ""


@dataclass(frozen=True)
class IngestConfig:
    strict: bool = False


def _read_text(stream: "IO[bytes] | IO[str] | bytes | str") -> str:
    if isinstance(stream, (bytes, bytearray)):
        data = bytes(stream)
    elif isinstance(stream, str):
        return stream
    else:
        try:
            data = stream.read()
        except (OSError, ValueError) as exc:
            raise UnreadableStream(str(exc)) from exc
        if isinstance(data, str):
            return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UnreadableStream(f"not valid UTF-8: {exc}") from exc


def _rows(text: str, header: Sequence[str]):
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        first = next(reader)
    except StopIteration:
        raise UnreadableStream("empty stream, header missing") from None
    except csv.Error as exc:
        raise UnreadableStream(str(exc)) from exc
    if tuple(c.strip() for c in first) != tuple(header):
        raise UnreadableStream(f"unexpected header {first!r}, expected {','.join(header)}")
    while True:
        try:
            row = next(reader)
        except StopIteration:
            return
        except csv.Error as exc:
            yield reader.line_num, None, str(exc)
            continue
        if not row:
            continue
        yield reader.line_num, row, None


def _parse_date(text: str) -> date:
    text = text.strip()
    if len(text) != 10:
        raise ValueError
    return date.fromisoformat(text)


def _parse_trade_row(row: list[str]) -> TradeRecord:
    if len(row) != len(TRADES_HEADER):
        raise ValueError(f"expected {len(TRADES_HEADER)} fields, got {len(row)}")
    insider_id, name, company, day, side, shares, price = row
    if not insider_id.strip():
        raise ValueError("empty insider_id")
    if not company.strip():
        raise ValueError("empty company")
    try:
        when = _parse_date(day)
    except ValueError:
        raise ValueError("invalid date") from None
    if side.strip() not in ("P", "S"):
        raise ValueError("invalid side")
    try:
        count = int(shares.strip())
    except ValueError:
        raise ValueError("invalid shares") from None
    if count <= 0:
        raise ValueError("non-positive shares")
    amount = None
    if price.strip():
        try:
            amount = Decimal(price.strip())
        except InvalidOperation:
            raise ValueError("invalid price") from None
        if not amount.is_finite() or amount < 0:
            raise ValueError("negative price")
    return TradeRecord(
        insider_id=insider_id.strip(),
        insider_name=name,
        company=company.strip(),
        date=when,
        side=Side(side.strip()),
        shares=count,
        price=amount,
    )


def parse_trades(stream, config: IngestConfig | None = None):
    """Parse a trades CSV stream.

    Returns ``(records, errors)``.  Raises :class:`StrictModeViolation` when
    ``config.strict`` is set and any row was rejected.
    """
    config = config or IngestConfig()
    records: list[TradeRecord] = []
    errors: list[RowError] = []
    for line, row, problem in _rows(_read_text(stream), TRADES_HEADER):
        if row is None:
            errors.append(RowError(line, problem or "unparseable row"))
            continue
        try:
            records.append(_parse_trade_row(row))
        except ValueError as exc:
            errors.append(RowError(line, str(exc), ",".join(row)))
    if errors:
        LOGGER.warning("trades: %d malformed row(s) skipped", len(errors))
        if config.strict:
            raise StrictModeViolation(errors)
    return records, errors


def parse_quotes(stream, config: IngestConfig | None = None):
    """Parse a daily quotes CSV stream; duplicates keep the first row."""
    config = config or IngestConfig()
    quotes: list[DailyQuote] = []
    errors: list[RowError] = []
    seen: set[tuple[str, date]] = set()
    for line, row, problem in _rows(_read_text(stream), QUOTES_HEADER):
        if row is None:
            errors.append(RowError(line, problem or "unparseable row"))
            continue
        raw = ",".join(row)
        if len(row) != len(QUOTES_HEADER):
            errors.append(RowError(line, f"expected {len(QUOTES_HEADER)} fields, got {len(row)}", raw))
            continue
        company, day, close, volume = (c.strip() for c in row)
        try:
            when = _parse_date(day)
        except ValueError:
            errors.append(RowError(line, "invalid date", raw))
            continue
        try:
            px = Decimal(close)
            if not px.is_finite():
                raise InvalidOperation
        except InvalidOperation:
            errors.append(RowError(line, "invalid close", raw))
            continue
        if px <= 0:
            errors.append(RowError(line, "non-positive close", raw))
            continue
        try:
            vol = int(volume)
        except ValueError:
            errors.append(RowError(line, "invalid volume", raw))
            continue
        if vol <= 0:
            errors.append(RowError(line, "non-positive volume", raw))
            continue
        if not company:
            errors.append(RowError(line, "empty company", raw))
            continue
        if (company, when) in seen:
            errors.append(RowError(line, "duplicate quote", raw))
            continue
        seen.add((company, when))
        quotes.append(DailyQuote(company, when, px, vol))
    if errors:
        LOGGER.warning("quotes: %d malformed row(s) skipped", len(errors))
        if config.strict:
            raise StrictModeViolation(errors)
    return quotes, errors


def read_trades(path: str | Path, config: IngestConfig | None = None):
    try:
        with open(path, "rb") as fh:
            return parse_trades(fh, config)
    except OSError as exc:
        raise UnreadableStream(f"{path}: {exc.strerror or exc}") from exc


def read_quotes(path: str | Path, config: IngestConfig | None = None):
    try:
        with open(path, "rb") as fh:
            return parse_quotes(fh, config)
    except OSError as exc:
        raise UnreadableStream(f"{path}: {exc.strerror or exc}") from exc


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def serialize_trades(records: Iterable[TradeRecord]) -> str:
    return _csv_text(
        TRADES_HEADER,
        (
            (
                r.insider_id,
                r.insider_name,
                r.company,
                r.date.isoformat(),
                r.side.value,
                r.shares,
                "" if r.price is None else str(r.price),
            )
            for r in records
        ),
    )


def serialize_quotes(quotes: Iterable[DailyQuote]) -> str:
    return _csv_text(
        QUOTES_HEADER,
        ((q.company, q.date.isoformat(), str(q.close), q.volume) for q in quotes),
    )


def build_date_sequences(trades: Iterable[TradeRecord], min_trades: int = 5) -> list[DateSequence]:
    """Group trades into per-(insider, company, side) date sequences.

    Groups with fewer than ``min_trades`` trades (counted before same-day
    deduplication) are dropped.  Output is sorted by insider, company, side.
    """
    if min_trades < 1:
        raise ValueError("min_trades must be >= 1")
    counts: dict[tuple[str, str, Side], int] = defaultdict(int)
    dates: dict[tuple[str, str, Side], set[date]] = defaultdict(set)
    for t in trades:
        key = (t.insider_id, t.company, t.side)
        counts[key] += 1
        dates[key].add(t.date)
    out = []
    for key in sorted(counts, key=lambda k: (k[0], k[1], k[2].value)):
        if counts[key] >= min_trades:
            insider_id, company, side = key
            out.append(DateSequence(insider_id, company, side, tuple(sorted(dates[key])), counts[key]))
    return out
