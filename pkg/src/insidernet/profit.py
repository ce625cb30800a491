"""Signed normalized dollar amounts and per-insider profit series."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping

from insidernet.errors import EmptySeries, MissingPrice, MissingQuote
from insidernet.ingest import DailyQuote, Side, TradeRecord


@dataclass(frozen=True)
class ProfitPoint:
    insider_id: str
    company: str
    date: date
    side: Side
    amount: float


@dataclass(frozen=True)
class ProfitSeries:
    points: list[ProfitPoint]
    considered: int
    skipped: int

    @property
    def skipped_fraction(self) -> float:
        return self.skipped / self.considered if self.considered else 0.0


QuoteTable = Mapping[tuple[str, date], DailyQuote]


def quote_table(quotes: Iterable[DailyQuote]) -> dict[tuple[str, date], DailyQuote]:
    return {(q.company, q.date): q for q in quotes}


def signed_normalized_amount(trade: TradeRecord, quote: DailyQuote | None) -> float:
    """Profit proxy of one trade against the same-day close.

    ``sign * (close - price) * shares / (close * volume)`` with sign +1 for a
    purchase and -1 for a sale, clamped to [-1, 1].
    """
    if trade.price is None:
        raise MissingPrice(f"{trade.insider_id} {trade.company} {trade.date} has no price")
    if quote is None or (quote.company, quote.date) != (trade.company, trade.date):
        raise MissingQuote(f"no quote for {trade.company} on {trade.date}")
    sign = 1 if trade.side is Side.PURCHASE else -1
    close = float(quote.close)
    spread = close - float(trade.price)
    if spread == 0:
        return 0.0
    amount = sign * spread * trade.shares / (close * quote.volume)
    return max(-1.0, min(1.0, amount))


def profit_series(
    insider: str,
    company: str,
    side: Side | str,
    dates: Iterable[date],
    trades: Iterable[TradeRecord],
    quotes: QuoteTable,
) -> ProfitSeries:
    """Amounts for the insider's trades falling on ``dates``, oldest first.

    Trades without a price or without a matching quote are skipped and
    counted rather than raising.
    """
    side = Side.parse(side)
    wanted = set(dates)
    picked = [
        t for t in trades
        if t.insider_id == insider and t.company == company and t.side is side and t.date in wanted
    ]
    picked.sort(key=lambda t: (t.date, t.shares, str(t.price)))
    points = []
    skipped = 0
    for t in picked:
        quote = quotes.get((t.company, t.date))
        if t.price is None or quote is None:
            skipped += 1
            continue
        points.append(ProfitPoint(t.insider_id, t.company, t.date, t.side, signed_normalized_amount(t, quote)))
    return ProfitSeries(points, len(picked), skipped)


def majority_profit_fraction(series: Iterable[ProfitPoint]) -> float:
    points = list(series)
    if not points:
        raise EmptySeries("profit series is empty")
    return sum(1 for p in points if p.amount > 0) / len(points)
