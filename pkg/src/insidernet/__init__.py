"""Insider co-trading networks, hypergraphs and egonet anomaly ranking."""

from insidernet.ingest import (
    DailyQuote,
    DateSequence,
    IngestConfig,
    RowError,
    Side,
    TradeRecord,
    build_date_sequences,
    parse_quotes,
    parse_trades,
)

__all__ = [
    "DailyQuote",
    "DateSequence",
    "IngestConfig",
    "RowError",
    "Side",
    "TradeRecord",
    "build_date_sequences",
    "parse_quotes",
    "parse_trades",
]

__version__ = "0.1.0"
