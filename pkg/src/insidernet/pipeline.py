"""End-to-end run: files in, per-side artifact directory out."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Sequence

from insidernet import export
from insidernet.anomaly import fit_power_law, total_outlier_scores
from insidernet.hypergraph import hyperedge_size_distribution, mine_hyperedges, multi_edge_insiders
from insidernet.ingest import (
    DateSequence,
    IngestConfig,
    Side,
    TradeRecord,
    build_date_sequences,
    read_quotes,
    read_trades,
)
from insidernet.network import InsiderNetwork, build_network, egonet, egonet_counts, network_stats
from insidernet.profit import majority_profit_fraction, profit_series, quote_table
from insidernet.similarity import LcsVariant, Mode, SimilarityConfig, lcs_witness

LOGGER = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    trades: Path
    out_dir: Path
    quotes: Path | None = None
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    sides: tuple[Side, ...] = (Side.PURCHASE, Side.SALE)
    min_trades: int = 5
    k: int | None = None
    bin_base: float | None = None
    normalize: bool = False
    top_n: int = 10
    min_hyperedges: int = 4
    profit: bool = True
    threads: int = 1
    strict: bool = False

    def __post_init__(self):
        self.trades = Path(self.trades)
        self.out_dir = Path(self.out_dir)
        self.quotes = Path(self.quotes) if self.quotes is not None else None
        self.sides = tuple(Side.parse(s) for s in self.sides)
        if self.min_trades < 1 or self.top_n < 1 or self.threads < 1:
            raise ValueError("min_trades, top_n and threads must be >= 1")
        if self.min_hyperedges < 2:
            raise ValueError("min_hyperedges must be >= 2")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1")
        if self.bin_base is not None and self.bin_base <= 1:
            raise ValueError("bin_base must be > 1")


def _write(path: Path, text: str, written: list[Path]) -> None:
    path.write_text(text, encoding="utf-8")
    written.append(path)


def edge_witness_dates(
    net: InsiderNetwork,
    insider: str,
    seq_index: dict[tuple[str, str], DateSequence],
    config: SimilarityConfig,
) -> dict[str, set[date]]:
    """Union of shared dates over the insider's incident edges, per company."""
    out: dict[str, set[date]] = {}
    for nb in sorted(net.neighbors(insider)):
        e = net.edge(insider, nb)
        mine, theirs = seq_index[(insider, e.company)], seq_index[(nb, e.company)]
        if config.mode is Mode.OVERLAP:
            shared = set(mine.dates) & set(theirs.dates)
        else:
            shared = set(lcs_witness(mine, theirs, config.lcs_variant))
        out.setdefault(e.company, set()).update(shared)
    return out


def _profit_rows(insiders, date_sets, side, trades_by_insider, quotes, group):
    points, summary = [], []
    for ins in insiders:
        for company, dates in sorted(date_sets[ins].items()):
            series = profit_series(ins, company, side, dates, trades_by_insider.get(ins, []), quotes)
            points.extend(series.points)
            summary.append({
                "group": group,
                "insider_id": ins,
                "company": company,
                "points": len(series.points),
                "considered": series.considered,
                "skipped": series.skipped,
                "positive_fraction": majority_profit_fraction(series.points) if series.points else None,
            })
    return points, summary


def run_side(
    side: Side,
    sequences: Sequence[DateSequence],
    trades: Sequence[TradeRecord],
    quotes,
    config: PipelineConfig,
) -> list[Path]:
    out = config.out_dir / side.label
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    seqs = [s for s in sequences if s.side is side]
    sim = config.similarity

    net = build_network(seqs, side, sim, threads=config.threads)
    _write(out / "network.json", export.dumps(export.network_to_dict(net)), written)
    _write(out / "network.dot", export.network_dot(net, f"{side.label}_network", allow_empty=True), written)
    stats = network_stats(net)
    _write(out / "stats.json", export.dumps(stats), written)
    _write(out / "component_sizes.csv", export.histogram_csv("size", stats["component_sizes"]), written)

    hyper_sim = SimilarityConfig(
        mode=Mode.LCS,
        lcs_threshold_sale=sim.lcs_threshold_sale,
        lcs_threshold_purchase=sim.lcs_threshold_purchase,
        lcs_variant=LcsVariant.SUBSEQUENCE,
    )
    hyper = mine_hyperedges(seqs, side, hyper_sim, threads=config.threads)
    _write(out / "hyperedges.json", export.dumps(export.hypergraph_to_dict(hyper)), written)
    _write(out / "hypergraph.dot", export.hypergraph_dot(hyper, f"{side.label}_hypergraph", allow_empty=True), written)
    _write(out / "hyperedge_sizes.csv",
           export.histogram_csv("size", hyperedge_size_distribution(hyper), percent=True), written)
    multi = multi_edge_insiders(hyper, config.min_hyperedges)
    _write(out / "multi_hyperedge_insiders.json", export.dumps([
        {"insider_id": ins, "hyperedges": len(edges), "companies": sorted({e.company for e in edges})}
        for ins, edges in multi
    ]), written)

    egos = egonet_counts(net)
    fit = fit_power_law([(v, e) for _, v, e in egos], bin_base=config.bin_base)
    _write(out / "fit.json", export.dumps(export.fit_to_dict(fit)), written)
    report = total_outlier_scores(egos, fit, config.k, normalize=config.normalize)
    top = report[: config.top_n]
    _write(out / "scores.csv", export.scores_csv(report), written)
    _write(out / "top_scores.csv", export.scores_csv(top), written)
    egodir = out / "egonets"
    egodir.mkdir(exist_ok=True)
    for entry in top:
        _write(egodir / f"{entry.rank:03d}_{entry.insider_id}.dot",
               export.egonet_dot(net, egonet(net, entry.insider_id)), written)

    if quotes is not None:
        seq_index = {(s.insider_id, s.company): s for s in seqs}
        by_insider: dict[str, list[TradeRecord]] = {}
        for t in trades:
            if t.side is side:
                by_insider.setdefault(t.insider_id, []).append(t)
        top_ids = [r.insider_id for r in top]
        top_dates = {ins: edge_witness_dates(net, ins, seq_index, sim) for ins in top_ids}
        hyper_dates = {}
        for ins, edges in multi:
            per_company: dict[str, set[date]] = {}
            for e in edges:
                per_company.setdefault(e.company, set()).update(e.witness)
            hyper_dates[ins] = per_company
        pts_top, sum_top = _profit_rows(top_ids, top_dates, side, by_insider, quotes, "top_outliers")
        pts_hyp, sum_hyp = _profit_rows([i for i, _ in multi], hyper_dates, side, by_insider, quotes,
                                        "multi_hyperedge")
        _write(out / "profits_top.csv", export.profits_csv(pts_top), written)
        _write(out / "profits_hyper.csv", export.profits_csv(pts_hyp), written)
        _write(out / "profit_summary.json", export.dumps(sum_top + sum_hyp), written)
    return written


def run_pipeline(config: PipelineConfig) -> list[Path]:
    """Run every stage for each selected side; returns the files written."""
    ingest_cfg = IngestConfig(strict=config.strict)
    trades, trade_errors = read_trades(config.trades, ingest_cfg)
    quotes = None
    if config.profit and config.quotes is not None:
        quote_list, _ = read_quotes(config.quotes, ingest_cfg)
        quotes = quote_table(quote_list)
    sequences = build_date_sequences(trades, config.min_trades)
    LOGGER.info("%d trades (%d rejected rows), %d date sequences", len(trades), len(trade_errors), len(sequences))
    config.out_dir.mkdir(parents=True, exist_ok=True)

    if config.threads > 1 and len(config.sides) > 1:
        with ThreadPoolExecutor(max_workers=min(config.threads, len(config.sides))) as pool:
            parts = list(pool.map(lambda s: run_side(s, sequences, trades, quotes, config), config.sides))
    else:
        parts = [run_side(s, sequences, trades, quotes, config) for s in config.sides]
    return [p for part in parts for p in part]
