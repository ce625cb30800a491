"""Command line entry point.

Settings come from, in increasing priority: built-in defaults, an INI config
file (``--config`` or ``$INSIDERNET_CONFIG``, section ``[insidernet]``) and
command line flags.  Config keys use the long flag names with dashes turned
into underscores, e.g.::

    [insidernet]
    trades = data/trades.csv
    quotes = data/quotes.csv
    out = results
    side = both
    mode = lcs
    t_sale = 5
    t_purchase = 10
    top_n = 10

Exit codes: 0 success, 1 unreadable or malformed input, 2 degenerate
analysis.  Failures also print a one-line JSON object on stderr.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from datetime import date
from pathlib import Path

from insidernet import export
from insidernet.errors import (
    DegenerateInput,
    EmptyStructure,
    InfeasibleConfig,
    InsiderNetError,
    StrictModeViolation,
    UnreadableStream,
)
from insidernet.hypergraph import hyperedge_size_distribution, mine_hyperedges, multi_edge_insiders
from insidernet.ingest import IngestConfig, Side, build_date_sequences, read_quotes, read_trades
from insidernet.network import build_network, network_stats
from insidernet.pipeline import PipelineConfig, run_pipeline, run_side
from insidernet.profit import quote_table
from insidernet.similarity import LcsVariant, Mode, SimilarityConfig
from insidernet.synth import SynthConfig, generate

CONFIG_ENV = "INSIDERNET_CONFIG"
SECTION = "insidernet"

# key -> (type, default)
SETTINGS = {
    "trades": (str, None),
    "quotes": (str, None),
    "out": (str, "results"),
    "side": (str, "both"),
    "mode": (str, "lcs"),
    "variant": (str, "subsequence"),
    "threshold": (float, 0.5),
    "t": (int, None),
    "t_sale": (int, 5),
    "t_purchase": (int, 10),
    "min_trades": (int, 5),
    "k": (int, None),
    "bin_base": (float, None),
    "normalize": (bool, False),
    "top_n": (int, 10),
    "min_hyperedges": (int, 4),
    "threads": (int, 1),
    "strict": (bool, False),
    "no_profit": (bool, False),
}


class UsageError(Exception):
    pass


def _add_io(p: argparse.ArgumentParser, quotes: bool = False) -> None:
    p.add_argument("--trades", help="trades CSV file")
    if quotes:
        p.add_argument("--quotes", help="daily quotes CSV file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--strict", action="store_true", default=None, help="fail on any malformed row")
    p.add_argument("--min-trades", type=int, help="minimum trades per (insider, company, side)")


def _add_similarity(p: argparse.ArgumentParser) -> None:
    p.add_argument("--side", choices=["purchase", "sale", "both"])
    p.add_argument("--mode", choices=["overlap", "lcs"])
    p.add_argument("--variant", choices=["subsequence", "contiguous"])
    p.add_argument("--threshold", type=float, help="overlap similarity threshold")
    p.add_argument("--t", type=int, help="LCS threshold applied to every selected side")
    p.add_argument("--t-sale", type=int)
    p.add_argument("--t-purchase", type=int)
    p.add_argument("--threads", type=int)


def _add_scoring(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, help="LOF neighbourhood size (default min(10, n-1))")
    p.add_argument("--bin-base", type=float, help="log-bin base for the median fit")
    p.add_argument("--normalize", action="store_true", default=None, help="min-max normalise score and LOF")
    p.add_argument("--top-n", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="insidernet", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help=f"INI config file (default ${CONFIG_ENV})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="validate input files and report row errors")
    _add_io(p, quotes=True)

    p = sub.add_parser("build-net", help="build insider networks and component statistics")
    _add_io(p)
    _add_similarity(p)

    p = sub.add_parser("mine-hyper", help="mine co-trading hyperedges")
    _add_io(p)
    _add_similarity(p)
    p.add_argument("--min-hyperedges", type=int)

    p = sub.add_parser("score", help="egonet power-law fit and outlier ranking")
    _add_io(p)
    _add_similarity(p)
    _add_scoring(p)

    for name, text in (("profit", "profit series for flagged insiders"), ("pipeline", "run every stage")):
        p = sub.add_parser(name, help=text)
        _add_io(p, quotes=True)
        _add_similarity(p)
        _add_scoring(p)
        p.add_argument("--min-hyperedges", type=int)
        if name == "pipeline":
            p.add_argument("--no-profit", action="store_true", default=None)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--companies", type=int, default=20)
    p.add_argument("--insiders-per-company", type=int, nargs=2, default=(5, 15), metavar=("LO", "HI"))
    p.add_argument("--trades-per-insider", type=int, nargs=2, default=(5, 15), metavar=("LO", "HI"))
    p.add_argument("--cliques", type=int, default=5)
    p.add_argument("--clique-size", type=int, nargs=2, default=(4, 8), metavar=("LO", "HI"))
    p.add_argument("--shared-length", type=int, default=10)
    p.add_argument("--hubs", type=int, default=1)
    p.add_argument("--cliques-per-hub", type=int, default=3)
    p.add_argument("--profit-bias", type=float, default=0.5)
    p.add_argument("--planted-side", choices=["purchase", "sale", "both"], default="sale")
    p.add_argument("--start", default="2012-01-02")
    p.add_argument("--end", default="2015-12-31")
    return parser


def _load_file_settings(path: str | None) -> dict:
    if not path:
        return {}
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise UnreadableStream(f"{path}: {exc.strerror or exc}") from exc
    if not parser.has_section(SECTION):
        raise UsageError(f"{path}: missing [{SECTION}] section")
    out = {}
    for key, raw in parser.items(SECTION):
        key = key.replace("-", "_")
        if key not in SETTINGS:
            raise UsageError(f"{path}: unknown key {key!r}")
        kind = SETTINGS[key][0]
        try:
            out[key] = parser.getboolean(SECTION, key) if kind is bool else kind(raw)
        except ValueError as exc:
            raise UsageError(f"{path}: bad value for {key}: {raw!r}") from exc
    return out


def resolve_settings(args: argparse.Namespace) -> dict:
    path = args.config or os.environ.get(CONFIG_ENV)
    settings = {k: default for k, (_, default) in SETTINGS.items()}
    settings.update(_load_file_settings(path))
    for key in SETTINGS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _sides(settings: dict) -> tuple[Side, ...]:
    if settings["side"] == "both":
        return (Side.PURCHASE, Side.SALE)
    return (Side.parse(settings["side"]),)


def similarity_from(settings: dict) -> SimilarityConfig:
    t_sale, t_purchase = settings["t_sale"], settings["t_purchase"]
    if settings["t"] is not None:
        sides = _sides(settings)
        if Side.SALE in sides:
            t_sale = settings["t"]
        if Side.PURCHASE in sides:
            t_purchase = settings["t"]
    return SimilarityConfig(
        mode=Mode(settings["mode"]),
        overlap_threshold=settings["threshold"],
        lcs_threshold_sale=t_sale,
        lcs_threshold_purchase=t_purchase,
        lcs_variant=LcsVariant(settings["variant"]),
    )


def pipeline_config(settings: dict, profit: bool = True) -> PipelineConfig:
    if not settings["trades"]:
        raise UsageError("no trades file given (--trades or config key 'trades')")
    return PipelineConfig(
        trades=Path(settings["trades"]),
        quotes=Path(settings["quotes"]) if settings["quotes"] else None,
        out_dir=Path(settings["out"]),
        similarity=similarity_from(settings),
        sides=_sides(settings),
        min_trades=settings["min_trades"],
        k=settings["k"],
        bin_base=settings["bin_base"],
        normalize=settings["normalize"],
        top_n=settings["top_n"],
        min_hyperedges=settings["min_hyperedges"],
        profit=profit and not settings["no_profit"],
        threads=settings["threads"],
        strict=settings["strict"],
    )


def _load_sequences(cfg: PipelineConfig):
    trades, _ = read_trades(cfg.trades, IngestConfig(strict=cfg.strict))
    return trades, build_date_sequences(trades, cfg.min_trades)


def cmd_ingest_check(settings: dict) -> dict:
    if not settings["trades"] and not settings["quotes"]:
        raise UsageError("nothing to check: give --trades and/or --quotes")
    cfg = IngestConfig(strict=settings["strict"])
    report: dict = {}
    if settings["trades"]:
        trades, errors = read_trades(settings["trades"], cfg)
        seqs = build_date_sequences(trades, settings["min_trades"])
        report["trades"] = {
            "records": len(trades),
            "errors": [{"line": e.line, "reason": e.reason} for e in errors],
            "date_sequences": len(seqs),
            "insiders": len({t.insider_id for t in trades}),
            "companies": len({t.company for t in trades}),
            "purchases": sum(1 for t in trades if t.side is Side.PURCHASE),
            "sales": sum(1 for t in trades if t.side is Side.SALE),
        }
    if settings["quotes"]:
        quotes, errors = read_quotes(settings["quotes"], cfg)
        report["quotes"] = {
            "records": len(quotes),
            "errors": [{"line": e.line, "reason": e.reason} for e in errors],
        }
    return report


def cmd_build_net(settings: dict) -> dict:
    cfg = pipeline_config(settings, profit=False)
    _, seqs = _load_sequences(cfg)
    summary = {}
    for side in cfg.sides:
        out = cfg.out_dir / side.label
        out.mkdir(parents=True, exist_ok=True)
        net = build_network([s for s in seqs if s.side is side], side, cfg.similarity, threads=cfg.threads)
        stats = network_stats(net)
        (out / "network.json").write_text(export.dumps(export.network_to_dict(net)), encoding="utf-8")
        (out / "network.dot").write_text(export.network_dot(net, allow_empty=True), encoding="utf-8")
        (out / "stats.json").write_text(export.dumps(stats), encoding="utf-8")
        (out / "component_sizes.csv").write_text(export.histogram_csv("size", stats["component_sizes"]),
                                                 encoding="utf-8")
        summary[side.label] = stats
    return summary


def cmd_mine_hyper(settings: dict) -> dict:
    cfg = pipeline_config(settings, profit=False)
    _, seqs = _load_sequences(cfg)
    summary = {}
    for side in cfg.sides:
        out = cfg.out_dir / side.label
        out.mkdir(parents=True, exist_ok=True)
        h = mine_hyperedges([s for s in seqs if s.side is side], side, cfg.similarity, threads=cfg.threads)
        dist = hyperedge_size_distribution(h)
        multi = multi_edge_insiders(h, cfg.min_hyperedges)
        (out / "hyperedges.json").write_text(export.dumps(export.hypergraph_to_dict(h)), encoding="utf-8")
        (out / "hypergraph.dot").write_text(export.hypergraph_dot(h, allow_empty=True), encoding="utf-8")
        (out / "hyperedge_sizes.csv").write_text(export.histogram_csv("size", dist, percent=True),
                                                 encoding="utf-8")
        summary[side.label] = {
            "hyperedges": len(h.hyperedges),
            "sizes": {str(k): n for k, (n, _) in dist.items()},
            "multi_hyperedge_insiders": [ins for ins, _ in multi],
        }
    return summary


def cmd_score(settings: dict) -> dict:
    from insidernet.anomaly import fit_power_law, total_outlier_scores
    from insidernet.network import egonet_counts

    cfg = pipeline_config(settings, profit=False)
    _, seqs = _load_sequences(cfg)
    summary = {}
    for side in cfg.sides:
        out = cfg.out_dir / side.label
        out.mkdir(parents=True, exist_ok=True)
        net = build_network([s for s in seqs if s.side is side], side, cfg.similarity, threads=cfg.threads)
        egos = egonet_counts(net)
        fit = fit_power_law([(v, e) for _, v, e in egos], bin_base=cfg.bin_base)
        report = total_outlier_scores(egos, fit, cfg.k, normalize=cfg.normalize)
        (out / "fit.json").write_text(export.dumps(export.fit_to_dict(fit)), encoding="utf-8")
        (out / "scores.csv").write_text(export.scores_csv(report), encoding="utf-8")
        (out / "top_scores.csv").write_text(export.scores_csv(report[: cfg.top_n]), encoding="utf-8")
        summary[side.label] = {"exponent": fit.exponent, "top": [r.insider_id for r in report[: cfg.top_n]]}
    return summary


def cmd_profit(settings: dict) -> dict:
    cfg = pipeline_config(settings)
    if cfg.quotes is None:
        raise UsageError("profit needs a quotes file (--quotes)")
    trades, seqs = _load_sequences(cfg)
    quote_list, _ = read_quotes(cfg.quotes, IngestConfig(strict=cfg.strict))
    quotes = quote_table(quote_list)
    written = []
    for side in cfg.sides:
        written += run_side(side, seqs, trades, quotes, cfg)
    return {"written": [str(p) for p in written if p.name.startswith("profit")]}


def cmd_pipeline(settings: dict) -> dict:
    cfg = pipeline_config(settings)
    written = run_pipeline(cfg)
    return {"written": len(written), "out": str(cfg.out_dir)}


def cmd_synth(args: argparse.Namespace) -> dict:
    config = SynthConfig(
        seed=args.seed,
        n_companies=args.companies,
        insiders_per_company=tuple(args.insiders_per_company),
        trades_per_insider=tuple(args.trades_per_insider),
        date_span=(date.fromisoformat(args.start), date.fromisoformat(args.end)),
        n_planted_cliques=args.cliques,
        clique_size=tuple(args.clique_size),
        shared_subsequence_length=args.shared_length,
        n_planted_hubs=args.hubs,
        cliques_per_hub=args.cliques_per_hub,
        profit_bias=args.profit_bias,
        planted_side=args.planted_side if args.planted_side == "both" else Side.parse(args.planted_side),
    )
    trades, quotes, truth = generate(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trades.csv").write_text(trades, encoding="utf-8")
    (out / "quotes.csv").write_text(quotes, encoding="utf-8")
    (out / "truth.json").write_text(export.dumps(truth), encoding="utf-8")
    return {"trades": str(out / "trades.csv"), "quotes": str(out / "quotes.csv"), "truth": str(out / "truth.json")}


COMMANDS = {
    "ingest-check": cmd_ingest_check,
    "build-net": cmd_build_net,
    "mine-hyper": cmd_mine_hyper,
    "score": cmd_score,
    "profit": cmd_profit,
    "pipeline": cmd_pipeline,
}


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit": code}, sort_keys=True) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            result = cmd_synth(args)
        else:
            result = COMMANDS[args.command](resolve_settings(args))
    except (UnreadableStream, StrictModeViolation, UsageError) as exc:
        return _fail(1, type(exc).__name__, str(exc))
    except (DegenerateInput, EmptyStructure) as exc:
        return _fail(2, type(exc).__name__, str(exc))
    except (InfeasibleConfig, ValueError) as exc:
        return _fail(1, type(exc).__name__, str(exc))
    except (InsiderNetError, OSError) as exc:
        return _fail(1, type(exc).__name__, str(exc))
    print(json.dumps(result, sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
