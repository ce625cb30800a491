"""Synthetic insider-trading datasets with planted structure.

Background insiders trade on dates drawn independently from their company's
weekday calendar.  On top of that the generator plants

* cliques: groups of insiders of one company sharing one date sequence
  (``clique_mode="shared"``) or sharing a distinct sequence per pair
  (``clique_mode="pairwise"``);
* hubs: extra insiders that copy the shared sequence of several cliques, each
  in a different company, and so bridge otherwise separate components.

Randomness: ``SeedSequence(seed).spawn(n_companies + 2)``.  Child ``c`` drives
company ``c`` (prices and background insiders), child ``n_companies`` drives
planted structure and planted-trade pricing, the last child shuffles insider
ids.  The output therefore depends only on the seed and the config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from decimal import Decimal
from typing import Iterable

import numpy as np
from scipy import stats

from insidernet.errors import InfeasibleConfig, UnknownClique
from insidernet.ingest import DailyQuote, Side, TradeRecord, serialize_quotes, serialize_trades

CENT = Decimal("0.01")


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 42
    n_companies: int = 20
    insiders_per_company: tuple[int, int] = (5, 15)
    trades_per_insider: tuple[int, int] = (5, 15)
    date_span: tuple[date, date] = (date(2012, 1, 2), date(2015, 12, 31))
    n_planted_cliques: int = 5
    clique_size: tuple[int, int] = (4, 8)
    shared_subsequence_length: int = 10
    n_planted_hubs: int = 1
    cliques_per_hub: int = 3
    profit_bias: float = 0.5
    planted_side: Side | str = Side.SALE
    clique_mode: str = "shared"
    extra_dates_per_member: tuple[int, int] = (0, 5)
    sale_fraction: float = 0.7
    missing_price_rate: float = 0.05
    repeat_rate: float = 0.02

    def clique_side(self, index: int) -> Side:
        """Side of clique ``index``; "both" alternates sale, purchase, sale, ..."""
        if self.planted_side == "both":
            return Side.SALE if index % 2 == 0 else Side.PURCHASE
        return Side.parse(self.planted_side)

    def validate(self) -> None:
        for name in ("insiders_per_company", "trades_per_insider", "clique_size", "extra_dates_per_member"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0:
                raise InfeasibleConfig(f"{name} range {lo}..{hi} is empty")
        if self.trades_per_insider[0] < 1:
            raise InfeasibleConfig("trades_per_insider must be >= 1")
        if self.n_companies < 1:
            raise InfeasibleConfig("need at least one company")
        if self.n_planted_cliques and self.clique_size[0] < 2:
            raise InfeasibleConfig("cliques need at least two members")
        if not 0.0 <= self.profit_bias <= 1.0:
            raise InfeasibleConfig("profit_bias must lie in [0, 1]")
        if self.clique_mode not in ("shared", "pairwise"):
            raise InfeasibleConfig(f"unknown clique_mode {self.clique_mode!r}")
        days = len(weekday_calendar(*self.date_span))
        per_clique = self.shared_subsequence_length
        if self.clique_mode == "pairwise":
            per_clique *= math.comb(self.clique_size[1], 2)
        if days < per_clique + self.extra_dates_per_member[1]:
            raise InfeasibleConfig(
                f"date span has {days} weekdays, shorter than the {per_clique} shared dates required"
            )
        if days < self.trades_per_insider[1]:
            raise InfeasibleConfig("date span shorter than trades_per_insider")
        if self.n_planted_hubs:
            if self.cliques_per_hub > min(self.n_companies, self.n_planted_cliques):
                raise InfeasibleConfig("each hub needs its cliques in distinct companies")
            if self.n_planted_hubs * self.cliques_per_hub > self.n_planted_cliques:
                raise InfeasibleConfig("not enough planted cliques for the requested hubs")


def weekday_calendar(start: date, end: date) -> list[date]:
    days = []
    d = start
    while d <= end:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return days


@dataclass
class PlantedClique:
    index: int
    company: str
    side: Side
    members: list[int]
    dates: list[date]
    pair_dates: dict[tuple[int, int], list[date]] = field(default_factory=dict)


@dataclass
class _Trade:
    insider: int
    company: str
    date: date
    side: Side
    shares: int
    price: Decimal | None


@dataclass
class SynthDataset:
    """Mutable generation state; insiders are integer slots until export."""

    config: SynthConfig
    calendar: list[date]
    companies: list[str]
    closes: dict[str, np.ndarray]
    volumes: dict[str, np.ndarray]
    trades: list[_Trade]
    cliques: list[PlantedClique]
    hubs: dict[int, list[int]]
    n_insiders: int
    rng: np.random.Generator
    id_seed: np.random.SeedSequence
    _ids: list[str] | None = field(default=None, repr=False)
    _day_cache: dict[date, int] | None = field(default=None, repr=False)

    def close(self, company: str, day: date) -> Decimal:
        return Decimal(str(self.closes[company][self._day_index[day]])).quantize(CENT)

    @property
    def _day_index(self) -> dict[date, int]:
        if self._day_cache is None:
            self._day_cache = {d: i for i, d in enumerate(self.calendar)}
        return self._day_cache

    def new_insider(self) -> int:
        self.n_insiders += 1
        self._ids = None
        return self.n_insiders - 1

    def insider_ids(self) -> list[str]:
        if self._ids is None or len(self._ids) != self.n_insiders:
            width = max(6, len(str(self.n_insiders)))
            labels = [f"I{k:0{width}d}" for k in range(1, self.n_insiders + 1)]
            order = np.random.default_rng(self.id_seed).permutation(self.n_insiders)
            self._ids = [labels[i] for i in order]
        return self._ids

    def planted_trade(self, insider: int, company: str, day: date, side: Side) -> _Trade:
        close = self.close(company, day)
        favorable = self.rng.random() < self.config.profit_bias
        spread = max(CENT, (close * Decimal(str(round(self.rng.uniform(0.005, 0.05), 4)))).quantize(CENT))
        # purchases profit below the close, sales above it
        above = (side is Side.SALE) == favorable
        price = close + spread if above else close - spread
        shares = int(self.rng.integers(100, 5000))
        return _Trade(insider, company, day, side, shares, price)

    def records(self) -> list[TradeRecord]:
        ids = self.insider_ids()
        out = [
            TradeRecord(ids[t.insider], f"Insider {ids[t.insider][1:]}", t.company, t.date, t.side, t.shares, t.price)
            for t in self.trades
        ]
        out.sort(key=lambda r: (r.date, r.company, r.insider_id, r.side.value, r.shares, str(r.price)))
        return out

    def quotes(self) -> list[DailyQuote]:
        used = sorted({(t.company, t.date) for t in self.trades})
        return [
            DailyQuote(c, d, self.close(c, d), int(self.volumes[c][self._day_index[d]]))
            for c, d in used
        ]

    def ground_truth(self) -> dict:
        ids = self.insider_ids()
        return {
            "cliques": [
                {
                    "company": q.company,
                    "side": q.side.value,
                    "members": sorted(ids[m] for m in q.members),
                    "dates": [d.isoformat() for d in q.dates],
                }
                for q in self.cliques
            ],
            "hubs": [
                {
                    "insider_id": ids[h],
                    "cliques": sorted(cl),
                    "companies": sorted(self.cliques[c].company for c in cl),
                }
                for h, cl in sorted(self.hubs.items(), key=lambda kv: ids[kv[0]])
            ],
        }


def _company_prices(rng: np.random.Generator, n_days: int) -> tuple[np.ndarray, np.ndarray]:
    start = rng.uniform(10, 200)
    steps = rng.normal(0.0003, 0.02, size=n_days)
    closes = np.round(np.maximum(start * np.exp(np.cumsum(steps)), 5.0), 2)
    volumes = rng.integers(100_000, 5_000_000, size=n_days)
    return closes, volumes


def _background(ds: SynthDataset, company: str, rng: np.random.Generator) -> None:
    cfg = ds.config
    n_days = len(ds.calendar)
    lo, hi = cfg.insiders_per_company
    for _ in range(int(rng.integers(lo, hi + 1))):
        insider = ds.new_insider()
        side = Side.SALE if rng.random() < cfg.sale_fraction else Side.PURCHASE
        n = int(rng.integers(cfg.trades_per_insider[0], cfg.trades_per_insider[1] + 1))
        for k in sorted(rng.choice(n_days, size=n, replace=False)):
            day = ds.calendar[k]
            copies = 2 if rng.random() < cfg.repeat_rate else 1
            for _ in range(copies):
                close = float(ds.closes[company][k])
                price = None
                if rng.random() >= cfg.missing_price_rate:
                    price = Decimal(str(round(max(0.01, close * (1 + rng.normal(0, 0.02))), 2))).quantize(CENT)
                ds.trades.append(_Trade(insider, company, day, side, int(rng.integers(100, 5000)), price))


def _plant_cliques(ds: SynthDataset) -> None:
    cfg = ds.config
    rng = ds.rng
    n_days = len(ds.calendar)
    for c in range(cfg.n_planted_cliques):
        company = ds.companies[c % len(ds.companies)]
        size = int(rng.integers(cfg.clique_size[0], cfg.clique_size[1] + 1))
        members = [ds.new_insider() for _ in range(size)]
        side = cfg.clique_side(c)
        clique = PlantedClique(c, company, side, members, [])
        pairs = [(a, b) for i, a in enumerate(members) for b in members[i + 1:]]
        blocks = 1 if cfg.clique_mode == "shared" else len(pairs)
        pool = rng.choice(n_days, size=blocks * cfg.shared_subsequence_length, replace=False)
        pool = pool.reshape(blocks, cfg.shared_subsequence_length)
        own: dict[int, set[int]] = {m: set() for m in members}
        if cfg.clique_mode == "shared":
            clique.dates = [ds.calendar[k] for k in sorted(pool[0])]
            for m in members:
                own[m].update(int(k) for k in pool[0])
        else:
            for (a, b), block in zip(pairs, pool):
                clique.pair_dates[(a, b)] = [ds.calendar[k] for k in sorted(block)]
                own[a].update(int(k) for k in block)
                own[b].update(int(k) for k in block)
            clique.dates = sorted({d for ds_ in clique.pair_dates.values() for d in ds_})
        used = set(int(k) for k in pool.reshape(-1))
        free = [k for k in range(n_days) if k not in used]
        for m in members:
            extra = int(rng.integers(cfg.extra_dates_per_member[0], cfg.extra_dates_per_member[1] + 1))
            if extra:
                own[m].update(int(k) for k in rng.choice(free, size=extra, replace=False))
            for k in sorted(own[m]):
                ds.trades.append(ds.planted_trade(m, company, ds.calendar[k], side))
        ds.cliques.append(clique)


def plant_hub(ds: SynthDataset, hub: int | None, cliques: Iterable[int]) -> SynthDataset:
    """Give ``hub`` (a new insider when None) the shared dates of each clique.

    The hub copies each clique's shared sequence in that clique's company,
    so it joins every clique's component and bridges them.
    """
    cliques = list(cliques)
    for c in cliques:
        if not 0 <= c < len(ds.cliques):
            raise UnknownClique(c)
    if hub is None:
        hub = ds.new_insider()
    elif all(hub in ds.cliques[c].members for c in cliques):
        raise ValueError("hub is already a member of every listed clique")
    for c in cliques:
        q = ds.cliques[c]
        for day in q.dates:
            ds.trades.append(ds.planted_trade(hub, q.company, day, q.side))
    ds.hubs.setdefault(hub, []).extend(cliques)
    return ds


def build_dataset(config: SynthConfig) -> SynthDataset:
    config.validate()
    seqs = np.random.SeedSequence(config.seed).spawn(config.n_companies + 2)
    calendar = weekday_calendar(*config.date_span)
    width = max(3, len(str(config.n_companies)))
    companies = [f"C{k:0{width}d}" for k in range(config.n_companies)]
    ds = SynthDataset(
        config=config,
        calendar=calendar,
        companies=companies,
        closes={},
        volumes={},
        trades=[],
        cliques=[],
        hubs={},
        n_insiders=0,
        rng=np.random.default_rng(seqs[config.n_companies]),
        id_seed=seqs[config.n_companies + 1],
    )
    for company, seq in zip(companies, seqs[: config.n_companies]):
        rng = np.random.default_rng(seq)
        ds.closes[company], ds.volumes[company] = _company_prices(rng, len(calendar))
        _background(ds, company, rng)
    _plant_cliques(ds)

    # each hub takes cliques_per_hub cliques of one side from distinct companies,
    # never reusing a clique; with planted_side="both" hubs alternate sides
    available = list(range(len(ds.cliques)))
    for h in range(config.n_planted_hubs):
        side = config.clique_side(h)
        pool = [c for c in available if ds.cliques[c].side is side]
        order = [pool[k] for k in ds.rng.permutation(len(pool))]
        chosen, seen = [], set()
        for c in order:
            if ds.cliques[c].company not in seen:
                chosen.append(c)
                seen.add(ds.cliques[c].company)
            if len(chosen) == config.cliques_per_hub:
                break
        if len(chosen) < config.cliques_per_hub:
            raise InfeasibleConfig("ran out of cliques in distinct companies for hubs")
        for c in chosen:
            available.remove(c)
        plant_hub(ds, None, sorted(chosen))
    return ds


def generate(config: SynthConfig) -> tuple[str, str, dict]:
    """Trades CSV text, quotes CSV text and ground truth for ``config``."""
    ds = build_dataset(config)
    return serialize_trades(ds.records()), serialize_quotes(ds.quotes()), ds.ground_truth()


def background_collision_rate(config: SynthConfig, t: int) -> float:
    """Probability that two background insiders of a company share >= t dates.

    Both draw n dates uniformly without replacement from the D-day calendar
    (n at the midpoint of ``trades_per_insider``), so the overlap is
    hypergeometric(D, n, n).
    """
    days = len(weekday_calendar(*config.date_span))
    n = round(sum(config.trades_per_insider) / 2)
    return float(stats.hypergeom(days, n, n).sf(t - 1))


def trio_config(mode: str, t: int = 5) -> SynthConfig:
    """Three insiders of one company sharing ``t`` dates, all at once or pair by pair.

    ``mode`` is "shared" (one sequence common to all three) or "pairwise"
    (a distinct sequence for every pair).
    """
    if mode not in ("shared", "pairwise"):
        raise InfeasibleConfig(f"unknown trio mode {mode!r}")
    return replace(
        SynthConfig(),
        n_companies=1,
        insiders_per_company=(0, 0),
        n_planted_cliques=1,
        clique_size=(3, 3),
        shared_subsequence_length=t,
        n_planted_hubs=0,
        clique_mode=mode,
        extra_dates_per_member=(0, 0),
        date_span=(date(2014, 1, 1), date(2014, 3, 31)),
    )
