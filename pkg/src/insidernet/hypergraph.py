"""Multi-way co-trading hyperedges.

A hyperedge is a maximal group (by inclusion) of at least two insiders of one
company whose date sequences share a common subsequence of length >= t.  For
sorted distinct date lists the longest common subsequence of a group is the
sorted intersection of their date sets, so mining is a maximal frequent
itemset problem with insiders as items, dates as transactions and ``t`` as
the minimum support.  Date sets are held as Python int bitmasks.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable

from insidernet.ingest import DateSequence, Side
from insidernet.network import group_by_company
from insidernet.similarity import SimilarityConfig

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hyperedge:
    company: str
    side: Side
    members: tuple[str, ...]
    witness: tuple[date, ...]

    @property
    def length(self) -> int:
        return len(self.witness)

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class Hypergraph:
    side: Side
    threshold: int
    hyperedges: list[Hyperedge] = field(default_factory=list)

    @property
    def vertices(self) -> list[str]:
        return sorted({m for e in self.hyperedges for m in e.members})

    def incidence(self) -> dict[str, list[Hyperedge]]:
        out: dict[str, list[Hyperedge]] = defaultdict(list)
        for e in self.hyperedges:
            for m in e.members:
                out[m].append(e)
        return dict(out)


def _maximal_groups(masks: list[int], t: int) -> list[tuple[tuple[int, ...], int]]:
    """Maximal index sets (size >= 2) whose AND-ed masks keep >= t bits."""
    n = len(masks)
    found: dict[frozenset, int] = {}

    def is_maximal(group: frozenset, common: int) -> bool:
        for w in range(n):
            if w not in group and (common & masks[w]).bit_count() >= t:
                return False
        return True

    def extend(prefix: list[int], common: int, cands: list[tuple[int, int]]) -> None:
        # candidates whose dates cover the prefix intersection join unconditionally
        closed = [i for i, m in cands if m == common]
        rest = [(i, m) for i, m in cands if m != common]
        prefix = prefix + closed
        if not rest:
            if len(prefix) >= 2:
                group = frozenset(prefix)
                if group not in found and is_maximal(group, common):
                    found[group] = common
            return
        for pos, (i, m) in enumerate(rest):
            nxt = [(j, m & mj) for j, mj in rest[pos + 1:] if (m & mj).bit_count() >= t]
            extend(prefix + [i], m, nxt)

    for i in range(n):
        if masks[i].bit_count() < t:
            continue
        cands = [(j, masks[i] & masks[j]) for j in range(i + 1, n)
                 if (masks[i] & masks[j]).bit_count() >= t]
        if cands:
            extend([i], masks[i], cands)
    return [(tuple(sorted(g)), c) for g, c in found.items()]


def _company_hyperedges(company: str, seqs: list[DateSequence], side: Side, t: int) -> list[Hyperedge]:
    if len(seqs) < 2:
        return []
    calendar = sorted({d for s in seqs for d in s.dates})
    bit = {d: k for k, d in enumerate(calendar)}
    masks = []
    for s in seqs:
        m = 0
        for d in s.dates:
            m |= 1 << bit[d]
        masks.append(m)
    out = []
    for group, common in _maximal_groups(masks, t):
        witness = tuple(d for k, d in enumerate(calendar) if common >> k & 1)
        out.append(Hyperedge(company, side, tuple(sorted(seqs[i].insider_id for i in group)), witness))
    out.sort(key=lambda e: (-e.size, e.members))
    return out


def mine_hyperedges(
    sequences: Iterable[DateSequence],
    side: Side | str,
    config: SimilarityConfig | None = None,
    threads: int = 1,
) -> Hypergraph:
    """All maximal same-company insider groups sharing >= t dates.

    The threshold is the side's LCS threshold from ``config``.  Hyperedges are
    ordered by company, then decreasing size, then member ids.
    """
    side = Side.parse(side)
    config = config or SimilarityConfig()
    t = config.lcs_threshold(side)
    work = list(group_by_company(sequences, side).items())
    if threads > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda kv: _company_hyperedges(kv[0], kv[1], side, t), work))
    else:
        parts = [_company_hyperedges(c, s, side, t) for c, s in work]
    edges = [e for part in parts for e in part]
    LOGGER.info("%s hypergraph: %d hyperedges (t=%d)", side.label, len(edges), t)
    return Hypergraph(side=side, threshold=t, hyperedges=edges)


def hyperedge_size_distribution(h: Hypergraph) -> dict[int, tuple[int, float]]:
    """Map hyperedge size to (count, percentage of all hyperedges)."""
    counts = Counter(e.size for e in h.hyperedges)
    total = sum(counts.values())
    return {size: (n, 100.0 * n / total) for size, n in sorted(counts.items())}


def multi_edge_insiders(h: Hypergraph, min_edges: int = 4) -> list[tuple[str, list[Hyperedge]]]:
    if min_edges < 2:
        raise ValueError("min_edges must be >= 2")
    hits = [(ins, edges) for ins, edges in h.incidence().items() if len(edges) >= min_edges]
    hits.sort(key=lambda item: (-len(item[1]), item[0]))
    return hits
