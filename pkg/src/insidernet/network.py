"""Purchase/sale insider networks, connected components and egonets."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Sequence

import numpy as np

from insidernet.errors import UnknownNode
from insidernet.ingest import DateSequence, Side
from insidernet.similarity import (
    LcsVariant,
    Mode,
    SimilarityConfig,
    longest_sorted_run,
    overlap_from_counts,
)

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Edge:
    a: str
    b: str
    weight: float
    company: str

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


@dataclass
class InsiderNetwork:
    side: Side
    mode: dict
    edges: dict[tuple[str, str], Edge] = field(default_factory=dict)
    _adj: dict[str, set[str]] | None = field(default=None, init=False, repr=False, compare=False)

    @property
    def nodes(self) -> list[str]:
        return sorted(self.adjacency)

    @property
    def adjacency(self) -> dict[str, set[str]]:
        if self._adj is None:
            adj: dict[str, set[str]] = defaultdict(set)
            for a, b in self.edges:
                adj[a].add(b)
                adj[b].add(a)
            self._adj = dict(adj)
        return self._adj

    def neighbors(self, node: str) -> set[str]:
        try:
            return self.adjacency[node]
        except KeyError:
            raise UnknownNode(node) from None

    def edge(self, a: str, b: str) -> Edge | None:
        return self.edges.get((a, b) if a < b else (b, a))

    def __contains__(self, node) -> bool:
        return node in self.adjacency

    def sorted_edges(self) -> list[Edge]:
        return [self.edges[k] for k in sorted(self.edges)]


@dataclass(frozen=True)
class Egonet:
    ego: str
    v_count: int
    e_count: int
    members: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]


def group_by_company(sequences: Iterable[DateSequence], side: Side) -> dict[str, list[DateSequence]]:
    groups: dict[str, list[DateSequence]] = defaultdict(list)
    for seq in sequences:
        if seq.side is not side:
            raise ValueError(f"sequence of {seq.insider_id} has side {seq.side.value}, expected {side.value}")
        groups[seq.company].append(seq)
    for seqs in groups.values():
        seqs.sort(key=lambda s: s.insider_id)
    return dict(sorted(groups.items()))


def _incidence(seqs: Sequence[DateSequence]) -> np.ndarray:
    index: dict[date, int] = {}
    for s in seqs:
        for d in s.dates:
            index.setdefault(d, len(index))
    mat = np.zeros((len(seqs), len(index)), dtype=np.float32)
    for row, s in enumerate(seqs):
        mat[row, [index[d] for d in s.dates]] = 1.0
    return mat


def _company_edges(company: str, seqs: list[DateSequence], side: Side, config: SimilarityConfig):
    """Qualifying (a, b, weight) triples among the insiders of one company."""
    if len(seqs) < 2:
        return []
    lengths = np.array([len(s) for s in seqs], dtype=np.int64)
    mat = _incidence(seqs)
    # float32 matmul is exact here: counts never exceed the number of distinct dates
    common = np.rint(mat @ mat.T).astype(np.int64)
    iu, ju = np.triu_indices(len(seqs), k=1)
    shared = common[iu, ju]
    out = []
    if config.mode is Mode.OVERLAP:
        score = shared.astype(np.float64) ** 2 / (lengths[iu] * lengths[ju])
        keep = np.nonzero((shared > 0) & (score >= config.overlap_threshold))[0]
        for k in keep:
            i, j = iu[k], ju[k]
            out.append((seqs[i].insider_id, seqs[j].insider_id,
                        overlap_from_counts(int(shared[k]), int(lengths[i]), int(lengths[j]))))
        return out
    t = config.lcs_threshold(side)
    keep = np.nonzero(shared >= t)[0]
    for k in keep:
        i, j = iu[k], ju[k]
        if config.lcs_variant is LcsVariant.SUBSEQUENCE:
            weight = int(shared[k])
        else:
            weight = len(longest_sorted_run(seqs[i].dates, seqs[j].dates))
            if weight < t:
                continue
        out.append((seqs[i].insider_id, seqs[j].insider_id, weight))
    return out


def build_network(
    sequences: Iterable[DateSequence],
    side: Side | str,
    config: SimilarityConfig | None = None,
    threads: int = 1,
) -> InsiderNetwork:
    """Connect insiders of a common company whose similarity clears the threshold.

    Pairs are only compared within a company.  When a pair qualifies through
    several companies the edge keeps the largest weight (ties go to the
    alphabetically first company).
    """
    side = Side.parse(side)
    config = config or SimilarityConfig()
    groups = group_by_company(sequences, side)
    work = list(groups.items())
    if threads > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda kv: _company_edges(kv[0], kv[1], side, config), work))
    else:
        results = [_company_edges(c, s, side, config) for c, s in work]

    edges: dict[tuple[str, str], Edge] = {}
    for (company, _), triples in zip(work, results):
        for a, b, weight in triples:
            key = (a, b) if a < b else (b, a)
            current = edges.get(key)
            if current is None or weight > current.weight:
                edges[key] = Edge(key[0], key[1], weight, company)
    net = InsiderNetwork(side=side, mode=config.describe(side))
    net.edges = {k: edges[k] for k in sorted(edges)}
    LOGGER.info("%s network: %d nodes, %d edges", side.label, len(net.nodes), len(net.edges))
    return net


def connected_components(net: InsiderNetwork) -> list[list[str]]:
    adj = net.adjacency
    seen: set[str] = set()
    comps = []
    for start in sorted(adj):
        if start in seen:
            continue
        seen.add(start)
        stack = [start]
        comp = []
        while stack:
            node = stack.pop()
            comp.append(node)
            for nb in adj[node]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def network_stats(net: InsiderNetwork) -> dict:
    comps = connected_components(net)
    hist = Counter(len(c) for c in comps)
    return {
        "nodes": len(net.adjacency),
        "edges": len(net.edges),
        "components": len(comps),
        "component_sizes": dict(sorted(hist.items())),
    }


def egonet(net: InsiderNetwork, ego: str) -> Egonet:
    """Subgraph induced by ``ego`` and its direct neighbours."""
    nbrs = net.neighbors(ego)
    members = sorted(nbrs | {ego})
    member_set = set(members)
    adj = net.adjacency
    induced = []
    for a in members:
        for b in adj[a]:
            if a < b and b in member_set:
                induced.append((a, b))
    return Egonet(ego, len(members), len(induced), tuple(members), tuple(sorted(induced)))


def egonet_counts(net: InsiderNetwork) -> list[tuple[str, int, int]]:
    """(ego, V_u, E_u) for every node, without materialising the subgraphs."""
    adj = net.adjacency
    out = []
    for node in sorted(adj):
        nbrs = adj[node]
        # each neighbour-neighbour edge is seen from both endpoints
        inner = sum(len(adj[nb] & nbrs) for nb in nbrs) // 2
        out.append((node, len(nbrs) + 1, len(nbrs) + inner))
    return out
