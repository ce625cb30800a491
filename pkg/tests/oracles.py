"""Brute-force reference computations, independent of the package code."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np


def lcs_brute(a, b):
    """Longest common subsequences by enumerating subsequences of ``a``.

    Returns (length, sorted list of all longest common subsequences).
    """
    def is_subseq(s, t):
        it = iter(t)
        return all(x in it for x in s)

    for r in range(min(len(a), len(b)), -1, -1):
        found = sorted({c for c in combinations(a, r) if is_subseq(c, b)})
        if found:
            return r, [list(c) for c in found]
    return 0, [[]]


def longest_common_run_brute(a, b):
    best = []
    for i in range(len(a)):
        for j in range(i + 1, len(a) + 1):
            run = list(a[i:j])
            for k in range(len(b) - len(run) + 1):
                if list(b[k:k + len(run)]) == run:
                    if len(run) > len(best) or (len(run) == len(best) and run < best):
                        best = run
                    break
    return best


def reachability_components(nodes, edges):
    """Components via boolean transitive closure (Warshall)."""
    nodes = sorted(nodes)
    idx = {n: i for i, n in enumerate(nodes)}
    reach = np.eye(len(nodes), dtype=bool)
    for a, b in edges:
        reach[idx[a], idx[b]] = reach[idx[b], idx[a]] = True
    for k in range(len(nodes)):
        reach |= reach[:, [k]] & reach[[k], :]
    comps = {frozenset(nodes[j] for j in np.nonzero(reach[i])[0]) for i in range(len(nodes))}
    return comps


def egonet_brute(edges, ego):
    members = {ego} | {b for a, b in edges if a == ego} | {a for a, b in edges if b == ego}
    induced = {frozenset(e) for e in edges if set(e) <= members}
    return len(members), len(induced)


def maximal_hyperedges_brute(date_sets: dict, t: int):
    """All maximal insider subsets (size >= 2) whose date intersection has >= t dates."""
    names = sorted(date_sets)
    frequent = []
    for r in range(2, len(names) + 1):
        for group in combinations(names, r):
            common = set.intersection(*(set(date_sets[g]) for g in group))
            if len(common) >= t:
                frequent.append((frozenset(group), frozenset(common)))
    groups = {g for g, _ in frequent}
    return {
        (g, c) for g, c in frequent
        if not any(g < other for other in groups)
    }


def lof_brute(points, k):
    """Local outlier factor straight from the definition, O(n^2).

    Points are distinct objects even when coincident; the k-distance
    neighbourhood keeps every object tied at the k-distance.  Coincident
    objects are zero reachability apart, and densities are capped at one over
    the smallest positive pairwise distance.
    """
    pts = [tuple(map(float, p)) for p in points]
    n = len(pts)

    def dist(i, j):
        return math.dist(pts[i], pts[j])

    kdist, hood = [], []
    for i in range(n):
        ds = sorted(dist(i, j) for j in range(n) if j != i)
        kd = ds[k - 1]
        kdist.append(kd)
        hood.append([j for j in range(n) if j != i and dist(i, j) <= kd])
    positive = [dist(i, j) for i in range(n) for j in range(i) if dist(i, j) > 0]
    cap = 1 / min(positive) if positive else 1.0

    def reach(i, j):
        d = dist(i, j)
        return 0.0 if d == 0 else max(kdist[j], d)

    lrd = []
    for i in range(n):
        total = sum(reach(i, j) for j in hood[i])
        lrd.append(cap if total == 0 else min(cap, len(hood[i]) / total))
    return [sum(lrd[j] for j in hood[i]) / len(hood[i]) / lrd[i] for i in range(n)]
