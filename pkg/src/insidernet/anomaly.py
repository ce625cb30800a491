"""Egonet power-law fit and outlier ranking.

Every ego is described by ``(V_u, E_u)``: node and edge counts of its
egonet.  A line is fitted by least squares to ``(ln V, ln median E)`` and each
ego gets

    score(u) = max(E_u, f(V_u)) / min(E_u, f(V_u)) * ln(|E_u - f(V_u)| + 1)

to which its local outlier factor in ``(ln V, ln E)`` space is added.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from insidernet.errors import DegenerateInput



@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    intercept: float
    points: tuple[tuple[float, float], ...] = field(default=())

    @property
    def scale(self) -> float:
        return math.exp(self.intercept)

    def __call__(self, v: float) -> float:
        return math.exp(self.intercept + self.exponent * math.log(v))

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "intercept": self.intercept,
            "points": [{"v": v, "median_e": e} for v, e in self.points],
        }


@dataclass(frozen=True)
class OutlierEntry:
    insider_id: str
    v: int
    e: int
    f_v: float
    score: float
    lof: float
    total: float
    rank: int


def _lower_median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def fit_power_law(egonets: Sequence[tuple[float, float]], bin_base: float | None = None) -> PowerLawFit:
    """OLS fit of ln(median E) against ln V.

    Egonets are grouped by distinct V (or by ``floor(log_b V)`` when
    ``bin_base`` is given, the group then sitting at its lower-median V) and
    the lower median of E is taken in each group.
    """
    groups: dict[float, list[tuple[float, float]]] = {}
    for v, e in egonets:
        if v <= 0 or e <= 0:
            raise DegenerateInput(f"non-positive egonet count ({v}, {e})")
        key = v if bin_base is None else math.floor(math.log(v) / math.log(bin_base) + 1e-12)
        groups.setdefault(key, []).append((v, e))
    points = []
    for key in sorted(groups):
        members = groups[key]
        v = key if bin_base is None else _lower_median([m[0] for m in members])
        points.append((v, _lower_median([m[1] for m in members])))
    if len({v for v, _ in points}) < 2:
        raise DegenerateInput("need at least two distinct egonet sizes to fit a power law")
    x = np.log(np.array([p[0] for p in points], dtype=np.float64))
    y = np.log(np.array([p[1] for p in points], dtype=np.float64))
    xm, ym = x.mean(), y.mean()
    slope = float(((x - xm) * (y - ym)).sum() / ((x - xm) ** 2).sum())
    intercept = float(ym - slope * xm)
    return PowerLawFit(slope, intercept, tuple(points))


def score(u: tuple[float, float], fit) -> float:
    """Deviation of an ego from the fitted line; ``fit`` may be any callable f(V)."""
    v, e = u
    expected = fit(v)
    return score_from_expected(e, expected)


def score_from_expected(e: float, expected: float) -> float:
    hi, lo = (e, expected) if e >= expected else (expected, e)
    return hi / lo * math.log(abs(e - expected) + 1.0)


def lof(points, k: int) -> list[float]:
    """Local outlier factor with tie-inclusive k-distance neighbourhoods.

    Coincident points are counted by multiplicity and contribute zero
    reachability to each other.  Densities are capped at ``1 / delta`` where
    ``delta`` is the smallest positive distance between any two points, the
    finest scale the data resolves; this is also the density given to points
    whose whole neighbourhood coincides with them.  With no positive distance
    at all every point gets the same density and a factor of 1.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise DegenerateInput("points must be a 2-D array")
    n = len(pts)
    if not 1 <= k < n:
        raise DegenerateInput(f"k={k} must satisfy 1 <= k < {n}")

    uniq, inverse, counts = np.unique(pts, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    m = len(uniq)
    tree = cKDTree(uniq)
    if m > 1:
        nearest, _ = tree.query(uniq, k=2)
        cap = 1.0 / float(nearest[:, 1].min())
    else:
        cap = 1.0

    # k-distance of each location; self duplicates (count - 1) sit at distance 0
    kdist = np.zeros(m)
    probe = min(m, k + 1)
    dists, idxs = tree.query(uniq, k=probe)
    dists = dists.reshape(m, probe)
    idxs = idxs.reshape(m, probe)
    for u in range(m):
        need = k - (counts[u] - 1)
        if need <= 0:
            continue
        acc = 0
        for d, j in zip(dists[u], idxs[u]):
            if j == u:
                continue
            acc += counts[j]
            if acc >= need:
                kdist[u] = d
                break

    neigh = tree.query_ball_point(uniq, r=kdist * (1 + 1e-12) + 1e-15)
    lrd = np.empty(m)
    hoods = []
    for u in range(m):
        js = np.array([j for j in neigh[u] if j != u], dtype=np.int64)
        if len(js):
            d = np.sqrt(((uniq[js] - uniq[u]) ** 2).sum(axis=1))
            mask = d <= kdist[u] * (1 + 1e-12)
            js, d = js[mask], d[mask]
        else:
            d = np.zeros(0)
        weights = counts[js].astype(np.float64)
        size = weights.sum() + (counts[u] - 1)
        mean_reach = (np.maximum(kdist[js], d) * weights).sum() / size
        lrd[u] = cap if mean_reach * cap <= 1.0 else 1.0 / mean_reach
        hoods.append((js, weights, size))

    factor = np.empty(m)
    for u in range(m):
        js, weights, size = hoods[u]
        total = (lrd[js] * weights).sum() + (counts[u] - 1) * lrd[u]
        factor[u] = total / size / lrd[u]
    return [float(factor[i]) for i in inverse]


def default_k(n: int) -> int:
    return min(10, n - 1)


def _minmax(values: np.ndarray) -> np.ndarray:
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def total_outlier_scores(
    egonets: Sequence[tuple[str, int, int]],
    fit: PowerLawFit | None = None,
    k: int | None = None,
    *,
    normalize: bool = False,
    bin_base: float | None = None,
) -> list[OutlierEntry]:
    """Rank egos by score + LOF, highest first; ties broken by insider id."""
    if fit is None:
        fit = fit_power_law([(v, e) for _, v, e in egonets], bin_base=bin_base)
    n = len(egonets)
    if k is None:
        k = default_k(n)
    feats = [(math.log(v), math.log(e)) for _, v, e in egonets]
    lof_values = np.array(lof(feats, k))
    expected = [fit(v) for _, v, _ in egonets]
    scores = np.array([score_from_expected(e, f) for (_, _, e), f in zip(egonets, expected)])
    if normalize:
        scores, lof_values = _minmax(scores), _minmax(lof_values)
    totals = scores + lof_values
    order = sorted(range(n), key=lambda i: (-totals[i], egonets[i][0]))
    report = []
    for rank, i in enumerate(order, start=1):
        ins, v, e = egonets[i]
        report.append(OutlierEntry(ins, v, e, expected[i], float(scores[i]), float(lof_values[i]),
                                   float(scores[i]) + float(lof_values[i]), rank))
    return report
