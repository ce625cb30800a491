"""Pairwise trading-behaviour similarity between date sequences.

Two measures are provided:

* the date-overlap score ``S = (sum_i sum_j [x_i == y_j])**2 / (|X| * |Y|)``
* the longest common subsequence of the two date lists, either classical
  (gaps allowed) or restricted to runs that are contiguous in both lists.

On strictly increasing, duplicate-free lists the classical LCS is exactly
the sorted set intersection.  The network and hypergraph stages exploit
that; the DP routines here stay general so the equivalence can be checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from insidernet.errors import CompanyMismatch, EmptySequence
from insidernet.ingest import DateSequence, Side


class Mode(str, Enum):
    OVERLAP = "overlap"
    LCS = "lcs"


class LcsVariant(str, Enum):
    SUBSEQUENCE = "subsequence"
    CONTIGUOUS_RUN = "contiguous"


@dataclass(frozen=True)
class SimilarityConfig:
    mode: Mode = Mode.LCS
    overlap_threshold: float = 0.5
    lcs_threshold_sale: int = 5
    lcs_threshold_purchase: int = 10
    lcs_variant: LcsVariant = LcsVariant.SUBSEQUENCE

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "lcs_variant", LcsVariant(self.lcs_variant))
        if not 0.0 <= self.overlap_threshold <= 1.0:
            raise ValueError("overlap_threshold must lie in [0, 1]")
        if self.lcs_threshold_sale < 2 or self.lcs_threshold_purchase < 2:
            raise ValueError("LCS thresholds must be >= 2")

    def lcs_threshold(self, side: Side) -> int:
        return self.lcs_threshold_sale if Side.parse(side) is Side.SALE else self.lcs_threshold_purchase

    def threshold(self, side: Side) -> float:
        if self.mode is Mode.OVERLAP:
            return self.overlap_threshold
        return self.lcs_threshold(side)

    def describe(self, side: Side) -> dict:
        out = {"mode": self.mode.value}
        if self.mode is Mode.OVERLAP:
            out["threshold"] = self.overlap_threshold
        else:
            out["threshold"] = self.lcs_threshold(side)
            out["variant"] = self.lcs_variant.value
        return out


def _check_pair(x: DateSequence, y: DateSequence) -> None:
    if x.company != y.company:
        raise CompanyMismatch(f"{x.company!r} != {y.company!r}")
    if x.side != y.side:
        raise CompanyMismatch(f"side {x.side.value!r} != {y.side.value!r}")


def similarity_s(x: DateSequence, y: DateSequence) -> float:
    """Date-overlap similarity via the explicit indicator double sum."""
    _check_pair(x, y)
    if not x.dates or not y.dates:
        raise EmptySequence(f"{x.insider_id if not x.dates else y.insider_id} has no dates")
    matches = 0
    for xi in x.dates:
        for yj in y.dates:
            if xi == yj:
                matches += 1
    return matches * matches / (len(x.dates) * len(y.dates))


def overlap_from_counts(common: int, len_x: int, len_y: int) -> float:
    return common * common / (len_x * len_y)


def _lcs_table(a: Sequence, b: Sequence) -> list[list[int]]:
    # suffix table: T[i][j] = LCS length of a[i:], b[j:]
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        ai = a[i]
        row, below = table[i], table[i + 1]
        for j in range(m - 1, -1, -1):
            if ai == b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = below[j] if below[j] >= row[j + 1] else row[j + 1]
    return table


def _subsequence_witness(a: Sequence, b: Sequence) -> list:
    table = _lcs_table(a, b)
    out = []
    i = j = 0
    remaining = table[0][0]
    while remaining > 0:
        # smallest value that can start a longest completion from (i, j)
        best = None
        seen = set()
        for ii in range(i, len(a)):
            value = a[ii]
            if value in seen or (best is not None and value >= best[0]):
                continue
            seen.add(value)
            for jj in range(j, len(b)):
                if b[jj] == value:
                    if table[ii + 1][jj + 1] + 1 == remaining:
                        best = (value, ii, jj)
                    break
        value, i, j = best
        out.append(value)
        i += 1
        j += 1
        remaining -= 1
    return out


def _contiguous_witness(a: Sequence, b: Sequence) -> list:
    # longest common substring; ties go to the lexicographically smallest run
    n, m = len(a), len(b)
    prev = [0] * (m + 1)
    best_len, best_run = 0, []
    for i in range(1, n + 1):
        cur = [0] * (m + 1)
        for j in range(1, m + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
                length = cur[j]
                if length > best_len:
                    best_len, best_run = length, list(a[i - length:i])
                elif length == best_len and list(a[i - length:i]) < best_run:
                    best_run = list(a[i - length:i])
        prev = cur
    return best_run


def lcs_length(x: DateSequence, y: DateSequence, variant: LcsVariant = LcsVariant.SUBSEQUENCE) -> int:
    _check_pair(x, y)
    if LcsVariant(variant) is LcsVariant.SUBSEQUENCE:
        if not x.dates or not y.dates:
            return 0
        return _lcs_table(x.dates, y.dates)[0][0]
    return len(_contiguous_witness(x.dates, y.dates))


def lcs_witness(x: DateSequence, y: DateSequence, variant: LcsVariant = LcsVariant.SUBSEQUENCE) -> list:
    """One longest common (sub)sequence; the earliest dates win ties."""
    _check_pair(x, y)
    if LcsVariant(variant) is LcsVariant.SUBSEQUENCE:
        return _subsequence_witness(x.dates, y.dates)
    return _contiguous_witness(x.dates, y.dates)


def sorted_common_runs(a: Sequence, b: Sequence) -> list[list]:
    """Maximal runs of common elements that are adjacent in both sorted lists.

    Linear-time replacement for the contiguous DP, valid only for strictly
    increasing inputs.
    """
    pos_b = {v: k for k, v in enumerate(b)}
    runs: list[list] = []
    last = None
    for ia, v in enumerate(a):
        ib = pos_b.get(v)
        if ib is None:
            last = None
            continue
        if last is not None and last == (ia - 1, ib - 1):
            runs[-1].append(v)
        else:
            runs.append([v])
        last = (ia, ib)
    return runs


def longest_sorted_run(a: Sequence, b: Sequence) -> list:
    best: list = []
    for run in sorted_common_runs(a, b):
        if len(run) > len(best):
            best = run
    return best
