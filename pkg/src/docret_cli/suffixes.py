"""Suffix array and the arrays derived from it (DA, LCP, ILCP, ILCP runs, C).

Arrays are numpy vectors stored 0-based, but every value and every argument
uses the 1-based conventions of the collection: `sa[i - 1]` is SA[i].
"""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .corpus import TERMINATOR, Collection
from .errors import ContractViolation, ForbiddenByte, check_range

ARRAY_NAMES = ("da", "lcp", "ilcp", "c")


@dataclass(frozen=True, eq=False)
class IlcpRuns:
    """Maximal run-length encoding of ILCP as parallel arrays (starts are ranks)."""

    starts: np.ndarray
    lengths: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return int(self.starts.size)

    def triples(self) -> list[tuple[int, int, int]]:
        return [(int(s), int(l), int(v)) for s, l, v in zip(self.starts, self.lengths, self.values)]

    def expand(self) -> np.ndarray:
        return np.repeat(self.values, self.lengths)


@dataclass(eq=False)
class SuffixIndex:
    sa: np.ndarray
    da: np.ndarray | None = None
    lcp: np.ndarray | None = None
    ilcp: np.ndarray | None = None
    ilcp_runs: IlcpRuns | None = None
    c: np.ndarray | None = None
    # range-minimum structures keyed by source tag ("C", "ILCP", "RUNS")
    rmqs: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.sa.size)

    def require(self, name: str):
        value = getattr(self, name)
        if value is None:
            raise ContractViolation(f"Suffix index was built without {name.upper()}.")
        return value

    def rmq(self, key: str):
        if key not in self.rmqs:
            raise ContractViolation(f"Suffix index has no RMQ over {key}.")
        return self.rmqs[key]


def suffix_array(data: np.ndarray) -> np.ndarray:
    """0-based suffix array of a byte array by prefix doubling.

    Rank 0 stands for "past the end", so a proper prefix sorts first.
    """
    n = int(data.size)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rank = data.astype(np.int64) + 1
    offset = 1
    while True:
        second = np.zeros(n, dtype=np.int64)
        if offset < n:
            second[: n - offset] = rank[offset:]
        order = np.lexsort((second, rank))
        first_sorted = rank[order]
        second_sorted = second[order]
        changed = (first_sorted[1:] != first_sorted[:-1]) | (second_sorted[1:] != second_sorted[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[order] = np.concatenate(([1], 1 + np.cumsum(changed)))
        rank = new_rank
        if int(rank.max()) == n:
            return order.astype(np.int64)
        offset *= 2


def build_sa(c: Collection) -> np.ndarray:
    """SA[1..n] as 1-based text positions."""
    return suffix_array(c.text_array()) + 1


def find(idx: SuffixIndex, c: Collection, pattern: bytes) -> tuple[int, int] | None:
    """Rank range [sp, ep] of suffixes prefixed by `pattern`, or None when empty."""
    pattern = bytes(pattern)
    offset = pattern.find(bytes([TERMINATOR]))
    if offset >= 0:
        raise ForbiddenByte(0, offset + 1)
    n = idx.n
    m = len(pattern)
    if m == 0:
        return (1, n)
    text = c.text
    sa = idx.sa

    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi) // 2
        start = int(sa[mid]) - 1
        if text[start : start + m] < pattern:
            lo = mid + 1
        else:
            hi = mid
    first = lo
    hi = n
    while lo < hi:
        mid = (lo + hi) // 2
        start = int(sa[mid]) - 1
        if text[start : start + m] <= pattern:
            lo = mid + 1
        else:
            hi = mid
    if lo == first:
        return None
    return (first + 1, lo)


def locate(idx: SuffixIndex, sp: int, ep: int) -> np.ndarray:
    check_range(sp, ep, idx.n)
    return idx.sa[sp - 1 : ep]


def build_da(idx: SuffixIndex, c: Collection) -> np.ndarray:
    """DA[i] = rank1(B, SA[i])."""
    return c.B.rank_many(idx.sa).astype(np.int64)


def _kasai(data: bytes, sa: list[int]) -> list[int]:
    n = len(sa)
    inverse = [0] * n
    for rank, pos in enumerate(sa):
        inverse[pos] = rank
    lcp = [0] * n
    h = 0
    for pos in range(n):
        rank = inverse[pos]
        if rank == 0:
            h = 0
            continue
        other = sa[rank - 1]
        while pos + h < n and other + h < n and data[pos + h] == data[other + h]:
            h += 1
        lcp[rank] = h
        if h:
            h -= 1
    return lcp


def build_lcp(c: Collection, idx: SuffixIndex) -> np.ndarray:
    """Kasai's linear-time LCP from the inverse permutation; LCP[1] = 0."""
    sa = (idx.sa - 1).tolist()
    return np.asarray(_kasai(c.text, sa), dtype=np.int64)


def _run_length(values: np.ndarray) -> IlcpRuns:
    n = int(values.size)
    if n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return IlcpRuns(empty, empty, empty)
    heads = np.flatnonzero(np.concatenate(([True], values[1:] != values[:-1])))
    lengths = np.diff(np.concatenate((heads, [n])))
    return IlcpRuns(
        starts=heads.astype(np.int64) + 1,
        lengths=lengths.astype(np.int64),
        values=values[heads].astype(np.int64),
    )


def build_ilcp(c: Collection, idx: SuffixIndex) -> tuple[np.ndarray, IlcpRuns]:
    """Per-document LCP arrays interleaved in global suffix order.

    Suffixes of one document keep their relative order in the global suffix
    array, so the r-th occurrence of document g in DA takes LCP_g[r].
    """
    da = idx.require("da")
    ilcp = np.zeros(idx.n, dtype=np.int64)
    order = np.argsort(da, kind="stable")
    boundaries = np.searchsorted(da[order], np.arange(1, c.d + 2))
    for g in range(1, c.d + 1):
        start, end = c.doc_span(g)
        local = c.text[start - 1 : end]
        local_sa = suffix_array(np.frombuffer(local, dtype=np.uint8)).tolist()
        local_lcp = _kasai(local, local_sa)
        ranks = order[boundaries[g - 1] : boundaries[g]]
        ilcp[ranks] = local_lcp
    return ilcp, _run_length(ilcp)


def build_c(da: np.ndarray) -> np.ndarray:
    """C[i] = largest j < i with DA[j] = DA[i], or 0."""
    da = np.asarray(da)
    c = np.zeros(da.size, dtype=np.int64)
    if da.size < 2:
        return c
    order = np.argsort(da, kind="stable")
    same = da[order[1:]] == da[order[:-1]]
    c[order[1:][same]] = order[:-1][same] + 1
    return c


def build_suffix_index(c: Collection, arrays: Iterable[str] = ARRAY_NAMES) -> SuffixIndex:
    """Build SA plus the requested derived arrays, respecting their dependencies."""
    wanted = set(arrays)
    idx = SuffixIndex(sa=build_sa(c))
    if wanted & {"da", "ilcp", "c"}:
        idx.da = build_da(idx, c)
    if "lcp" in wanted:
        idx.lcp = build_lcp(c, idx)
    if "ilcp" in wanted:
        idx.ilcp, idx.ilcp_runs = build_ilcp(c, idx)
    if "c" in wanted:
        idx.c = build_c(idx.da)
    return idx
