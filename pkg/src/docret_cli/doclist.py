"""Document listing over a suffix-array range, plus brute-force top-k.

All algorithms take the 1-based rank range [sp, ep] produced by `find` and
return a `ListResult` whose `docs` are sorted ascending.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Collection
from .errors import ContractViolation, check_range
from .suffixes import SuffixIndex, locate


@dataclass(frozen=True)
class ListResult:
    docs: tuple[int, ...]
    occ: int
    # RMQ probes spent by the recursive algorithms; not part of the answer
    probes: int = field(default=0, compare=False)

    @property
    def docc(self) -> int:
        return len(self.docs)


@dataclass(frozen=True)
class TopkHit:
    doc: int
    freq: int | None


class Scratch:
    """Caller-owned per-query scratch, reset in O(1) by bumping a generation.

    `seen` answers "was document g marked in this query", `freq` accumulates
    per-document counts; both are only valid while `stamp[g] == generation`.
    """

    def __init__(self, d: int) -> None:
        self.stamp = [0] * (d + 1)
        self.freq = [0] * (d + 1)
        self.generation = 0
        self.touched: list[int] = []

    def begin(self) -> None:
        self.generation += 1
        self.touched = []

    def mark(self, doc: int) -> bool:
        """Mark doc as seen; False when it was already seen in this query."""
        if self.stamp[doc] == self.generation:
            return False
        self.stamp[doc] = self.generation
        self.freq[doc] = 0
        self.touched.append(doc)
        return True

    def add(self, doc: int, count: int) -> None:
        self.mark(doc)
        self.freq[doc] += count


def _docs_of_range(idx: SuffixIndex, c: Collection, sp: int, ep: int) -> np.ndarray:
    """DA[sp..ep] recovered through locate() and rank over B."""
    return c.B.rank_many(locate(idx, sp, ep))


def _result(values, sp: int, ep: int, probes: int = 0) -> ListResult:
    docs = np.unique(np.asarray(values, dtype=np.int64))
    return ListResult(docs=tuple(int(g) for g in docs), occ=ep - sp + 1, probes=probes)


def list_brute_l(idx: SuffixIndex, c: Collection, sp: int, ep: int) -> ListResult:
    return _result(_docs_of_range(idx, c, sp, ep), sp, ep)


def list_brute_d(idx: SuffixIndex, sp: int, ep: int) -> ListResult:
    check_range(sp, ep, idx.n)
    return _result(idx.require("da")[sp - 1 : ep], sp, ep)


def list_mut(idx: SuffixIndex, sp: int, ep: int) -> ListResult:
    """Muthukrishnan: report i = rmq_C(l, r) while C[i] < sp, recursing on both sides."""
    check_range(sp, ep, idx.n)
    c_values = idx.require("c")
    da = idx.require("da")
    rmq_c = idx.rmq("C")
    found: list[int] = []
    probes = 0
    stack = [(sp, ep)]
    while stack:
        left, right = stack.pop()
        if left > right:
            continue
        i = rmq_c.query(left, right)
        probes += 1
        if c_values[i - 1] >= sp:
            continue
        found.append(int(da[i - 1]))
        stack.append((i + 1, right))
        stack.append((left, i - 1))
    return _result(found, sp, ep, probes)


def _sadakane(idx: SuffixIndex, sp: int, ep: int, doc_at, scratch: Scratch) -> ListResult:
    """Preorder, left-to-right traversal over RMQ(C) with a seen-set instead of C."""
    rmq_c = idx.rmq("C")
    scratch.begin()
    found: list[int] = []
    probes = 0
    stack = [(sp, ep)]
    while stack:
        left, right = stack.pop()
        if left > right:
            continue
        i = rmq_c.query(left, right)
        probes += 1
        doc = doc_at(i)
        if not scratch.mark(doc):
            continue
        found.append(doc)
        # right pushed first so the left side is explored first
        stack.append((i + 1, right))
        stack.append((left, i - 1))
    return _result(found, sp, ep, probes)


def list_sada_d(idx: SuffixIndex, sp: int, ep: int, scratch: Scratch | None = None) -> ListResult:
    check_range(sp, ep, idx.n)
    da = idx.require("da")
    return _sadakane(idx, sp, ep, lambda i: int(da[i - 1]), scratch or Scratch(int(da.max())))


def list_sada_l(idx: SuffixIndex, c: Collection, sp: int, ep: int, scratch: Scratch | None = None) -> ListResult:
    check_range(sp, ep, idx.n)
    sa = idx.sa
    return _sadakane(idx, sp, ep, lambda i: c.B.rank1(int(sa[i - 1])), scratch or Scratch(c.d))


def _ilcp_walk(idx: SuffixIndex, sp: int, ep: int, m: int, doc_at) -> ListResult:
    if m < 1:
        raise ContractViolation("ILCP listing needs the pattern length m >= 1.")
    check_range(sp, ep, idx.n)
    ilcp = idx.require("ilcp")
    rmq_ilcp = idx.rmq("ILCP")
    found: list[int] = []
    probes = 0
    stack = [(sp, ep)]
    while stack:
        left, right = stack.pop()
        if left > right:
            continue
        i = rmq_ilcp.query(left, right)
        probes += 1
        if ilcp[i - 1] >= m:
            continue
        # ILCP[i] < m iff rank i holds the first occurrence of its document
        found.append(doc_at(i))
        stack.append((i + 1, right))
        stack.append((left, i - 1))
    return _result(found, sp, ep, probes)


def list_ilcp_d(idx: SuffixIndex, sp: int, ep: int, m: int) -> ListResult:
    da = idx.require("da")
    return _ilcp_walk(idx, sp, ep, m, lambda i: int(da[i - 1]))


def list_ilcp_l(idx: SuffixIndex, c: Collection, sp: int, ep: int, m: int) -> ListResult:
    sa = idx.sa
    return _ilcp_walk(idx, sp, ep, m, lambda i: c.B.rank1(int(sa[i - 1])))


def list_ilcp_runs(idx: SuffixIndex, sp: int, ep: int, m: int) -> ListResult:
    """ILCP listing with the RMQ built over run heads only."""
    if m < 1:
        raise ContractViolation("ILCP listing needs the pattern length m >= 1.")
    check_range(sp, ep, idx.n)
    runs = idx.require("ilcp_runs")
    da = idx.require("da")
    rmq_runs = idx.rmq("RUNS")
    first_run = int(np.searchsorted(runs.starts, sp, side="right"))
    last_run = int(np.searchsorted(runs.starts, ep, side="right"))
    found: list[np.ndarray] = []
    probes = 0
    stack = [(first_run, last_run)]
    while stack:
        left, right = stack.pop()
        if left > right:
            continue
        run = rmq_runs.query(left, right)
        probes += 1
        if runs.values[run - 1] >= m:
            continue
        start = max(int(runs.starts[run - 1]), sp)
        end = min(int(runs.starts[run - 1] + runs.lengths[run - 1]) - 1, ep)
        found.append(da[start - 1 : end])
        stack.append((run + 1, right))
        stack.append((left, run - 1))
    values = np.concatenate(found) if found else np.zeros(0, dtype=np.int64)
    return _result(values, sp, ep, probes)


def count_freqs(idx: SuffixIndex, sp: int, ep: int) -> dict[int, int]:
    check_range(sp, ep, idx.n)
    docs, counts = np.unique(idx.require("da")[sp - 1 : ep], return_counts=True)
    return {int(g): int(f) for g, f in zip(docs, counts)}


def canonical_topk(docs: np.ndarray, counts: np.ndarray, k: int) -> list[TopkHit]:
    """Top k by frequency descending, ties by increasing document id."""
    if k < 1:
        raise ContractViolation("k must be at least 1.")
    docs = np.asarray(docs, dtype=np.int64)
    counts = np.asarray(counts, dtype=np.int64)
    order = np.lexsort((docs, -counts))[:k]
    return [TopkHit(int(docs[i]), int(counts[i])) for i in order]


def topk_brute_d(idx: SuffixIndex, sp: int, ep: int, k: int) -> list[TopkHit]:
    check_range(sp, ep, idx.n)
    docs, counts = np.unique(idx.require("da")[sp - 1 : ep], return_counts=True)
    return canonical_topk(docs, counts, k)


def topk_brute_l(idx: SuffixIndex, c: Collection, sp: int, ep: int, k: int) -> list[TopkHit]:
    docs, counts = np.unique(_docs_of_range(idx, c, sp, ep), return_counts=True)
    return canonical_topk(docs, counts, k)
