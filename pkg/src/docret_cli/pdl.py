"""Precomputed document listing (PDL) over the sparse suffix tree.

The suffix tree is walked as lcp-intervals. Maximal nodes with at most `b`
suffixes become leaf blocks and are always answered by brute force; nodes
above them may keep their document sets, compressed with one shared grammar.
Nodes with identical sets point at the same grammar part.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Collection
from .doclist import ListResult, Scratch, TopkHit, canonical_topk
from .errors import ContractViolation, InvalidParams, MissingFreqs, WrongMode, check_range
from .grammar import (
    FreqEncoding,
    Grammar,
    SetGrammar,
    decode_freqs,
    encode_freqs,
    expand_part,
    expand_part_prefix,
    repair_compress_many,
    setpair_compress,
    setpair_expand,
)
from .suffixes import SuffixIndex, locate

DEFAULT_BLOCK_SIZE = 256
DEFAULT_STORING_FACTOR = 16

MODES = ("list", "topk", "topk+f")
COMPRESSORS = ("repair", "set")


@dataclass
class LcpNode:
    left: int
    right: int
    depth: int
    children: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.right - self.left + 1


def lcp_intervals(lcp: np.ndarray) -> list[LcpNode]:
    """Internal suffix-tree nodes as lcp-intervals, in post-order.

    `children` lists internal children left to right; ranks between them are
    leaves. The root [1, n] is always the last node.
    """
    values = np.asarray(lcp).tolist()
    n = len(values)
    nodes: list[LcpNode] = []
    stack: list[LcpNode] = [LcpNode(1, n, 0)]
    last: int | None = None
    for i in range(2, n + 2):
        current = values[i - 1] if i <= n else -1
        left = i - 1
        last = None
        while stack and current < stack[-1].depth:
            top = stack.pop()
            top.right = i - 1
            nodes.append(top)
            last = len(nodes) - 1
            left = top.left
            if stack and current <= stack[-1].depth:
                stack[-1].children.append(last)
                last = None
        if stack and current > stack[-1].depth:
            stack.append(LcpNode(left, n, current, [last] if last is not None else []))
            last = None
    root = nodes[-1]
    if len(root.children) == 1 and nodes[root.children[0]].size == root.size:
        # every suffix shares a first byte: the lcp-0 root repeats its only child
        nodes.pop()
    return nodes


@dataclass(eq=False)
class PdlIndex:
    b: int
    beta: float
    mode: str
    compressor: str
    n: int
    d: int
    block_starts: np.ndarray
    node_left: np.ndarray
    node_right: np.ndarray
    # grammar part (or set) of each node; nodes with equal sequences share one
    node_part: np.ndarray | None = None
    grammar: Grammar | None = None
    set_grammar: SetGrammar | None = None
    freqs: tuple[FreqEncoding, ...] | None = None
    node_lookup: dict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.node_left = np.asarray(self.node_left, dtype=np.int64)
        self.node_right = np.asarray(self.node_right, dtype=np.int64)
        self.block_starts = np.asarray(self.block_starts, dtype=np.int64)
        if self.node_part is None:
            self.node_part = np.arange(self.node_left.size, dtype=np.int64)
        self.node_part = np.asarray(self.node_part, dtype=np.int64)
        self.node_lookup = {
            (int(l), int(r)): node for node, (l, r) in enumerate(zip(self.node_left, self.node_right))
        }
        # nodes are ordered by (left asc, right desc); group them by left end
        self._starts, self._group = np.unique(self.node_left, return_index=True)
        self._group = np.append(self._group, self.node_left.size)
        self._neg_right = -self.node_right

    @property
    def listing(self) -> bool:
        return self.mode == "list"

    @property
    def with_freqs(self) -> bool:
        return self.mode == "topk+f"

    @property
    def node_count(self) -> int:
        return int(self.node_left.size)

    def blocks(self) -> list[tuple[int, int]]:
        ends = np.append(self.block_starts[1:] - 1, self.n)
        return [(int(s), int(e)) for s, e in zip(self.block_starts, ends)]

    def stored_ranges(self) -> list[tuple[int, int]]:
        return [(int(l), int(r)) for l, r in zip(self.node_left, self.node_right)]

    def stored_size(self) -> int:
        """Compressed stored-set size in symbols (rules count twice)."""
        if self.set_grammar is not None:
            return self.set_grammar.size()
        return self.grammar.size() if self.grammar is not None else 0

    def decode(self, node: int) -> list[int]:
        if self.set_grammar is not None:
            return setpair_expand(self.set_grammar, self.set_grammar.sets[int(self.node_part[node])])
        return expand_part(self.grammar, int(self.node_part[node]))

    def decode_prefix(self, node: int, k: int) -> list[int]:
        if self.set_grammar is not None:
            return self.decode(node)[:k]
        return expand_part_prefix(self.grammar, int(self.node_part[node]), k)

    def node_freqs(self, node: int) -> list[int]:
        if self.freqs is None:
            raise MissingFreqs("PDL index was built without frequencies.")
        return decode_freqs(self.freqs[node])

    def check_laminar(self) -> bool:
        stack: list[int] = []
        seen: set[tuple[int, int]] = set()
        for l, r in self.stored_ranges():
            if (l, r) in seen:
                return False
            seen.add((l, r))
            while stack and stack[-1] < l:
                stack.pop()
            if stack and stack[-1] < r:
                return False
            stack.append(r)
        return True

    def decompose(self, sp: int, ep: int) -> tuple[list[int], list[tuple[int, int]]]:
        """Maximal stored nodes inside [sp, ep] and the uncovered margins."""
        covered: list[int] = []
        margins: list[tuple[int, int]] = []
        starts, group = self._starts, self._group
        pos = sp
        s = int(np.searchsorted(starts, pos, side="left"))
        while pos <= ep:
            found = -1
            while s < starts.size and starts[s] <= ep:
                g0, g1 = int(group[s]), int(group[s + 1])
                j = g0 + int(np.searchsorted(self._neg_right[g0:g1], -ep, side="left"))
                if j < g1:
                    found = j
                    break
                s += 1
            if found < 0:
                margins.append((pos, ep))
                break
            left = int(self.node_left[found])
            if left > pos:
                margins.append((pos, left - 1))
            covered.append(found)
            pos = int(self.node_right[found]) + 1
            s = int(np.searchsorted(starts, pos, side="left"))
        return covered, margins


def _check_params(b: int, beta: float, mode: str, compressor: str) -> None:
    if int(b) != b or b < 2:
        raise InvalidParams(f"Block size b must be an integer >= 2, got {b}.")
    if not (beta == 0 or beta >= 1):
        raise InvalidParams(f"Storing factor beta must be 0 or >= 1, got {beta}.")
    if mode not in MODES:
        raise InvalidParams(f"Unknown PDL mode {mode!r}; expected one of {', '.join(MODES)}.")
    if compressor not in COMPRESSORS:
        raise InvalidParams(f"Unknown compressor {compressor!r}; expected one of {', '.join(COMPRESSORS)}.")
    if compressor == "set" and mode != "list":
        raise InvalidParams("The set compressor only supports listing mode.")


def _merge(pieces: list[tuple[np.ndarray, np.ndarray]]) -> tuple[np.ndarray, np.ndarray]:
    docs = np.concatenate([p[0] for p in pieces])
    counts = np.concatenate([p[1] for p in pieces])
    merged, inverse = np.unique(docs, return_inverse=True)
    return merged, np.bincount(inverse, weights=counts).astype(np.int64)


def _count(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    docs, counts = np.unique(values, return_counts=True)
    return docs.astype(np.int64), counts.astype(np.int64)


def build_pdl(
    idx: SuffixIndex,
    c: Collection,
    b: int = DEFAULT_BLOCK_SIZE,
    beta: float = DEFAULT_STORING_FACTOR,
    mode: str = "list",
    compressor: str = "repair",
) -> PdlIndex:
    _check_params(b, beta, mode, compressor)
    b = int(b)
    lcp = idx.require("lcp")
    da = idx.require("da")
    n = idx.n

    block_starts: list[int] = []
    # (left, right, part, frequency encoding) per stored node
    stored: list[tuple[int, int, int, FreqEncoding | None]] = []
    parts: dict[bytes, int] = {}
    sequences: list[np.ndarray] = []

    def store(left: int, right: int, docs: np.ndarray, counts: np.ndarray) -> None:
        encoding = None
        if mode != "list":
            order = np.lexsort((docs, -counts))
            docs = docs[order]
            if mode == "topk+f":
                encoding = encode_freqs(counts[order].tolist(), total=right - left + 1)
        part = parts.setdefault(docs.tobytes(), len(sequences))
        if part == len(sequences):
            sequences.append(docs)
        stored.append((left, right, part, encoding))

    if n <= b:
        block_starts.append(1)
    else:
        nodes = lcp_intervals(lcp)
        # docs, counts and frontier size of processed nodes still waiting for their parent
        pending: dict[int, tuple[np.ndarray, np.ndarray, int]] = {}
        for node_id, node in enumerate(nodes):
            if node.size <= b:
                continue
            pieces: list[tuple[np.ndarray, np.ndarray]] = []
            frontier = 0
            cursor = node.left
            for child_id in node.children + [None]:
                child_left = nodes[child_id].left if child_id is not None else node.right + 1
                if cursor < child_left:
                    # leaves between internal children: one block each
                    block_starts.extend(range(cursor, child_left))
                    pieces.append(_count(da[cursor - 1 : child_left - 1]))
                    frontier += child_left - cursor
                if child_id is None:
                    break
                child = nodes[child_id]
                if child.size <= b:
                    block_starts.append(child.left)
                    piece = _count(da[child.left - 1 : child.right])
                    pieces.append(piece)
                    frontier += int(piece[0].size)
                else:
                    child_docs, child_counts, child_frontier = pending.pop(child_id)
                    pieces.append((child_docs, child_counts))
                    frontier += child_frontier
                cursor = child.right + 1
            docs, counts = _merge(pieces)
            if beta == 0 or frontier >= beta * docs.size:
                store(node.left, node.right, docs, counts)
                frontier = int(docs.size)
            pending[node_id] = (docs, counts, frontier)

    stored.sort(key=lambda item: (item[0], -item[1]))
    index = PdlIndex(
        b=b,
        beta=beta,
        mode=mode,
        compressor=compressor,
        n=n,
        d=c.d,
        block_starts=np.sort(np.asarray(block_starts, dtype=np.int64)),
        node_left=[item[0] for item in stored],
        node_right=[item[1] for item in stored],
        node_part=[item[2] for item in stored],
    )
    if not stored:
        return index
    if compressor == "set":
        index.set_grammar = setpair_compress([docs.tolist() for docs in sequences], terminal_limit=c.d + 1)
    else:
        index.grammar = repair_compress_many(sequences, terminal_limit=c.d + 1)
    if mode == "topk+f":
        index.freqs = tuple(item[3] for item in stored)
    return index


def _margin_docs(idx: SuffixIndex, c: Collection, left: int, right: int) -> np.ndarray:
    # DA when the index carries it, otherwise locate() and rank over B
    if idx.da is not None:
        return idx.da[left - 1 : right]
    return c.B.rank_many(locate(idx, left, right))


def pdl_list(p: PdlIndex, idx: SuffixIndex, c: Collection, sp: int, ep: int) -> ListResult:
    if not p.listing:
        raise WrongMode(f"PDL index built in {p.mode!r} mode cannot answer listing queries.")
    check_range(sp, ep, p.n)
    covered, margins = p.decompose(sp, ep)
    pieces = [np.asarray(p.decode(node), dtype=np.int64) for node in covered]
    pieces.extend(_margin_docs(idx, c, left, right) for left, right in margins)
    docs = np.unique(np.concatenate(pieces))
    return ListResult(docs=tuple(int(g) for g in docs), occ=ep - sp + 1)


def pdl_topk(
    p: PdlIndex,
    idx: SuffixIndex,
    c: Collection,
    sp: int,
    ep: int,
    k: int,
    scratch: Scratch | None = None,
) -> list[TopkHit]:
    if p.listing:
        raise WrongMode("PDL index built in listing mode cannot answer top-k queries.")
    if k < 1:
        raise ContractViolation("k must be at least 1.")
    check_range(sp, ep, p.n)
    if p.beta >= 1 and not p.with_freqs:
        raise MissingFreqs("Top-k with beta >= 1 merges sets and needs stored frequencies (mode topk+f).")

    node = p.node_lookup.get((sp, ep))
    if node is not None:
        docs = p.decode_prefix(node, k)
        if p.with_freqs:
            return [TopkHit(g, f) for g, f in zip(docs, p.node_freqs(node))]
        return [TopkHit(g, None) for g in docs]

    covered, margins = p.decompose(sp, ep)
    if covered and not p.with_freqs:
        raise MissingFreqs("Range spans stored sets but the index has no frequencies.")
    scratch = scratch or Scratch(p.d)
    scratch.begin()
    for node in covered:
        for g, f in zip(p.decode(node), p.node_freqs(node)):
            scratch.add(g, f)
    for left, right in margins:
        docs, counts = _count(_margin_docs(idx, c, left, right))
        for g, f in zip(docs.tolist(), counts.tolist()):
            scratch.add(g, f)
    touched = scratch.touched
    return canonical_topk(np.asarray(touched), np.asarray([scratch.freq[g] for g in touched]), k)
