"""Grammar compression of integer sequences and sets, and the frequency codec.

Re-Pair repeatedly replaces the most frequent adjacent pair (counted
left-to-right without overlaps) by a fresh nonterminal; ties go to the
lexicographically smallest pair, so grammars are reproducible.
"""
from __future__ import annotations

import heapq
from array import array
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, EmptyInput, MalformedGrammar, MalformedInput, NotMonotone


@dataclass(frozen=True)
class Grammar:
    terminal_limit: int
    rules: tuple[tuple[int, int], ...]
    sequence: tuple[int, ...]
    # offsets of the compressed parts in `sequence`; one part unless built by repair_compress_many
    parts: tuple[int, ...] = ()
    rule_counts: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if not self.parts:
            object.__setattr__(self, "parts", (0, len(self.sequence)))
        limit = self.terminal_limit
        for t, (left, right) in enumerate(self.rules):
            if not (0 <= left < limit + t and 0 <= right < limit + t):
                raise MalformedGrammar(f"Rule {t} references an unknown or later symbol.")
        top = limit + len(self.rules)
        for symbol in self.sequence:
            if not (0 <= symbol < top):
                raise MalformedGrammar(f"Sequence symbol {symbol} is not defined.")
        if self.parts[0] != 0 or self.parts[-1] != len(self.sequence) or list(self.parts) != sorted(self.parts):
            raise MalformedGrammar("Part offsets do not cover the sequence.")

    @property
    def part_count(self) -> int:
        return len(self.parts) - 1

    def size(self) -> int:
        """Grammar size in symbols: two per rule plus the final sequence."""
        return 2 * len(self.rules) + len(self.sequence)


def _expand(g: Grammar, symbols: Iterable[int], limit: int | None = None) -> list[int]:
    """Expand symbols left-first, stopping once `limit` terminals are produced."""
    out: list[int] = []
    if limit is not None and limit <= 0:
        return out
    terminal_limit = g.terminal_limit
    rules = g.rules
    stack = list(symbols)
    stack.reverse()
    while stack:
        symbol = stack.pop()
        if symbol < terminal_limit:
            out.append(symbol)
            if limit is not None and len(out) >= limit:
                break
        else:
            left, right = rules[symbol - terminal_limit]
            stack.append(right)
            stack.append(left)
    return out


def repair_compress(seq: Sequence[int], terminal_limit: int | None = None) -> Grammar:
    if len(seq) == 0:
        raise EmptyInput("Re-Pair needs a nonempty sequence.")
    return repair_compress_many([seq], terminal_limit)


def _pair_lists(flat: np.ndarray, nxt: np.ndarray, width: int):
    """Occurrence lists of every adjacent pair, threaded through per-position links."""
    total = flat.size
    onext = np.full(total, -1, dtype=np.int64)
    oprev = np.full(total, -1, dtype=np.int64)
    pos = np.flatnonzero(nxt != -1)
    keys = flat[pos] * width + flat[pos + 1]
    order = np.argsort(keys, kind="stable")
    keys, pos = keys[order], pos[order]
    same = keys[1:] == keys[:-1]
    onext[pos[:-1][same]] = pos[1:][same]
    oprev[pos[1:][same]] = pos[:-1][same]
    firsts = np.flatnonzero(np.concatenate(([True], ~same))) if keys.size else np.zeros(0, dtype=np.int64)
    counts = np.diff(np.append(firsts, keys.size))
    return onext, oprev, keys[firsts], pos[firsts], counts


def _as_array(values: np.ndarray) -> array:
    return array("q", np.ascontiguousarray(values, dtype=np.int64).tobytes())


def repair_compress_many(seqs: Sequence[Sequence[int]], terminal_limit: int | None = None) -> Grammar:
    """Re-Pair over several sequences sharing one rule set; pairs never span two sequences.

    Each position carries its sequence neighbours and its neighbours in the
    occurrence list of the pair it starts, so memory stays a few machine
    words per input symbol.
    """
    if len(seqs) == 0:
        raise EmptyInput("Re-Pair needs at least one sequence.")
    lengths = np.fromiter((len(seq) for seq in seqs), dtype=np.int64, count=len(seqs))
    total = int(lengths.sum())
    flat = np.concatenate([np.asarray(seq, dtype=np.int64).ravel() for seq in seqs]) if total else np.zeros(0, np.int64)
    if terminal_limit is None:
        terminal_limit = int(flat.max()) + 1 if total else 0
    if total:
        bad = flat[(flat < 0) | (flat >= terminal_limit)]
        if bad.size:
            raise MalformedInput(f"Symbol {int(bad[0])} outside [0,{terminal_limit}).")

    ends = np.cumsum(lengths)
    starts = ends - lengths
    nonempty = lengths > 0
    nxt = np.arange(1, total + 1, dtype=np.int64)
    prv = np.arange(-1, total - 1, dtype=np.int64)
    if total:
        nxt[ends[nonempty] - 1] = -1
        prv[starts[nonempty]] = -1
    # pair keys sort like (left, right); no symbol reaches terminal_limit + total
    width = terminal_limit + total + 1
    onext_np, oprev_np, first_keys, first_pos, first_counts = _pair_lists(flat, nxt, width)
    head: dict[int, int] = dict(zip(first_keys.tolist(), first_pos.tolist()))
    count: dict[int, int] = dict(zip(first_keys.tolist(), first_counts.tolist()))
    repeated = first_counts >= 2
    heap = list(zip((-first_counts[repeated]).tolist(), first_keys[repeated].tolist()))
    heapq.heapify(heap)

    symbols, nxt, prv = _as_array(flat), _as_array(nxt), _as_array(prv)
    onext, oprev = _as_array(onext_np), _as_array(oprev_np)
    del flat, onext_np, oprev_np

    def unlink(pos: int) -> None:
        key = symbols[pos] * width + symbols[nxt[pos]]
        before, after = oprev[pos], onext[pos]
        if before != -1:
            onext[before] = after
        else:
            head[key] = after
        if after != -1:
            oprev[after] = before
        left = count[key] - 1
        if left:
            count[key] = left
        else:
            del count[key], head[key]

    def link(pos: int) -> int:
        key = symbols[pos] * width + symbols[nxt[pos]]
        first = head.get(key, -1)
        onext[pos] = first
        oprev[pos] = -1
        if first != -1:
            oprev[first] = pos
        head[key] = pos
        count[key] = count.get(key, 0) + 1
        return key

    def occurrences(key: int) -> list[int]:
        found = []
        pos = head.get(key, -1)
        while pos != -1:
            found.append(pos)
            pos = onext[pos]
        return found

    def exact_count(key: int) -> int:
        listed = count.get(key, 0)
        left, right = divmod(key, width)
        if left != right or listed < 2:
            return listed
        # a run of equal symbols of length L holds L-1 overlapping pairs, floor(L/2) usable
        members = set(occurrences(key))
        usable = 0
        for pos in members:
            if prv[pos] in members:
                continue
            chain = 0
            while pos in members:
                chain += 1
                pos = nxt[pos]
            usable += (chain + 1) // 2
        return usable

    # heap keys are upper bounds of the current exact counts
    rules: list[tuple[int, int]] = []
    rule_counts: list[int] = []
    while heap:
        negative, key = heapq.heappop(heap)
        if -negative < 2:
            break
        exact = exact_count(key)
        if exact != -negative:
            if exact >= 2:
                heapq.heappush(heap, (-exact, key))
            continue
        new_symbol = terminal_limit + len(rules)
        left_symbol, right_symbol = divmod(key, width)
        rules.append((left_symbol, right_symbol))
        rule_counts.append(exact)
        grown: set[int] = set()
        for i in sorted(occurrences(key)):
            # replaced right halves are marked -1
            if symbols[i] != left_symbol:
                continue
            j = nxt[i]
            if j == -1 or symbols[j] != right_symbol:
                continue
            h, k = prv[i], nxt[j]
            if h != -1:
                unlink(h)
            unlink(i)
            if k != -1:
                unlink(j)
            symbols[i] = new_symbol
            symbols[j] = -1
            nxt[i] = k
            if k != -1:
                prv[k] = i
            if h != -1:
                grown.add(link(h))
            if k != -1:
                grown.add(link(i))
        for grown_key in grown:
            listed = count.get(grown_key, 0)
            if listed >= 2:
                heapq.heappush(heap, (-listed, grown_key))

    sequence: list[int] = []
    parts = [0]
    for start, size in zip(starts.tolist(), lengths.tolist()):
        pos = start if size else -1
        while pos != -1:
            sequence.append(symbols[pos])
            pos = nxt[pos]
        parts.append(len(sequence))
    return Grammar(
        terminal_limit=terminal_limit,
        rules=tuple(rules),
        sequence=tuple(sequence),
        parts=tuple(parts),
        rule_counts=tuple(rule_counts),
    )


def repair_decompress(g: Grammar) -> list[int]:
    return _expand(g, g.sequence)


def repair_expand_prefix(g: Grammar, k: int) -> list[int]:
    """First min(k, |expansion|) symbols without expanding the rest."""
    if k < 0:
        raise ContractViolation("Prefix length must be non-negative.")
    return _expand(g, g.sequence, limit=k)


def expand_part(g: Grammar, part: int) -> list[int]:
    return _expand(g, g.sequence[g.parts[part] : g.parts[part + 1]])


def expand_part_prefix(g: Grammar, part: int, k: int) -> list[int]:
    if k < 0:
        raise ContractViolation("Prefix length must be non-negative.")
    return _expand(g, g.sequence[g.parts[part] : g.parts[part + 1]], limit=k)


@dataclass(frozen=True)
class SetGrammar:
    """Set rules X -> {a, b} and the rewritten sets (each sorted ascending)."""

    terminal_limit: int
    rules: tuple[tuple[int, int], ...]
    sets: tuple[tuple[int, ...], ...]

    def rule_dict(self) -> dict[int, tuple[int, int]]:
        return {self.terminal_limit + t: pair for t, pair in enumerate(self.rules)}

    def size(self) -> int:
        return 2 * len(self.rules) + sum(len(s) for s in self.sets)


def setpair_compress(sets: Sequence[Sequence[int]], terminal_limit: int | None = None) -> SetGrammar:
    """Greedy pairing of symbols that co-occur in the most sets."""
    for index, items in enumerate(sets):
        if any(items[i] >= items[i + 1] for i in range(len(items) - 1)):
            raise MalformedInput(f"Set {index} is not strictly increasing.")
    if terminal_limit is None:
        terminal_limit = max((s[-1] for s in sets if len(s)), default=-1) + 1
    current: list[set[int]] = [set(int(x) for x in s) for s in sets]
    postings: dict[int, set[int]] = {}
    counts: Counter = Counter()
    for set_id, members in enumerate(current):
        ordered = sorted(members)
        for symbol in ordered:
            postings.setdefault(symbol, set()).add(set_id)
        for i, a in enumerate(ordered):
            for b in ordered[i + 1 :]:
                counts[(a, b)] += 1

    heap = [(-count, pair) for pair, count in counts.items() if count >= 2]
    heapq.heapify(heap)
    rules: list[tuple[int, int]] = []
    while heap:
        key, pair = heapq.heappop(heap)
        count = counts.get(pair, 0)
        if count != -key:
            if count >= 2:
                heapq.heappush(heap, (-count, pair))
            continue
        if count < 2:
            break
        a, b = pair
        new_symbol = terminal_limit + len(rules)
        rules.append(pair)
        grown: set[tuple[int, int]] = set()
        for set_id in sorted(postings[a] & postings[b]):
            members = current[set_id]
            members.discard(a)
            members.discard(b)
            for other in members:
                for gone in ((min(a, other), max(a, other)), (min(b, other), max(b, other))):
                    counts[gone] -= 1
                    if counts[gone] <= 0:
                        del counts[gone]
                # new_symbol is the largest symbol so far
                counts[(other, new_symbol)] += 1
                grown.add((other, new_symbol))
            members.add(new_symbol)
            postings[a].discard(set_id)
            postings[b].discard(set_id)
            postings.setdefault(new_symbol, set()).add(set_id)
        counts.pop(pair, None)
        for grown_pair in grown:
            if counts.get(grown_pair, 0) >= 2:
                heapq.heappush(heap, (-counts[grown_pair], grown_pair))
    return SetGrammar(
        terminal_limit=terminal_limit,
        rules=tuple(rules),
        sets=tuple(tuple(sorted(members)) for members in current),
    )


def setpair_expand(g: SetGrammar, symbols: Iterable[int]) -> list[int]:
    """Expand a rewritten set back to its sorted terminal members."""
    out: set[int] = set()
    stack = list(symbols)
    limit = g.terminal_limit
    while stack:
        symbol = stack.pop()
        if symbol < limit:
            out.add(symbol)
        else:
            t = symbol - limit
            if t >= len(g.rules):
                raise MalformedGrammar(f"Set symbol {symbol} is not defined.")
            stack.extend(g.rules[t])
    return sorted(out)


@dataclass(frozen=True)
class FreqEncoding:
    """Run lengths, then the first run head followed by positive head gaps."""

    run_lengths: tuple[int, ...]
    heads: tuple[int, ...]

    @property
    def runs(self) -> int:
        return len(self.run_lengths)

    def __len__(self) -> int:
        return sum(self.run_lengths)


def encode_freqs(freqs: Sequence[int], total: int | None = None) -> FreqEncoding:
    """RLE of a non-increasing positive sequence with differential run heads.

    When `total` (the subtree size) is given, the run count r must satisfy
    r(r+1)/2 <= total: r distinct positive values sum to at least that much.
    """
    lengths: list[int] = []
    values: list[int] = []
    previous = None
    for value in freqs:
        value = int(value)
        if value <= 0:
            raise NotMonotone(f"Frequencies must be positive, got {value}.")
        if previous is not None and value > previous:
            raise NotMonotone("Frequencies must be non-increasing.")
        if value == previous:
            lengths[-1] += 1
        else:
            lengths.append(1)
            values.append(value)
        previous = value
    runs = len(lengths)
    if total is not None and runs * (runs + 1) // 2 > total:
        raise ContractViolation(f"{runs} runs cannot fit in a subtree of {total} suffixes.")
    heads = values[:1] + [values[i - 1] - values[i] for i in range(1, runs)]
    return FreqEncoding(run_lengths=tuple(lengths), heads=tuple(heads))


def decode_freqs(e: FreqEncoding) -> list[int]:
    out: list[int] = []
    value = 0
    for i, (length, head) in enumerate(zip(e.run_lengths, e.heads)):
        value = head if i == 0 else value - head
        out.extend([value] * length)
    return out
