"""Range-minimum queries returning the leftmost minimum position.

A sparse table of power-of-two window minima is built over block minima;
queries combine at most two in-block scans with two table lookups. With
`block=1` this is the classic full sparse table.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyArray, check_range

DEFAULT_RMQ_BLOCK = 1


@dataclass(frozen=True, eq=False)
class RmqIndex:
    values: np.ndarray
    block: int
    # table[k][i]: 0-based position of the leftmost minimum of blocks i..i+2^k-1
    table: tuple[np.ndarray, ...]

    @property
    def length(self) -> int:
        return int(self.values.size)

    def _leftmost_min(self, a: int, b: int) -> int:
        """Leftmost minimum of 0-based values[a..b] by direct scan."""
        return a + int(np.argmin(self.values[a : b + 1]))

    def _table_min(self, lo: int, hi: int) -> int:
        """Leftmost minimum position over whole blocks lo..hi."""
        level = (hi - lo + 1).bit_length() - 1
        left = int(self.table[level][lo])
        right = int(self.table[level][hi - (1 << level) + 1])
        return left if self.values[left] <= self.values[right] else right

    def query(self, i: int, j: int) -> int:
        check_range(i, j, self.length)
        a, b = i - 1, j - 1
        first_block, last_block = a // self.block, b // self.block
        if last_block - first_block <= 1:
            return self._leftmost_min(a, b) + 1
        # candidates in left-to-right order, strict comparison keeps the leftmost
        candidates = [
            self._leftmost_min(a, (first_block + 1) * self.block - 1),
            self._table_min(first_block + 1, last_block - 1),
            self._leftmost_min(last_block * self.block, b),
        ]
        best = candidates[0]
        for pos in candidates[1:]:
            if self.values[pos] < self.values[best]:
                best = pos
        return best + 1


def build_rmq(values, block: int = DEFAULT_RMQ_BLOCK) -> RmqIndex:
    values = np.array(values, dtype=np.int64)
    n = int(values.size)
    if n == 0:
        raise EmptyArray("Cannot build an RMQ over an empty array.")
    block = max(1, int(block))
    blocks = -(-n // block)
    padded = np.full(blocks * block, np.iinfo(np.int64).max, dtype=np.int64)
    padded[:n] = values
    # argmin per block returns the first (leftmost) minimum
    level = (np.argmin(padded.reshape(blocks, block), axis=1) + np.arange(blocks) * block).astype(np.int64)
    level = np.minimum(level, n - 1)
    table = [level]
    width = 1
    while 2 * width <= blocks:
        prev = table[-1]
        left = prev[: blocks - 2 * width + 1]
        right = prev[width : width + left.size]
        table.append(np.where(values[left] <= values[right], left, right))
        width *= 2
    return RmqIndex(values=values, block=block, table=tuple(table))


def rmq(r: RmqIndex, i: int, j: int) -> int:
    """Leftmost position of the minimum of a[i..j] (1-based, inclusive)."""
    return r.query(i, j)
