"""Collection model: concatenated documents, boundary bitvector B and rank/select.

Positions are 1-based throughout: T[1..n], B[1..n], document ids 1..d.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyCollection, ForbiddenByte, FormatError, OutOfBounds

TERMINATOR = 0x00
DOCS_SUFFIX = ".docs"

SUPERBLOCK_BITS = 512
BLOCK_BITS = 64


class BitvectorRank:
    """Plain bitvector with two-level rank counters.

    Superblock counters hold absolute ranks every 512 bits, block counters the
    rank relative to their superblock every 64 bits; the remainder is a popcount
    over at most 63 bits.
    """

    def __init__(self, bits: np.ndarray) -> None:
        self.bits = np.asarray(bits, dtype=bool)
        self.n = int(self.bits.size)
        cumulative = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.bits, out=cumulative[1:])
        self.superblocks = cumulative[::SUPERBLOCK_BITS].copy()
        block_ranks = cumulative[::BLOCK_BITS]
        owner = np.arange(block_ranks.size) * BLOCK_BITS // SUPERBLOCK_BITS
        self.blocks = (block_ranks - self.superblocks[owner]).astype(np.uint16)
        self.ones = int(cumulative[-1])
        # select samples: positions of every 1-bit (1-based)
        self.one_positions = np.flatnonzero(self.bits).astype(np.int64) + 1

    def rank1(self, j: int) -> int:
        """Number of 1-bits in B[1..j]."""
        if not (0 <= j <= self.n):
            raise OutOfBounds(f"rank position {j} outside [0,{self.n}].")
        block = j // BLOCK_BITS
        base = int(self.superblocks[j // SUPERBLOCK_BITS]) + int(self.blocks[block])
        start = block * BLOCK_BITS
        if start < j:
            base += int(np.count_nonzero(self.bits[start:j]))
        return base

    def rank_many(self, positions: np.ndarray) -> np.ndarray:
        """Vectorized rank1 over an array of positions in [0, n]."""
        positions = np.asarray(positions, dtype=np.int64)
        if positions.size and (positions.min() < 0 or positions.max() > self.n):
            raise OutOfBounds(f"rank positions outside [0,{self.n}].")
        return np.searchsorted(self.one_positions, positions, side="right")

    def select1(self, k: int) -> int:
        """Position of the k-th 1-bit."""
        if not (1 <= k <= self.ones):
            raise OutOfBounds(f"select index {k} outside [1,{self.ones}].")
        return int(self.one_positions[k - 1])


def rank1(B: BitvectorRank, j: int) -> int:
    return B.rank1(j)


def select1(B: BitvectorRank, k: int) -> int:
    return B.select1(k)


@dataclass(frozen=True, eq=False)
class Collection:
    text: bytes
    B: BitvectorRank

    @property
    def n(self) -> int:
        return len(self.text)

    @property
    def d(self) -> int:
        return self.B.ones

    @property
    def doc_starts(self) -> np.ndarray:
        return self.B.one_positions

    def doc_span(self, g: int) -> tuple[int, int]:
        """[start, end] of document g; end is its terminator."""
        start = self.B.select1(g)
        end = self.B.select1(g + 1) - 1 if g < self.d else self.n
        return start, end

    def documents(self) -> list[bytes]:
        return self.text.split(bytes([TERMINATOR]))[:-1]

    def text_array(self) -> np.ndarray:
        return np.frombuffer(self.text, dtype=np.uint8)


def build_collection(docs: Sequence[bytes]) -> Collection:
    """Concatenate documents, each followed by the terminator byte."""
    if len(docs) == 0:
        raise EmptyCollection()
    parts: list[bytes] = []
    for doc_index, doc in enumerate(docs, start=1):
        doc = bytes(doc)
        offset = doc.find(bytes([TERMINATOR]))
        if offset >= 0:
            raise ForbiddenByte(doc_index, offset + 1)
        parts.append(doc)
        parts.append(bytes([TERMINATOR]))
    return collection_from_text(b"".join(parts))


def collection_from_text(text: bytes) -> Collection:
    """Rebuild a Collection from T; B is recomputed from the terminators."""
    if not text:
        raise EmptyCollection()
    if text[-1] != TERMINATOR:
        raise FormatError("Collection text must end with the terminator byte 0x00.")
    raw = np.frombuffer(text, dtype=np.uint8)
    bits = np.zeros(raw.size, dtype=bool)
    bits[0] = True
    bits[1:] = raw[:-1] == TERMINATOR
    return Collection(text=bytes(text), B=BitvectorRank(bits))


def doc_of(c: Collection, i: int) -> int:
    """Identifier of the document containing T[i]."""
    if not (1 <= i <= c.n):
        raise OutOfBounds(f"Text position {i} outside [1,{c.n}].")
    return c.B.rank1(i)


def read_docs(path: Path) -> Collection:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"Collection file not found: {path}")
    if path.is_dir():
        return read_directory(path)
    return collection_from_text(path.read_bytes())


def read_directory(path: Path) -> Collection:
    """Each regular file is one document, in lexicographic filename order."""
    files = sorted(p for p in Path(path).iterdir() if p.is_file())
    return build_collection([p.read_bytes() for p in files])


def write_docs(path: Path, c: Collection) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(c.text)
    return path
