"""Synthetic repetitive collections and pattern sets.

DNA: bases mutated at rate min(10p, 0.9) from one source window, every
variant its own document. Concat and Version: consecutive source windows as
bases; Concat joins the variants of a base into one document, Version keeps
each variant separate. All randomness comes from one PCG64 stream seeded by
`GenSpec.seed`, so the same spec always yields the same bytes.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import TERMINATOR, Collection, build_collection
from .doclist import count_freqs
from .errors import (
    EmptyDistribution,
    InvalidParams,
    MalformedInput,
    PatternLengthExceedsDocs,
    SourceTooShort,
)
from .suffixes import SuffixIndex, build_suffix_index, find

KINDS = ("dna", "concat", "version")
DNA_ALPHABET = b"ACGT"
TEXT_ALPHABET = b"abcdefghijklmnopqrstuvwxyz "
BASE_RATE_FACTOR = 10
MAX_BASE_RATE = 0.9

DEFAULT_PATTERN_LENGTH = 7
DEFAULT_SAMPLE_COUNT = 100000
DEFAULT_KEEP = 1000


@dataclass(frozen=True)
class GenSpec:
    kind: str
    base_count: int
    variants_per_base: int
    base_length: int
    mutation_rate: float
    seed: int = 0
    source: bytes | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidParams(f"Unknown collection kind {self.kind!r}; expected one of {', '.join(KINDS)}.")
        if min(self.base_count, self.variants_per_base, self.base_length) <= 0:
            raise InvalidParams("bases, variants and length must all be positive.")
        if not (0 <= self.mutation_rate <= 1):
            raise InvalidParams(f"Mutation rate must lie in [0,1], got {self.mutation_rate}.")

    @property
    def alphabet(self) -> bytes:
        return DNA_ALPHABET if self.kind == "dna" else TEXT_ALPHABET

    @property
    def source_needed(self) -> int:
        if self.kind == "dna":
            return self.base_length
        return self.base_count * self.base_length


@dataclass(frozen=True, eq=False)
class Distribution:
    symbols: np.ndarray
    probs: np.ndarray


def empirical_distribution(source: bytes) -> Distribution:
    """Unigram distribution of the bytes in `source`."""
    counts = np.bincount(np.frombuffer(bytes(source), dtype=np.uint8), minlength=256)
    symbols = np.flatnonzero(counts).astype(np.uint8)
    total = counts.sum()
    probs = counts[symbols] / total if total else np.zeros(0)
    return Distribution(symbols=symbols, probs=probs)


def random_source(length: int, alphabet: bytes, rng: np.random.Generator) -> bytes:
    symbols = np.frombuffer(bytes(alphabet), dtype=np.uint8)
    return rng.choice(symbols, size=length).astype(np.uint8).tobytes()


def mutate_zero_order(s: bytes, rate: float, dist: Distribution, rng: np.random.Generator) -> bytes:
    """Replace each byte independently with probability `rate` by a draw from `dist`."""
    if dist.symbols.size == 0:
        raise EmptyDistribution("Mutation needs a nonempty symbol distribution.")
    data = np.frombuffer(bytes(s), dtype=np.uint8).copy()
    hits = rng.random(data.size) < rate
    count = int(hits.sum())
    if count:
        data[hits] = rng.choice(dist.symbols, size=count, p=dist.probs)
    return data.tobytes()


def _strip_terminators(source: bytes) -> bytes:
    return bytes(source).replace(bytes([TERMINATOR]), b"")


def generate_variants(spec: GenSpec) -> list[list[bytes]]:
    """Variants grouped by base document; shared by all three kinds."""
    rng = np.random.default_rng(spec.seed)
    need = spec.source_needed
    if spec.source is not None:
        source = _strip_terminators(spec.source)
    else:
        source = random_source(need, spec.alphabet, rng)
    if len(source) < need:
        raise SourceTooShort(f"Source has {len(source)} usable bytes, {need} needed.")
    dist = empirical_distribution(source)
    offset = int(rng.integers(0, len(source) - need + 1))
    length = spec.base_length

    groups: list[list[bytes]] = []
    for b in range(spec.base_count):
        if spec.kind == "dna":
            window = source[offset : offset + length]
            base = mutate_zero_order(window, min(BASE_RATE_FACTOR * spec.mutation_rate, MAX_BASE_RATE), dist, rng)
        else:
            base = source[offset + b * length : offset + (b + 1) * length]
        groups.append([mutate_zero_order(base, spec.mutation_rate, dist, rng) for _ in range(spec.variants_per_base)])
    return groups


def gen_dna(spec: GenSpec) -> Collection:
    if spec.kind != "dna":
        raise InvalidParams(f"gen_dna needs kind 'dna', got {spec.kind!r}.")
    return build_collection([v for group in generate_variants(spec) for v in group])


def gen_version(spec: GenSpec) -> Collection:
    if spec.kind != "version":
        raise InvalidParams(f"gen_version needs kind 'version', got {spec.kind!r}.")
    return build_collection([v for group in generate_variants(spec) for v in group])


def gen_concat(spec: GenSpec) -> Collection:
    if spec.kind != "concat":
        raise InvalidParams(f"gen_concat needs kind 'concat', got {spec.kind!r}.")
    return build_collection([b"".join(group) for group in generate_variants(spec)])


GENERATORS = {"dna": gen_dna, "concat": gen_concat, "version": gen_version}


def generate(spec: GenSpec) -> Collection:
    return GENERATORS[spec.kind](spec)


def gen_patterns_substr(
    c: Collection,
    length: int = DEFAULT_PATTERN_LENGTH,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    keep: int = DEFAULT_KEEP,
    idx: SuffixIndex | None = None,
    seed: int = 0,
) -> list[bytes]:
    """Sample substrings, drop duplicates, keep those with the largest occ/docc.

    Ties are broken by the pattern bytes so the output is reproducible.
    """
    if length < 1:
        raise InvalidParams(f"Pattern length must be >= 1, got {length}.")
    if keep > sample_count:
        raise InvalidParams(f"keep ({keep}) cannot exceed the sample count ({sample_count}).")
    raw = c.text_array()
    # terminators seen before each position; a window is valid when it holds none
    seen = np.concatenate(([0], np.cumsum(raw == TERMINATOR)))
    last_start = c.n - length
    if last_start < 0:
        raise PatternLengthExceedsDocs(f"No document is at least {length} bytes long.")
    starts = np.arange(last_start + 1)
    valid = starts[seen[starts + length] == seen[starts]]
    if valid.size == 0:
        raise PatternLengthExceedsDocs(f"No document is at least {length} bytes long.")

    rng = np.random.default_rng(seed)
    picked = rng.choice(valid, size=sample_count)
    text = c.text
    candidates = sorted({text[i : i + length] for i in picked.tolist()})

    idx = idx if idx is not None and idx.da is not None else build_suffix_index(c, arrays=("da",))
    scored: list[tuple[float, bytes]] = []
    for pattern in candidates:
        sp, ep = find(idx, c, pattern)
        docc = len(count_freqs(idx, sp, ep))
        scored.append((-(ep - sp + 1) / docc, pattern))
    scored.sort()
    return [pattern for _, pattern in scored[:keep]]


def read_patterns(path: Path, hex: bool = False) -> list[bytes]:
    """One pattern per line; blank lines are skipped."""
    lines = Path(path).read_bytes().split(b"\n")
    patterns: list[bytes] = []
    for number, line in enumerate(lines, start=1):
        if line.endswith(b"\r"):
            line = line[:-1]
        if not line:
            continue
        if hex:
            try:
                line = bytes.fromhex(line.decode("ascii"))
            except ValueError as exc:
                raise MalformedInput(f"Line {number} of {path} is not valid hex: {exc}") from exc
        patterns.append(line)
    return patterns


def write_patterns(path: Path, patterns: Sequence[bytes], hex: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [p.hex().encode("ascii") if hex else bytes(p) for p in patterns]
    path.write_bytes(b"".join(line + b"\n" for line in lines))
    return path
