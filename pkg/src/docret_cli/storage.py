"""The `.dgx` index container.

Layout (little-endian)::

    MAGIC "DGX1" | u32 version | u32 section count
    per section: 4-byte tag | u8 key length | key | u64 body length | body

Integer arrays inside a body are records ``u8 width | u64 count | i64 base``
followed by ``count * width`` bits of ``value - base``, packed LSB-first and
padded to a whole byte. The width is the smallest that fits the value range,
so a document array over d documents costs exactly ceil(log2(max(d, 2))) bits
per entry. An RMQ section omits its values when the array it was built over
has its own section.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Collection, collection_from_text
from .errors import FormatError
from .grammar import FreqEncoding, Grammar, SetGrammar
from .pdl import PdlIndex
from .rmq import RmqIndex
from .suffixes import IlcpRuns, SuffixIndex

MAGIC = b"DGX1"
FORMAT_VERSION = 2
INDEX_SUFFIX = ".dgx"

_RECORD = struct.Struct("<BQq")
_HEADER = struct.Struct("<4sII")
_PACK_STEP = 1 << 16

ARRAY_TAGS = {"SA  ": "sa", "DA  ": "da", "LCP ": "lcp", "ILCP": "ilcp", "C   ": "c"}

# arrays an RMQ section may borrow its values from instead of storing a copy
RMQ_SOURCES = {
    "C": lambda idx: idx.c,
    "ILCP": lambda idx: idx.ilcp,
    "RUNS": lambda idx: idx.ilcp_runs.values if idx.ilcp_runs is not None else None,
}


@dataclass(frozen=True)
class SectionInfo:
    tag: str
    key: str
    nbytes: int
    payload_bits: int

    @property
    def label(self) -> str:
        name = self.tag.strip()
        return f"{name}:{self.key}" if self.key else name

    @property
    def bits(self) -> int:
        return 8 * self.nbytes


@dataclass(eq=False)
class IndexBundle:
    collection: Collection
    idx: SuffixIndex
    structures: tuple[str, ...] = ()
    pdl: PdlIndex | None = None
    meta: dict = field(default_factory=dict)
    sections: list[SectionInfo] = field(default_factory=list)

    def section(self, tag: str, key: str = "") -> SectionInfo | None:
        for info in self.sections:
            if info.tag == tag and info.key == key:
                return info
        return None


def _pack_bits(shifted: np.ndarray, width: int) -> bytes:
    if width in (8, 16, 32, 64):
        return shifted.astype(f"<u{width // 8}").tobytes()
    shifts = np.arange(width, dtype=np.uint64)
    chunks = []
    # whole chunks hold a multiple of 8 values, so only the last one is padded
    for start in range(0, shifted.size, _PACK_STEP):
        part = shifted[start : start + _PACK_STEP]
        bits = ((part[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
        chunks.append(np.packbits(bits.ravel(), bitorder="little").tobytes())
    return b"".join(chunks)


def pack_ints(values) -> bytes:
    values = np.asarray(values, dtype=np.int64).ravel()
    count = int(values.size)
    if count == 0:
        return _RECORD.pack(1, 0, 0)
    base = int(values.min())
    shifted = (values - base).astype(np.uint64)
    width = max(1, int(shifted.max()).bit_length())
    return _RECORD.pack(width, count, base) + _pack_bits(shifted, width)


class _Reader:
    """Cursor over one section body; counts the packed payload bits it reads."""

    def __init__(self, data: bytes, where: str) -> None:
        self.data = data
        self.where = where
        self.pos = 0
        self.payload_bits = 0

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise FormatError(f"Truncated {self.where} section.")
        chunk = self.data[self.pos : self.pos + size]
        self.pos += size
        return chunk

    def unpack(self, fmt: str) -> tuple:
        layout = struct.Struct(fmt)
        return layout.unpack(self.take(layout.size))

    def ints(self) -> np.ndarray:
        width, count, base = self.unpack(_RECORD.format)
        if not 1 <= width <= 64:
            raise FormatError(f"Bad integer width {width} in {self.where} section.")
        raw = self.take((count * width + 7) // 8)
        self.payload_bits += count * width
        if count == 0:
            return np.zeros(0, dtype=np.int64)
        if width in (8, 16, 32, 64):
            shifted = np.frombuffer(raw, dtype=f"<u{width // 8}").astype(np.uint64)
        else:
            shifts = np.arange(width, dtype=np.uint64)
            buffer = np.frombuffer(raw, dtype=np.uint8)
            parts = []
            for start in range(0, count, _PACK_STEP):
                size = min(_PACK_STEP, count - start)
                chunk = buffer[start * width // 8 :]
                bits = np.unpackbits(chunk, count=size * width, bitorder="little").reshape(size, width)
                parts.append((bits.astype(np.uint64) << shifts).sum(axis=1, dtype=np.uint64))
            shifted = np.concatenate(parts)
        return shifted.astype(np.int64) + base

    def finish(self) -> None:
        if self.pos != len(self.data):
            raise FormatError(f"Trailing bytes in {self.where} section.")


def rmq_source(idx: SuffixIndex, key: str) -> np.ndarray | None:
    try:
        return RMQ_SOURCES[key](idx)
    except KeyError:
        raise FormatError(f"Unknown RMQ key {key!r}.") from None


def _rmq_body(r: RmqIndex, shared: bool) -> bytes:
    parts = [struct.pack("<IBB", r.block, len(r.table), 0 if shared else 1)]
    if not shared:
        parts.append(pack_ints(r.values))
    parts.extend(pack_ints(level) for level in r.table)
    return b"".join(parts)


def _grammar_body(p: PdlIndex) -> bytes:
    if p.set_grammar is not None:
        g = p.set_grammar
        return b"".join(
            [
                struct.pack("<BQ", 1, g.terminal_limit),
                pack_ints(np.asarray(g.rules, dtype=np.int64).ravel()),
                pack_ints([len(s) for s in g.sets]),
                pack_ints([x for s in g.sets for x in s]),
            ]
        )
    g = p.grammar
    return b"".join(
        [
            struct.pack("<BQ", 0, g.terminal_limit),
            pack_ints(np.asarray(g.rules, dtype=np.int64).ravel()),
            pack_ints(g.sequence),
            pack_ints(g.parts),
            pack_ints(g.rule_counts),
        ]
    )


def _freqs_body(freqs: tuple[FreqEncoding, ...]) -> bytes:
    return b"".join(
        [
            pack_ints([e.runs for e in freqs]),
            pack_ints([x for e in freqs for x in e.run_lengths]),
            pack_ints([x for e in freqs for x in e.heads]),
        ]
    )


def encode_sections(bundle: IndexBundle) -> list[tuple[str, str, bytes]]:
    """(tag, key, body) for everything the bundle carries, in file order."""
    c, idx = bundle.collection, bundle.idx
    meta = dict(bundle.meta)
    meta.update(n=c.n, d=c.d, structures=list(bundle.structures))
    if bundle.pdl is not None:
        p = bundle.pdl
        meta["pdl"] = {"b": p.b, "beta": p.beta, "mode": p.mode, "compressor": p.compressor}
    sections = [
        ("META", "", json.dumps(meta, sort_keys=True).encode("utf-8")),
        ("TEXT", "", c.text),
        ("BITS", "", pack_ints(c.B.bits.astype(np.int64))),
    ]
    for tag, name in ARRAY_TAGS.items():
        array = getattr(idx, name)
        if array is not None:
            sections.append((tag, "", pack_ints(array)))
    if idx.ilcp_runs is not None:
        runs = idx.ilcp_runs
        sections.append(("RUNS", "", pack_ints(runs.starts) + pack_ints(runs.lengths) + pack_ints(runs.values)))
    for key in sorted(idx.rmqs):
        shared = rmq_source(idx, key) is not None
        sections.append(("RMQ ", key, _rmq_body(idx.rmqs[key], shared)))
    if bundle.pdl is not None:
        p = bundle.pdl
        sections.append(("PDLB", "", pack_ints(p.block_starts)))
        sections.append(("PDLN", "", pack_ints(p.node_left) + pack_ints(p.node_right) + pack_ints(p.node_part)))
        if p.grammar is not None or p.set_grammar is not None:
            sections.append(("PDLS", "", _grammar_body(p)))
        if p.freqs is not None:
            sections.append(("PDLF", "", _freqs_body(p.freqs)))
    return sections


def _section_info(tag: str, key: str, body: bytes) -> SectionInfo:
    if tag in ("META", "TEXT"):
        return SectionInfo(tag, key, len(body), 8 * len(body))
    reader = _Reader(body, tag)
    _parse_body(tag, reader)
    return SectionInfo(tag, key, len(body), reader.payload_bits)


def section_table(bundle: IndexBundle) -> list[SectionInfo]:
    return [_section_info(tag, key, body) for tag, key, body in encode_sections(bundle)]


def write_index(path: Path, bundle: IndexBundle) -> list[SectionInfo]:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sections = encode_sections(bundle)
    chunks = [_HEADER.pack(MAGIC, FORMAT_VERSION, len(sections))]
    for tag, key, body in sections:
        encoded_key = key.encode("ascii")
        chunks.append(tag.encode("ascii") + struct.pack("<B", len(encoded_key)) + encoded_key)
        chunks.append(struct.pack("<Q", len(body)))
        chunks.append(body)
    path.write_bytes(b"".join(chunks))
    bundle.sections = [_section_info(tag, key, body) for tag, key, body in sections]
    return bundle.sections


def _parse_body(tag: str, reader: _Reader):
    if tag in ARRAY_TAGS or tag in ("BITS", "PDLB"):
        value = reader.ints()
    elif tag == "RUNS":
        value = IlcpRuns(starts=reader.ints(), lengths=reader.ints(), values=reader.ints())
    elif tag == "RMQ ":
        block, levels, has_values = reader.unpack("<IBB")
        values = reader.ints() if has_values else None
        value = (block, tuple(reader.ints() for _ in range(levels)), values)
    elif tag == "PDLN":
        value = (reader.ints(), reader.ints(), reader.ints())
    elif tag == "PDLS":
        kind, terminal_limit = reader.unpack("<BQ")
        rules = tuple(tuple(int(x) for x in pair) for pair in reader.ints().reshape(-1, 2))
        if kind == 1:
            lengths = reader.ints().tolist()
            members = reader.ints().tolist()
            offsets = np.concatenate(([0], np.cumsum(lengths, dtype=np.int64))).tolist()
            sets = tuple(tuple(members[offsets[i] : offsets[i + 1]]) for i in range(len(lengths)))
            value = SetGrammar(terminal_limit=terminal_limit, rules=rules, sets=sets)
        elif kind == 0:
            value = Grammar(
                terminal_limit=terminal_limit,
                rules=rules,
                sequence=tuple(reader.ints().tolist()),
                parts=tuple(reader.ints().tolist()),
                rule_counts=tuple(reader.ints().tolist()),
            )
        else:
            raise FormatError(f"Unknown grammar kind {kind} in PDLS section.")
    elif tag == "PDLF":
        runs = reader.ints().tolist()
        lengths = reader.ints().tolist()
        heads = reader.ints().tolist()
        value, offset = [], 0
        for r in runs:
            value.append(FreqEncoding(run_lengths=tuple(lengths[offset : offset + r]), heads=tuple(heads[offset : offset + r])))
            offset += r
        value = tuple(value)
    else:
        raise FormatError(f"Unknown section tag {tag!r}.")
    reader.finish()
    return value


def _split_sections(data: bytes, path: Path) -> list[tuple[str, str, bytes]]:
    reader = _Reader(data, "header")
    magic, version, count = reader.unpack(_HEADER.format)
    if magic != MAGIC:
        raise FormatError(f"{path} is not a .dgx index (bad magic {magic!r}).")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path} has format version {version}; this build reads version {FORMAT_VERSION}.")
    sections = []
    for _ in range(count):
        tag = reader.take(4).decode("ascii", errors="replace")
        (key_length,) = reader.unpack("<B")
        key = reader.take(key_length).decode("ascii", errors="replace")
        (size,) = reader.unpack("<Q")
        sections.append((tag, key, reader.take(size)))
    reader.finish()
    return sections


def read_index(path: Path) -> IndexBundle:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"Index file not found: {path}")
    sections = _split_sections(path.read_bytes(), path)
    bodies = {(tag, key): body for tag, key, body in sections}
    for required in ("META", "TEXT", "SA  "):
        if (required, "") not in bodies:
            raise FormatError(f"{path} has no {required.strip()} section.")
    try:
        meta = json.loads(bodies[("META", "")].decode("utf-8"))
    except ValueError as exc:
        raise FormatError(f"Unreadable META section in {path}: {exc}") from exc

    parsed = {}
    infos = []
    for tag, key, body in sections:
        if tag in ("META", "TEXT"):
            infos.append(SectionInfo(tag, key, len(body), 8 * len(body)))
            continue
        reader = _Reader(body, tag)
        parsed[(tag, key)] = _parse_body(tag, reader)
        infos.append(SectionInfo(tag, key, len(body), reader.payload_bits))

    collection = collection_from_text(bodies[("TEXT", "")])
    bits = parsed.get(("BITS", ""))
    if bits is not None and not np.array_equal(bits.astype(bool), collection.B.bits):
        raise FormatError(f"BITS section of {path} disagrees with the stored text.")

    idx = SuffixIndex(sa=parsed[("SA  ", "")])
    if idx.n != collection.n:
        raise FormatError(f"SA section of {path} has {idx.n} entries, text has {collection.n}.")
    for tag, name in ARRAY_TAGS.items():
        if tag != "SA  " and (tag, "") in parsed:
            setattr(idx, name, parsed[(tag, "")])
    idx.ilcp_runs = parsed.get(("RUNS", ""))
    for (tag, key), value in parsed.items():
        if tag != "RMQ ":
            continue
        block, table, values = value
        if values is None:
            values = rmq_source(idx, key)
        if values is None:
            raise FormatError(f"RMQ:{key} section of {path} has no values to answer from.")
        idx.rmqs[key] = RmqIndex(values=np.asarray(values, dtype=np.int64), block=block, table=table)

    pdl = None
    if "pdl" in meta:
        if ("PDLB", "") not in parsed or ("PDLN", "") not in parsed:
            raise FormatError(f"{path} declares a PDL index but lacks its block or node sections.")
        params = meta["pdl"]
        left, right, part = parsed[("PDLN", "")]
        grammar = parsed.get(("PDLS", ""))
        pdl = PdlIndex(
            b=params["b"],
            beta=params["beta"],
            mode=params["mode"],
            compressor=params["compressor"],
            n=collection.n,
            d=collection.d,
            block_starts=parsed[("PDLB", "")],
            node_left=left,
            node_right=right,
            node_part=part,
            grammar=grammar if isinstance(grammar, Grammar) else None,
            set_grammar=grammar if isinstance(grammar, SetGrammar) else None,
            freqs=parsed.get(("PDLF", "")),
        )
    return IndexBundle(
        collection=collection,
        idx=idx,
        structures=tuple(meta.get("structures", ())),
        pdl=pdl,
        meta=meta,
        sections=infos,
    )
