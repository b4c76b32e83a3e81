"""Benchmark helpers: size accounting, timed query batches and collection statistics."""
from __future__ import annotations

import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

try:
    import pandas as pd
except ImportError:  # pragma: no cover - depends on runtime environment
    pd = None

from .corpus import Collection
from .doclist import ListResult, Scratch, TopkHit, count_freqs
from .errors import ContractViolation, InvalidParams
from .storage import IndexBundle, section_table
from .structures import get_structure, list_range, required_sections, topk_range
from .suffixes import SuffixIndex, find

QUERY_MODES = ("list", "topk")

REPORT_COLUMNS = [
    "collection",
    "structure",
    "params",
    "mode",
    "k",
    "size_bpc",
    "size_breakdown",
    "patterns",
    "total_time_s",
    "avg_occ",
    "avg_docc",
    "occ_docc_ratio",
    "seed",
]

STATS_COLUMNS = ["collection", "size_bytes", "d", "n_per_d", "patterns", "avg_occ", "avg_docc", "occ_docc_ratio"]


@dataclass(frozen=True)
class SizeReport:
    n: int
    # serialized bits per section label, and the packed payload bits inside them
    breakdown: dict[str, int]
    payload: dict[str, int]

    @property
    def total_bits(self) -> int:
        return sum(self.breakdown.values())

    @property
    def bpc(self) -> float:
        return self.total_bits / self.n

    def breakdown_text(self) -> str:
        return ";".join(f"{label}={bits}" for label, bits in self.breakdown.items())


@dataclass
class BenchRow:
    collection: str
    structure: str
    params: str
    mode: str
    k: int | None
    size_bpc: float
    size_breakdown: str
    patterns: int
    total_time_s: float
    avg_occ: float
    avg_docc: float
    occ_docc_ratio: float
    seed: int | None = None


def measure_size(bundle: IndexBundle, name: str) -> SizeReport:
    """Bits charged to structure `name`: the sections it reads at query time."""
    if not bundle.sections:
        bundle.sections = section_table(bundle)
    infos = required_sections(bundle, name)
    return SizeReport(
        n=bundle.collection.n,
        breakdown={info.label: info.bits for info in infos},
        payload={info.label: info.payload_bits for info in infos},
    )


def structure_params(bundle: IndexBundle, name: str) -> str:
    if name == "pdl" and bundle.pdl is not None:
        p = bundle.pdl
        return f"b={p.b};beta={p.beta:g};mode={p.mode};compressor={p.compressor}"
    if get_structure(name).rmqs:
        return f"rmq_block={bundle.meta.get('rmq_block', '')}"
    return ""


def _check_mode(mode: str, k: int | None) -> None:
    if mode not in QUERY_MODES:
        raise InvalidParams(f"Unknown query mode {mode!r}; expected list or topk.")
    if mode == "topk" and (k is None or k < 1):
        raise InvalidParams("--k must be a positive integer in topk mode.")


def find_ranges(bundle: IndexBundle, patterns: Sequence[bytes]) -> list[tuple[int, int] | None]:
    return [find(bundle.idx, bundle.collection, p) for p in patterns]


def answer_range(
    bundle: IndexBundle,
    name: str,
    span: tuple[int, int] | None,
    m: int,
    mode: str,
    k: int | None,
    scratch: Scratch | None,
) -> ListResult | list[TopkHit]:
    if span is None:
        return ListResult(docs=(), occ=0) if mode == "list" else []
    sp, ep = span
    if mode == "list":
        return list_range(bundle, name, sp, ep, m, scratch)
    return topk_range(bundle, name, sp, ep, k, scratch)


def _answer_chunk(bundle, name, patterns, mode, k):
    scratch = Scratch(bundle.collection.d)
    return [answer_range(bundle, name, find(bundle.idx, bundle.collection, p), len(p), mode, k, scratch) for p in patterns]


def answer_patterns(
    bundle: IndexBundle,
    name: str,
    patterns: Sequence[bytes],
    mode: str = "list",
    k: int | None = None,
    workers: int = 1,
) -> list[ListResult | list[TopkHit]]:
    """Answers in input order; each worker shard gets its own scratch."""
    _check_mode(mode, k)
    get_structure(name)
    workers = max(1, int(workers))
    if workers == 1 or len(patterns) < 2:
        return _answer_chunk(bundle, name, patterns, mode, k)
    size = -(-len(patterns) // workers)
    shards = [patterns[i : i + size] for i in range(0, len(patterns), size)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(_answer_chunk, bundle, name, shard, mode, k) for shard in shards]
        return [answer for future in futures for answer in future.result()]


def _occ_docc(span: tuple[int, int] | None, docc: int) -> tuple[int, int]:
    if span is None:
        return 0, 0
    return span[1] - span[0] + 1, docc


def _means(pairs: list[tuple[int, int]]) -> tuple[float, float, float]:
    if not pairs:
        return 0.0, 0.0, 1.0
    occ = sum(p[0] for p in pairs) / len(pairs)
    docc = sum(p[1] for p in pairs) / len(pairs)
    # no matches at all: ratio reported as 1.0
    ratio = occ / docc if docc else 1.0
    return occ, docc, ratio


def run_queries(
    bundle: IndexBundle,
    name: str,
    patterns: Sequence[bytes],
    mode: str = "list",
    k: int | None = None,
    collection: str = "",
    seed: int | None = None,
    include_find: bool = False,
) -> BenchRow:
    """Time list/topk over precomputed find ranges; find runs outside the clock unless asked."""
    if not patterns:
        raise ContractViolation("A benchmark needs at least one pattern.")
    _check_mode(mode, k)
    size = measure_size(bundle, name)
    scratch = Scratch(bundle.collection.d)
    lengths = [len(p) for p in patterns]

    if include_find:
        start = time.perf_counter()
        spans = find_ranges(bundle, patterns)
        answers = [answer_range(bundle, name, s, m, mode, k, scratch) for s, m in zip(spans, lengths)]
        elapsed = time.perf_counter() - start
    else:
        spans = find_ranges(bundle, patterns)
        start = time.perf_counter()
        answers = [answer_range(bundle, name, s, m, mode, k, scratch) for s, m in zip(spans, lengths)]
        elapsed = time.perf_counter() - start

    # docc counts distinct documents in the whole range, also in top-k mode
    if mode == "list":
        pairs = [_occ_docc(s, a.docc) for s, a in zip(spans, answers)]
    else:
        pairs = [_occ_docc(s, _range_docc(bundle, s)) for s in spans]
    avg_occ, avg_docc, ratio = _means(pairs)
    return BenchRow(
        collection=collection,
        structure=name,
        params=structure_params(bundle, name),
        mode=mode,
        k=k if mode == "topk" else None,
        size_bpc=size.bpc,
        size_breakdown=size.breakdown_text(),
        patterns=len(patterns),
        total_time_s=elapsed,
        avg_occ=avg_occ,
        avg_docc=avg_docc,
        occ_docc_ratio=ratio,
        seed=seed,
    )


def _range_docc(bundle: IndexBundle, span: tuple[int, int] | None) -> int:
    if span is None:
        return 0
    return get_structure("brute-l").lister(bundle, span[0], span[1], 0, None).docc


def collection_stats(
    c: Collection,
    idx: SuffixIndex | None = None,
    patterns: Sequence[bytes] = (),
    collection: str = "",
) -> dict:
    row = {
        "collection": collection,
        "size_bytes": c.n,
        "d": c.d,
        "n_per_d": c.n / c.d,
        "patterns": len(patterns),
        "avg_occ": None,
        "avg_docc": None,
        "occ_docc_ratio": None,
    }
    if patterns:
        if idx is None or idx.da is None:
            raise ContractViolation("Pattern statistics need a suffix index with DA.")
        pairs = []
        for p in patterns:
            span = find(idx, c, p)
            pairs.append(_occ_docc(span, len(count_freqs(idx, *span)) if span else 0))
        row["avg_occ"], row["avg_docc"], row["occ_docc_ratio"] = _means(pairs)
    return row


def _require_pandas() -> None:
    if pd is None:
        raise SystemExit("Missing dependency: pandas is required for benchmark reports.")


def report_frame(rows: Sequence[BenchRow]):
    _require_pandas()
    return pd.DataFrame([asdict(row) for row in rows], columns=REPORT_COLUMNS)


def write_report(rows: Sequence[BenchRow], csv: Path | None = None, json: Path | None = None):
    df = report_frame(rows)
    for path in (csv, json):
        if path is not None:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
    if csv is not None:
        df.to_csv(csv, index=False)
    if json is not None:
        df.to_json(json, orient="records", indent=2)
    return df


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def format_table(rows: list[dict], headers: list[str]) -> str:
    cells = [[_cell(row.get(h)) for h in headers] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def fmt(row: list[str]) -> str:
        return " | ".join(cell.ljust(widths[i]) for i, cell in enumerate(row))

    separator = "-+-".join("-" * w for w in widths)
    return "\n".join([fmt(headers), separator, *(fmt(row) for row in cells)])
