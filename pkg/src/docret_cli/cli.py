"""
CLI wiring for the document retrieval toolkit.

Index construction and query algorithms live in the library modules; this module only handles argument parsing and orchestration.
Results go to stdout, progress and the configuration echo go to stderr.
"""
from __future__ import annotations

import sys
import threading
import time
from collections.abc import Sequence
from contextlib import contextmanager
from itertools import cycle
from pathlib import Path

import fire

from .bench import (
    STATS_COLUMNS,
    answer_patterns,
    collection_stats,
    format_table,
    run_queries,
    write_report,
)
from .corpus import DOCS_SUFFIX, read_docs, write_docs
from .datagen import (
    DEFAULT_KEEP,
    DEFAULT_PATTERN_LENGTH,
    DEFAULT_SAMPLE_COUNT,
    GenSpec,
    gen_patterns_substr,
    generate,
    read_patterns,
    write_patterns,
)
from .doclist import ListResult
from .errors import EXIT_USAGE, DocretError, InvalidParams
from .pdl import DEFAULT_BLOCK_SIZE, DEFAULT_STORING_FACTOR
from .rmq import DEFAULT_RMQ_BLOCK
from .storage import INDEX_SUFFIX, read_index, write_index
from .structures import build_bundle, get_structure
from .suffixes import build_suffix_index

__all__ = ["Docret", "main", "run"]


@contextmanager
def _spinner(message: str, interval: float = 0.1):
    """Display a lightweight rotating spinner on stderr while work is running."""
    stream = sys.stderr
    animate = stream.isatty()
    stop_event = threading.Event()
    spinner = cycle("|/-\\")

    def spin() -> None:
        while not stop_event.is_set():
            stream.write(f"\r{message} {next(spinner)}")
            stream.flush()
            time.sleep(interval)

    thread = threading.Thread(target=spin, daemon=True)
    if animate:
        stream.write(f"{message} ")
        stream.flush()
        thread.start()
    try:
        yield
    finally:
        if animate:
            stop_event.set()
            thread.join()
            stream.write("\r" + " " * (len(message) + 2) + "\r")
            stream.flush()
        print(f"{message} done.", file=stream)


def _parse_items(raw: str | Sequence[str] | None) -> list[str]:
    """Comma-separated strings or tuples (fire turns `a,b` into a tuple) to a flat list."""
    if raw is None:
        return []
    if isinstance(raw, str):
        return [part.strip() for part in raw.split(",") if part.strip()]
    parts: list[str] = []
    for item in raw:
        parts.extend([part.strip() for part in str(item).split(",") if part.strip()])
    return parts


def _echo_config(command: str, **params) -> None:
    print(f"command={command}", file=sys.stderr)
    for key, value in params.items():
        print(f"{key}={value}", file=sys.stderr)


def _show(pattern: bytes, hex: bool) -> str:
    return pattern.hex() if hex else pattern.decode("utf-8", errors="backslashreplace")


def _format_answer(answer) -> str:
    if isinstance(answer, ListResult):
        return ",".join(str(g) for g in answer.docs)
    return ",".join(f"{hit.doc}:{hit.freq if hit.freq is not None else '-'}" for hit in answer)


class Docret:
    def gen(
        self,
        kind: str,
        out: str,
        bases: int = 1,
        variants: int = 10,
        length: int = 1000,
        rate: float = 0.01,
        seed: int = 0,
        source: str | None = None,
    ) -> None:
        """
        Generate a synthetic repetitive collection (dna, concat or version).

        Example: docret gen --kind version --bases 10 --variants 100 --length 1000 --rate 0.01 --seed 42 --out v.docs
        """
        _echo_config("gen", kind=kind, out=out, bases=bases, variants=variants, length=length, rate=rate, seed=seed, source=source)
        spec = GenSpec(
            kind=str(kind).lower(),
            base_count=int(bases),
            variants_per_base=int(variants),
            base_length=int(length),
            mutation_rate=float(rate),
            seed=int(seed),
            source=Path(source).read_bytes() if source else None,
        )
        with _spinner("Generating collection..."):
            collection = generate(spec)
            path = write_docs(Path(out), collection)
        print(f"Wrote {collection.d} documents ({collection.n} bytes) to {path}", file=sys.stderr)

    def build(
        self,
        input: str,
        out: str | None = None,
        structures: str | Sequence[str] = "brute-d",
        pdl_b: int = DEFAULT_BLOCK_SIZE,
        pdl_beta: float = DEFAULT_STORING_FACTOR,
        pdl_mode: str = "list",
        pdl_compressor: str = "repair",
        rmq_block: int = DEFAULT_RMQ_BLOCK,
    ) -> None:
        """
        Build the requested structures over a .docs file (or a directory of documents) into a .dgx index.

        Example: docret build --input v.docs --out v.dgx --structures brute-d,sada-d,pdl --pdl-b 256 --pdl-beta 16
        """
        names = _parse_items(structures)
        if not names:
            raise InvalidParams("--structures must name at least one structure.")
        out_path = Path(out) if out else Path(input).with_suffix(INDEX_SUFFIX)
        _echo_config(
            "build",
            input=input,
            out=out_path,
            structures=",".join(names),
            pdl_b=pdl_b,
            pdl_beta=pdl_beta,
            pdl_mode=pdl_mode,
            pdl_compressor=pdl_compressor,
            rmq_block=rmq_block,
        )
        with _spinner("Building index..."):
            collection = read_docs(Path(input))
            bundle = build_bundle(
                collection,
                names,
                pdl_b=pdl_b,
                pdl_beta=pdl_beta,
                pdl_mode=pdl_mode,
                pdl_compressor=pdl_compressor,
                rmq_block=rmq_block,
            )
            sections = write_index(out_path, bundle)
        rows = [{"section": s.label, "bytes": s.nbytes, "payload_bits": s.payload_bits} for s in sections]
        print(format_table(rows, ["section", "bytes", "payload_bits"]))
        print(f"Saved index to {out_path}", file=sys.stderr)

    def query(
        self,
        index: str,
        patterns: str,
        structure: str = "brute-d",
        mode: str = "list",
        k: int | None = None,
        hex: bool = False,
        workers: int = 1,
    ) -> None:
        """
        Answer every pattern in a file; one `PATTERN<TAB>results` line per pattern, in input order.

        Listing prints `1,2,3`; top-k prints `doc:freq` pairs by decreasing frequency.
        Example: docret query --index v.dgx --structure pdl --patterns p.txt --mode topk --k 10
        """
        _echo_config("query", index=index, patterns=patterns, structure=structure, mode=mode, k=k, hex=hex, workers=workers)
        get_structure(structure)
        bundle = read_index(Path(index))
        if structure not in bundle.structures:
            raise InvalidParams(
                f"Index {index} was not built with {structure!r}; it holds {', '.join(bundle.structures)}."
            )
        items = read_patterns(Path(patterns), hex=hex)
        answers = answer_patterns(bundle, structure, items, mode=mode, k=k, workers=workers)
        for pattern, answer in zip(items, answers):
            print(f"{_show(pattern, hex)}\t{_format_answer(answer)}")

    def bench(
        self,
        index: str,
        patterns: str,
        mode: str = "list",
        k: int | None = None,
        structures: str | Sequence[str] | None = None,
        csv: str | None = None,
        json: str | None = None,
        hex: bool = False,
        include_find: bool = False,
        workers: int = 1,
        seed: int | None = None,
        collection: str | None = None,
    ) -> None:
        """
        Time list/topk queries for every structure in the index (or --structures) and report sizes in bits per character.

        Example: docret bench --index v.dgx --patterns p.txt --mode list --csv results.csv
        """
        collection = collection or Path(index).stem
        _echo_config(
            "bench",
            index=index,
            patterns=patterns,
            mode=mode,
            k=k,
            structures=structures,
            csv=csv,
            json=json,
            hex=hex,
            include_find=include_find,
            workers=workers,
            seed=seed,
            collection=collection,
        )
        if int(workers) > 1:
            print("note: --workers is ignored while timing; queries run single-threaded.", file=sys.stderr)
        bundle = read_index(Path(index))
        names = _parse_items(structures) or list(bundle.structures)
        for name in names:
            if name not in bundle.structures:
                raise InvalidParams(f"Index {index} was not built with {name!r}.")
        if mode == "topk":
            skipped = [name for name in names if get_structure(name).topk is None]
            for name in skipped:
                print(f"note: skipping {name}, it answers listing only.", file=sys.stderr)
            names = [name for name in names if name not in skipped]
            if not names:
                raise InvalidParams("None of the selected structures supports top-k.")
        items = read_patterns(Path(patterns), hex=hex)
        rows = []
        with _spinner("Running queries..."):
            for name in names:
                rows.append(
                    run_queries(bundle, name, items, mode=mode, k=k, collection=collection, seed=seed, include_find=include_find)
                )
        df = write_report(rows, csv=Path(csv) if csv else None, json=Path(json) if json else None)
        records = df.astype(object).where(df.notna(), None).to_dict("records")
        print(format_table(records, list(df.columns)))
        for path in (csv, json):
            if path:
                print(f"Saved report to {path}", file=sys.stderr)

    def stats(self, input: str, patterns: str | None = None, hex: bool = False) -> None:
        """
        Print collection statistics: size, documents, average document length and pattern occ/docc.

        Example: docret stats --input v.docs --patterns p.txt
        """
        _echo_config("stats", input=input, patterns=patterns, hex=hex)
        collection = read_docs(Path(input))
        items = read_patterns(Path(patterns), hex=hex) if patterns else []
        idx = build_suffix_index(collection, arrays=("da",)) if items else None
        name = Path(input).name
        if name.endswith(DOCS_SUFFIX):
            name = name[: -len(DOCS_SUFFIX)]
        row = collection_stats(collection, idx, items, collection=name)
        print(format_table([row], STATS_COLUMNS))

    def patterns(
        self,
        input: str,
        out: str,
        length: int = DEFAULT_PATTERN_LENGTH,
        samples: int = DEFAULT_SAMPLE_COUNT,
        keep: int = DEFAULT_KEEP,
        seed: int = 0,
        hex: bool = False,
    ) -> None:
        """
        Sample substrings of a collection and keep those with the largest occ/docc ratio.

        Example: docret patterns --input v.docs --length 7 --samples 100000 --keep 1000 --seed 1 --out p.txt
        """
        _echo_config("patterns", input=input, out=out, length=length, samples=samples, keep=keep, seed=seed, hex=hex)
        with _spinner("Sampling patterns..."):
            collection = read_docs(Path(input))
            idx = build_suffix_index(collection, arrays=("da",))
            found = gen_patterns_substr(collection, int(length), int(samples), int(keep), idx=idx, seed=int(seed))
            path = write_patterns(Path(out), found, hex=hex)
        print(f"Wrote {len(found)} patterns to {path}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command; returns 0, 1 for usage errors or 2 for data errors."""
    command = list(argv) if argv is not None else sys.argv[1:]
    try:
        fire.Fire(Docret, command=command)
    except DocretError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except fire.core.FireExit as exc:
        return EXIT_USAGE if exc.code else 0
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(f"error: {exc.code}", file=sys.stderr)
            return EXIT_USAGE
        return int(exc.code or 0)
    return 0


def run() -> None:
    """Entrypoint used by the console script."""
    sys.exit(main())


if __name__ == "__main__":
    run()
