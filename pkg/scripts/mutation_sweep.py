"""Stored-set size of a listing PDL index across mutation rates.

Generates one Version collection per rate with the same seed, builds a PDL
index for each and prints the compressed size of the stored sets. Less
mutation means more repetition, so the size should shrink as the rate drops.

Example:
    python mutation_sweep.py --workdir ./sweep --bases 10 --variants 100 --length 1000 --seed 42
"""
from __future__ import annotations

import argparse
import subprocess
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path

from docret_cli.storage import read_index

RATES = (0.1, 0.03, 0.01, 0.003, 0.001)


def _gen_command(args: argparse.Namespace, rate: float, out: Path) -> list[str]:
    return [
        "docret",
        "gen",
        "--kind",
        "version",
        "--bases",
        str(args.bases),
        "--variants",
        str(args.variants),
        "--length",
        str(args.length),
        "--rate",
        str(rate),
        "--seed",
        str(args.seed),
        "--out",
        str(out),
    ]


def _build_command(args: argparse.Namespace, docs: Path, out: Path) -> list[str]:
    return [
        "docret",
        "build",
        "--input",
        str(docs),
        "--out",
        str(out),
        "--structures",
        "pdl",
        "--pdl-b",
        str(args.block_size),
        "--pdl-beta",
        str(args.beta),
    ]


def _run(cmd: list[str]) -> None:
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"{' '.join(cmd)} failed ({proc.returncode}):\n{proc.stderr}")


def _sweep_one(args: argparse.Namespace, rate: float) -> tuple[float, int, int]:
    docs = args.workdir / f"version_{rate:g}.docs"
    index = args.workdir / f"version_{rate:g}.dgx"
    _run(_gen_command(args, rate, docs))
    _run(_build_command(args, docs, index))
    pdl = read_index(index).pdl
    return rate, pdl.node_count, pdl.stored_size()


def main() -> None:
    parser = argparse.ArgumentParser(description="PDL stored-set size across mutation rates.")
    parser.add_argument("--workdir", type=Path, default=Path("sweep"), help="Directory for collections and indexes")
    parser.add_argument("--bases", type=int, default=10)
    parser.add_argument("--variants", type=int, default=100)
    parser.add_argument("--length", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--block-size", type=int, default=64, help="PDL block size (default: 64)")
    parser.add_argument("--beta", type=float, default=1, help="PDL storing factor (default: 1)")
    parser.add_argument("--max-workers", type=int, default=2, help="Rates processed in parallel (default: 2)")
    args = parser.parse_args()
    args.workdir.mkdir(parents=True, exist_ok=True)

    print(f"Sweeping {len(RATES)} mutation rates with up to {args.max_workers} workers...")
    results = []
    with ThreadPoolExecutor(max_workers=args.max_workers) as executor:
        futures = [executor.submit(_sweep_one, args, rate) for rate in RATES]
        for future in as_completed(futures):
            results.append(future.result())

    print("rate\tstored_nodes\tstored_symbols")
    for rate, nodes, size in sorted(results, reverse=True):
        print(f"{rate:g}\t{nodes}\t{size}")


if __name__ == "__main__":
    main()
