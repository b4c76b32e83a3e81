from pathlib import Path

import numpy as np
import pytest

from docret_cli.corpus import build_collection, write_docs
from docret_cli.suffixes import build_suffix_index
from docret_cli.rmq import build_rmq

E1_DOCS = [b"ABA", b"AB", b"BA"]


def naive_listing(docs, pattern):
    return [g for g, doc in enumerate(docs, start=1) if pattern in doc]


def naive_counts(docs, pattern):
    """Overlapping occurrence counts per document id."""
    counts = {}
    for g, doc in enumerate(docs, start=1):
        count, start = 0, doc.find(pattern)
        while start != -1:
            count += 1
            start = doc.find(pattern, start + 1)
        if count:
            counts[g] = count
    return counts


def naive_topk(docs, pattern, k):
    counts = naive_counts(docs, pattern)
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ordered[:k]


def all_patterns(docs, max_length=4):
    found = set()
    for doc in docs:
        for length in range(1, max_length + 1):
            for i in range(len(doc) - length + 1):
                found.add(doc[i : i + length])
    return sorted(found)


def random_docs(rng, max_docs=6, max_length=12, alphabet=b"ACGT"):
    symbols = np.frombuffer(alphabet, dtype=np.uint8)
    d = int(rng.integers(1, max_docs + 1))
    return [rng.choice(symbols, size=int(rng.integers(0, max_length + 1))).astype(np.uint8).tobytes() for _ in range(d)]


def full_index(c, rmq_block=4):
    idx = build_suffix_index(c)
    idx.rmqs["C"] = build_rmq(idx.c, block=rmq_block)
    idx.rmqs["ILCP"] = build_rmq(idx.ilcp, block=rmq_block)
    idx.rmqs["RUNS"] = build_rmq(idx.ilcp_runs.values, block=rmq_block)
    return idx


@pytest.fixture
def e1():
    return build_collection(E1_DOCS)


@pytest.fixture
def e1_index(e1):
    return full_index(e1)


@pytest.fixture
def e1_docs_file(tmp_path, e1) -> Path:
    return write_docs(tmp_path / "e1.docs", e1)


@pytest.fixture
def random_collections():
    """Fixed-seed small collections over a 4-letter alphabet."""
    rng = np.random.default_rng(20240611)
    return [random_docs(rng) for _ in range(12)]


@pytest.fixture(scope="session")
def wide_random_collections():
    """500 fixed-seed collections of up to 16 documents of up to 32 symbols each."""
    rng = np.random.default_rng(20241019)
    return [random_docs(rng, max_docs=16, max_length=32) for _ in range(500)]
