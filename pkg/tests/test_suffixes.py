import numpy as np
import pytest

from docret_cli.corpus import build_collection
from docret_cli.errors import ContractViolation, ForbiddenByte, OutOfBounds
from docret_cli.suffixes import (
    SuffixIndex,
    build_c,
    build_sa,
    build_suffix_index,
    find,
    locate,
    suffix_array,
)

from conftest import all_patterns, random_docs


def _oracle_sa(text: bytes) -> list[int]:
    return sorted(range(1, len(text) + 1), key=lambda i: text[i - 1 :])


def _oracle_lcp(text: bytes, sa) -> list[int]:
    out = [0]
    for prev, cur in zip(sa, sa[1:]):
        a, b = text[prev - 1 :], text[cur - 1 :]
        h = 0
        while h < min(len(a), len(b)) and a[h] == b[h]:
            h += 1
        out.append(h)
    return out


def test_e1_suffix_array(e1, e1_index):
    assert e1_index.sa.tolist() == [10, 4, 7, 9, 3, 5, 1, 6, 8, 2]
    assert e1_index.sa.tolist() == _oracle_sa(e1.text)


def test_e1_document_array(e1_index):
    assert e1_index.da.tolist() == [3, 1, 2, 3, 1, 2, 1, 2, 3, 1]


def test_e1_lcp_matches_pairwise_oracle(e1, e1_index):
    # ranks 4 and 5 hold "A\0" and "A\0AB\0BA\0", which share two bytes
    assert e1_index.lcp.tolist() == [0, 1, 1, 0, 2, 1, 2, 0, 1, 3]
    assert e1_index.lcp.tolist() == _oracle_lcp(e1.text, e1_index.sa.tolist())


def test_small_lcp_examples():
    assert build_suffix_index(build_collection([b""]), arrays=("lcp",)).lcp.tolist() == [0]
    assert build_suffix_index(build_collection([b"AA"]), arrays=("lcp",)).lcp.tolist() == [0, 0, 1]


def test_e1_ilcp_and_runs(e1_index):
    assert e1_index.ilcp.tolist() == [0, 0, 0, 0, 0, 0, 1, 0, 0, 0]
    assert e1_index.ilcp_runs.triples() == [(1, 6, 0), (7, 1, 1), (8, 3, 0)]
    assert e1_index.ilcp_runs.expand().tolist() == e1_index.ilcp.tolist()


def test_single_document_ilcp_equals_lcp():
    c = build_collection([b"GATTACAGATTACA"])
    idx = build_suffix_index(c)
    assert idx.ilcp.tolist() == idx.lcp.tolist()


def test_e1_c_array(e1_index):
    assert e1_index.c.tolist() == [0, 0, 0, 1, 2, 3, 5, 6, 4, 7]


def test_c_array_edge_cases():
    assert build_c(np.array([1])).tolist() == [0]
    assert build_c(np.array([2, 2, 2])).tolist() == [0, 1, 2]


def test_find_and_locate(e1, e1_index):
    assert find(e1_index, e1, b"A") == (4, 7)
    assert locate(e1_index, 4, 7).tolist() == [9, 3, 5, 1]
    assert find(e1_index, e1, b"AB") == (6, 7)
    assert find(e1_index, e1, b"BA") == (9, 10)
    assert find(e1_index, e1, b"ABA") == (7, 7)


def test_find_absent_and_empty_patterns(e1, e1_index):
    assert find(e1_index, e1, b"C") is None
    assert find(e1_index, e1, b"ABAB") is None
    assert find(e1_index, e1, b"") == (1, 10)


def test_find_rejects_terminator(e1, e1_index):
    with pytest.raises(ForbiddenByte):
        find(e1_index, e1, b"A\x00")


def test_locate_out_of_bounds(e1_index):
    with pytest.raises(OutOfBounds):
        locate(e1_index, 3, 11)
    with pytest.raises(OutOfBounds):
        locate(e1_index, 5, 4)


def test_require_missing_array(e1):
    idx = SuffixIndex(sa=build_sa(e1))
    with pytest.raises(ContractViolation):
        idx.require("da")


def test_suffix_array_of_repetitive_bytes():
    data = np.frombuffer(b"AAAAAAAA", dtype=np.uint8)
    assert suffix_array(data).tolist() == [7, 6, 5, 4, 3, 2, 1, 0]


def test_random_collections_match_oracles(random_collections):
    for docs in random_collections:
        c = build_collection(docs)
        idx = build_suffix_index(c)
        assert idx.sa.tolist() == _oracle_sa(c.text)
        assert idx.lcp.tolist() == _oracle_lcp(c.text, idx.sa.tolist())
        assert idx.da.tolist() == [c.B.rank1(int(p)) for p in idx.sa]
        for pattern in all_patterns(docs, 3):
            sp, ep = find(idx, c, pattern)
            positions = sorted(locate(idx, sp, ep).tolist())
            expected = [i + 1 for i in range(c.n) if c.text[i : i + len(pattern)] == pattern]
            assert positions == expected


def test_ilcp_marks_first_occurrences(random_collections):
    for docs in random_collections:
        c = build_collection(docs)
        idx = build_suffix_index(c)
        for pattern in all_patterns(docs, 4):
            sp, ep = find(idx, c, pattern)
            seen = set()
            for i in range(sp, ep + 1):
                doc = int(idx.da[i - 1])
                assert (idx.ilcp[i - 1] < len(pattern)) == (doc not in seen)
                seen.add(doc)


def test_copies_share_ilcp_values():
    rng = np.random.default_rng(5)
    doc = random_docs(rng, max_docs=1, max_length=20)[0] or b"ACGT"
    single = build_suffix_index(build_collection([doc]))
    copies = build_suffix_index(build_collection([doc] * 4))
    assert sorted(set(copies.ilcp.tolist())) == sorted(set(single.lcp.tolist()))
