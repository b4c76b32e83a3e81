import numpy as np
import pytest

from docret_cli.corpus import build_collection
from docret_cli.doclist import (
    ListResult,
    Scratch,
    TopkHit,
    canonical_topk,
    count_freqs,
    list_brute_d,
    list_brute_l,
    list_ilcp_d,
    list_ilcp_l,
    list_ilcp_runs,
    list_mut,
    list_sada_d,
    list_sada_l,
    topk_brute_d,
    topk_brute_l,
)
from docret_cli.errors import ContractViolation, OutOfBounds
from docret_cli.suffixes import find

from conftest import all_patterns, full_index, naive_listing, naive_topk


def _all_listings(idx, c, sp, ep, m):
    return {
        "brute-l": list_brute_l(idx, c, sp, ep),
        "brute-d": list_brute_d(idx, sp, ep),
        "mut": list_mut(idx, sp, ep),
        "sada-d": list_sada_d(idx, sp, ep),
        "sada-l": list_sada_l(idx, c, sp, ep),
        "ilcp-d": list_ilcp_d(idx, sp, ep, m),
        "ilcp-l": list_ilcp_l(idx, c, sp, ep, m),
        "ilcp-runs": list_ilcp_runs(idx, sp, ep, m),
    }


def test_e1_all_listings_of_a(e1, e1_index):
    for name, result in _all_listings(e1_index, e1, 4, 7, 1).items():
        assert result == ListResult(docs=(1, 2, 3), occ=4), name
        assert result.docc == 3


def test_e1_listing_of_ab(e1, e1_index):
    for name, result in _all_listings(e1_index, e1, 6, 7, 2).items():
        assert result.docs == (1, 2), name


def test_mut_trace_on_e1(e1_index):
    result = list_mut(e1_index, 4, 7)
    assert result.docs == (1, 2, 3)
    assert result.probes == 4


def test_brute_d_single_rank(e1_index):
    assert list_brute_d(e1_index, 2, 2).docs == (1,)


def test_probes_do_not_affect_equality():
    assert ListResult(docs=(1,), occ=1, probes=5) == ListResult(docs=(1,), occ=1, probes=0)


def test_probes_are_output_sensitive(random_collections):
    for docs in random_collections:
        c = build_collection(docs)
        idx = full_index(c)
        for pattern in all_patterns(docs, 3):
            sp, ep = find(idx, c, pattern)
            for result in (
                list_mut(idx, sp, ep),
                list_sada_d(idx, sp, ep),
                list_ilcp_d(idx, sp, ep, len(pattern)),
            ):
                assert result.probes <= 2 * result.docc + 1


def test_ilcp_rejects_zero_length(e1_index):
    with pytest.raises(ContractViolation):
        list_ilcp_d(e1_index, 4, 7, 0)
    with pytest.raises(ContractViolation):
        list_ilcp_runs(e1_index, 4, 7, 0)


def test_out_of_bounds_ranges(e1, e1_index):
    with pytest.raises(OutOfBounds):
        list_brute_d(e1_index, 0, 3)
    with pytest.raises(OutOfBounds):
        list_sada_l(e1_index, e1, 8, 11)
    with pytest.raises(OutOfBounds):
        list_mut(e1_index, 5, 4)


def test_count_freqs_and_topk_on_e1(e1, e1_index):
    assert count_freqs(e1_index, 4, 7) == {1: 2, 2: 1, 3: 1}
    assert topk_brute_d(e1_index, 4, 7, 2) == [TopkHit(1, 2), TopkHit(2, 1)]
    assert topk_brute_l(e1_index, e1, 4, 7, 10) == [TopkHit(1, 2), TopkHit(2, 1), TopkHit(3, 1)]
    assert topk_brute_d(e1_index, 7, 7, 1) == [TopkHit(1, 1)]


def test_canonical_topk_orders_ties_by_id():
    hits = canonical_topk(np.array([5, 2, 9, 4]), np.array([1, 3, 3, 1]), 3)
    assert hits == [TopkHit(2, 3), TopkHit(9, 3), TopkHit(4, 1)]
    with pytest.raises(ContractViolation):
        canonical_topk(np.array([1]), np.array([1]), 0)


def test_scratch_resets_between_queries():
    scratch = Scratch(4)
    scratch.begin()
    assert scratch.mark(2)
    assert not scratch.mark(2)
    scratch.add(3, 5)
    scratch.add(3, 1)
    assert scratch.freq[3] == 6
    assert scratch.touched == [2, 3]
    scratch.begin()
    assert scratch.mark(2)
    scratch.add(3, 2)
    assert scratch.freq[3] == 2


def test_sadakane_reuses_caller_scratch(e1, e1_index):
    scratch = Scratch(e1.d)
    first = list_sada_d(e1_index, 4, 7, scratch)
    second = list_sada_l(e1_index, e1, 4, 7, scratch)
    assert first.docs == second.docs == (1, 2, 3)


def test_random_listing_equivalence(random_collections):
    for docs in random_collections:
        c = build_collection(docs)
        idx = full_index(c)
        for pattern in all_patterns(docs, 4):
            sp, ep = find(idx, c, pattern)
            expected = tuple(naive_listing(docs, pattern))
            for name, result in _all_listings(idx, c, sp, ep, len(pattern)).items():
                assert result.docs == expected, (name, pattern)


@pytest.mark.parametrize("k", [1, 3, 10])
def test_random_topk_equivalence(random_collections, k):
    for docs in random_collections:
        c = build_collection(docs)
        idx = full_index(c)
        for pattern in all_patterns(docs, 4):
            sp, ep = find(idx, c, pattern)
            expected = [TopkHit(g, f) for g, f in naive_topk(docs, pattern, k)]
            assert topk_brute_d(idx, sp, ep, k) == expected
            assert topk_brute_l(idx, c, sp, ep, k) == expected


@pytest.mark.slow
def test_listing_and_topk_equivalence_on_wide_collections(wide_random_collections):
    for docs in wide_random_collections:
        c = build_collection(docs)
        idx = full_index(c)
        for pattern in all_patterns(docs, 4):
            sp, ep = find(idx, c, pattern)
            expected = tuple(naive_listing(docs, pattern))
            for name, result in _all_listings(idx, c, sp, ep, len(pattern)).items():
                assert result.docs == expected, (name, pattern)
            for k in (1, 3, 10):
                hits = [TopkHit(g, f) for g, f in naive_topk(docs, pattern, k)]
                assert topk_brute_d(idx, sp, ep, k) == hits, (k, pattern)
                assert topk_brute_l(idx, c, sp, ep, k) == hits, (k, pattern)
