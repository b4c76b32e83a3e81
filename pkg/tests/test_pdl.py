import numpy as np
import pytest

from docret_cli.corpus import build_collection
from docret_cli.datagen import GenSpec, gen_version
from docret_cli.doclist import TopkHit, count_freqs
from docret_cli.errors import InvalidParams, MissingFreqs, WrongMode
from docret_cli.grammar import decode_freqs
from docret_cli.pdl import build_pdl, lcp_intervals, pdl_list, pdl_topk
from docret_cli.suffixes import build_suffix_index, find

from conftest import all_patterns, naive_listing, naive_topk


def _oracle_nodes(c, idx):
    """Every rank range shared by two or more suffixes with a common prefix, plus the root."""
    text = c.text
    sa = idx.sa.tolist()
    nodes = {(1, c.n)}
    for length in range(1, c.n + 1):
        start = 0
        for i in range(1, c.n + 1):
            prefix = text[sa[start] - 1 : sa[start] - 1 + length]
            same = i < c.n and len(prefix) == length and text[sa[i] - 1 : sa[i] - 1 + length] == prefix
            if not same:
                if i - start >= 2 and len(prefix) == length:
                    nodes.add((start + 1, i))
                start = i
    return nodes


def _replay_stored(nodes, blocks, da, b, beta):
    """Storing-factor designation computed from the oracle tree, smallest nodes first."""
    candidates = sorted((nd for nd in nodes if nd[1] - nd[0] + 1 > b), key=lambda nd: nd[1] - nd[0])
    block_end = {start: end for start, end in blocks}
    frontier = {}
    stored = set()
    for l, r in candidates:
        total, pos = 0, l
        while pos <= r:
            inner = [nd for nd in frontier if nd[0] == pos and nd[1] <= r and nd != (l, r)]
            if inner:
                child = max(inner, key=lambda nd: nd[1])
                total += frontier[child]
                pos = child[1] + 1
            else:
                end = block_end[pos]
                total += len(set(da[pos - 1 : end]))
                pos = end + 1
        docs = len(set(da[l - 1 : r]))
        if beta == 0 or total >= beta * docs:
            stored.add((l, r))
            frontier[(l, r)] = docs
        else:
            frontier[(l, r)] = total
    return stored


def _index(docs):
    c = build_collection(docs)
    return c, build_suffix_index(c)


def test_lcp_intervals_match_oracle(random_collections):
    for docs in random_collections:
        c, idx = _index(docs)
        found = {(node.left, node.right) for node in lcp_intervals(idx.lcp)}
        assert found == _oracle_nodes(c, idx)


def test_e1_whole_tree_in_one_block(e1):
    idx = build_suffix_index(e1)
    p = build_pdl(idx, e1, b=10, beta=16)
    assert p.blocks() == [(1, 10)]
    assert p.node_count == 0
    assert pdl_list(p, idx, e1, 4, 7).docs == (1, 2, 3)


def test_e1_beta_zero_stores_every_node_above_blocks(e1):
    idx = build_suffix_index(e1)
    p = build_pdl(idx, e1, b=2, beta=0)
    expected = {nd for nd in _oracle_nodes(e1, idx) if nd[1] - nd[0] + 1 > 2}
    assert set(p.stored_ranges()) == expected
    assert set(p.stored_ranges()) == {(1, 3), (4, 7), (8, 10), (1, 10)}
    for node, (l, r) in enumerate(p.stored_ranges()):
        assert p.decode(node) == sorted(set(idx.da[l - 1 : r].tolist()))
    assert p.check_laminar()


def test_e1_exact_stored_range_needs_no_margins(e1):
    idx = build_suffix_index(e1)
    p = build_pdl(idx, e1, b=2, beta=0)
    covered, margins = p.decompose(4, 7)
    assert [p.stored_ranges()[node] for node in covered] == [(4, 7)]
    assert margins == []
    assert pdl_list(p, idx, e1, 4, 7).docs == (1, 2, 3)


def test_e1_beta_one_designation(e1):
    idx = build_suffix_index(e1)
    p = build_pdl(idx, e1, b=2, beta=1)
    replay = _replay_stored(_oracle_nodes(e1, idx), p.blocks(), idx.da.tolist(), 2, 1)
    assert set(p.stored_ranges()) == replay


def test_blocks_partition_and_respect_size(random_collections):
    for docs in random_collections:
        c, idx = _index(docs)
        oracle = _oracle_nodes(c, idx)
        for b in (2, 4, 8):
            p = build_pdl(idx, c, b=b, beta=1)
            blocks = p.blocks()
            assert blocks[0][0] == 1 and blocks[-1][1] == c.n
            assert all(prev[1] + 1 == cur[0] for prev, cur in zip(blocks, blocks[1:]))
            for l, r in blocks:
                assert r - l + 1 <= b or c.n <= b
                assert l == r or (l, r) in oracle
            for l, r in p.stored_ranges():
                assert r - l + 1 > b


@pytest.mark.parametrize("beta", [0, 1, 2, 4])
def test_designation_replays_storing_factor(random_collections, beta):
    for docs in random_collections:
        c, idx = _index(docs)
        for b in (2, 4):
            p = build_pdl(idx, c, b=b, beta=beta)
            replay = _replay_stored(_oracle_nodes(c, idx), p.blocks(), idx.da.tolist(), b, beta)
            assert set(p.stored_ranges()) == replay
            assert p.check_laminar()


@pytest.mark.parametrize("b", [2, 4, 8])
@pytest.mark.parametrize("beta", [0, 1, 2, 4])
def test_listing_equivalence(random_collections, b, beta):
    for docs in random_collections:
        c, idx = _index(docs)
        p = build_pdl(idx, c, b=b, beta=beta)
        for pattern in all_patterns(docs, 4):
            sp, ep = find(idx, c, pattern)
            assert pdl_list(p, idx, c, sp, ep).docs == tuple(naive_listing(docs, pattern))


def test_set_compressor_listing_equivalence(random_collections):
    for docs in random_collections:
        c, idx = _index(docs)
        p = build_pdl(idx, c, b=2, beta=0, compressor="set")
        assert p.set_grammar is not None or p.node_count == 0
        for pattern in all_patterns(docs, 3):
            sp, ep = find(idx, c, pattern)
            assert pdl_list(p, idx, c, sp, ep).docs == tuple(naive_listing(docs, pattern))


def test_listing_margins_without_document_array(random_collections):
    for docs in random_collections:
        c, idx = _index(docs)
        p = build_pdl(idx, c, b=2, beta=1)
        idx.da = None
        for pattern in all_patterns(docs, 3):
            sp, ep = find(idx, c, pattern)
            assert pdl_list(p, idx, c, sp, ep).docs == tuple(naive_listing(docs, pattern))


def test_e1_topk(e1):
    idx = build_suffix_index(e1)
    p = build_pdl(idx, e1, b=2, beta=0, mode="topk+f")
    assert pdl_topk(p, idx, e1, 4, 7, 2) == [TopkHit(1, 2), TopkHit(2, 1)]
    assert pdl_topk(p, idx, e1, 4, 7, 10) == [TopkHit(1, 2), TopkHit(2, 1), TopkHit(3, 1)]
    assert pdl_topk(p, idx, e1, 7, 7, 1) == [TopkHit(1, 1)]


def test_topk_prefix_without_frequencies(e1):
    idx = build_suffix_index(e1)
    p = build_pdl(idx, e1, b=2, beta=0, mode="topk")
    assert pdl_topk(p, idx, e1, 4, 7, 2) == [TopkHit(1, None), TopkHit(2, None)]


@pytest.mark.parametrize("k", [1, 3, 10])
@pytest.mark.parametrize("beta", [0, 2, 4])
def test_topk_equivalence(random_collections, k, beta):
    for docs in random_collections:
        c, idx = _index(docs)
        for b in (2, 4, 8):
            p = build_pdl(idx, c, b=b, beta=beta, mode="topk+f")
            for pattern in all_patterns(docs, 4):
                sp, ep = find(idx, c, pattern)
                expected = [TopkHit(g, f) for g, f in naive_topk(docs, pattern, k)]
                assert pdl_topk(p, idx, c, sp, ep, k) == expected


def test_stored_topk_sets_are_ordered_and_bounded(random_collections):
    for docs in random_collections:
        c, idx = _index(docs)
        p = build_pdl(idx, c, b=2, beta=0, mode="topk+f")
        for node, (l, r) in enumerate(p.stored_ranges()):
            ids = p.decode(node)
            freqs = decode_freqs(p.freqs[node])
            assert list(zip(ids, freqs)) == sorted(zip(ids, freqs), key=lambda hit: (-hit[1], hit[0]))
            assert dict(zip(ids, freqs)) == count_freqs(idx, l, r)
            runs = p.freqs[node].runs
            assert runs * (runs + 1) // 2 <= r - l + 1


def test_invalid_parameters(e1):
    idx = build_suffix_index(e1)
    with pytest.raises(InvalidParams):
        build_pdl(idx, e1, b=1, beta=0)
    with pytest.raises(InvalidParams):
        build_pdl(idx, e1, b=2, beta=0.5)
    with pytest.raises(InvalidParams):
        build_pdl(idx, e1, b=2, beta=0, mode="topk", compressor="set")
    with pytest.raises(InvalidParams):
        build_pdl(idx, e1, b=2, beta=0, mode="ranked")


def test_wrong_mode_and_missing_freqs(e1):
    idx = build_suffix_index(e1)
    listing = build_pdl(idx, e1, b=2, beta=0)
    with pytest.raises(WrongMode):
        pdl_topk(listing, idx, e1, 4, 7, 1)
    ranked = build_pdl(idx, e1, b=2, beta=2, mode="topk")
    with pytest.raises(WrongMode):
        pdl_list(ranked, idx, e1, 4, 7)
    with pytest.raises(MissingFreqs):
        pdl_topk(ranked, idx, e1, 4, 7, 1)


def test_identical_stored_sets_share_one_part():
    rng = np.random.default_rng(1)
    base = rng.choice(np.frombuffer(b"ACGT", dtype=np.uint8), size=40).tobytes()
    docs = [base] * 12
    c, idx = _index(docs)
    p = build_pdl(idx, c, b=4, beta=0)
    assert p.node_count > 1
    assert len(set(p.node_part.tolist())) == p.grammar.part_count < p.node_count
    for node, (l, r) in enumerate(p.stored_ranges()):
        assert p.decode(node) == sorted(set(idx.da[l - 1 : r].tolist()))
    assert p.stored_size() < sum(len(p.decode(node)) for node in range(p.node_count))


def test_shared_parts_keep_their_own_frequencies():
    c = gen_version(GenSpec("version", 1, 8, 60, 0.02, seed=3))
    idx = build_suffix_index(c)
    p = build_pdl(idx, c, b=2, beta=0, mode="topk+f")
    assert p.grammar.part_count < p.node_count
    for node, (l, r) in enumerate(p.stored_ranges()):
        assert dict(zip(p.decode(node), p.node_freqs(node))) == count_freqs(idx, l, r)


def test_less_mutation_means_smaller_stored_sets():
    sizes = {}
    for rate in (0.1, 0.001):
        c = gen_version(GenSpec("version", 1, 30, 300, rate, seed=42))
        idx = build_suffix_index(c, arrays=("da", "lcp"))
        sizes[rate] = build_pdl(idx, c, b=16, beta=1).stored_size()
    assert sizes[0.001] < sizes[0.1]


@pytest.mark.slow
def test_stored_sets_shrink_as_collections_get_more_repetitive():
    sizes = []
    for rate in (0.1, 0.03, 0.01, 0.003, 0.001):
        c = gen_version(GenSpec("version", 10, 100, 1000, rate, seed=42))
        idx = build_suffix_index(c, arrays=("da", "lcp"))
        sizes.append(build_pdl(idx, c, b=64, beta=1).stored_size())
    assert sizes[-1] < sizes[0]
    assert sum(later > earlier for earlier, later in zip(sizes, sizes[1:])) <= 1


@pytest.mark.slow
def test_listing_and_topk_equivalence_on_wide_collections(wide_random_collections):
    for docs in wide_random_collections:
        c, idx = _index(docs)
        patterns = all_patterns(docs, 4)
        ranges = [find(idx, c, pattern) for pattern in patterns]
        for b in (2, 4, 8):
            for beta in (0, 1, 2, 4):
                p = build_pdl(idx, c, b=b, beta=beta)
                for pattern, (sp, ep) in zip(patterns, ranges):
                    assert pdl_list(p, idx, c, sp, ep).docs == tuple(naive_listing(docs, pattern)), (b, beta)
            for beta in (0, 2, 4):
                p = build_pdl(idx, c, b=b, beta=beta, mode="topk+f")
                for pattern, (sp, ep) in zip(patterns, ranges):
                    for k in (1, 3, 10):
                        expected = [TopkHit(g, f) for g, f in naive_topk(docs, pattern, k)]
                        assert pdl_topk(p, idx, c, sp, ep, k) == expected, (b, beta, k)
