import random

import pytest

from plexmine.graph import MultiplexGraph
from plexmine.miner import MiningConfig, MiningError, PatternSet, mine
from plexmine.pattern import Strategy

from oracles import brute_canonical_key, brute_mine, random_multiplex


def _mined_by_brute_key(ps: PatternSet) -> dict:
    return {brute_canonical_key(rec.pattern): rec.support for rec in ps}


def test_minimal_mining_single_edge():
    g = MultiplexGraph([0, 1], [(0, 1, 0)], attrs={0: "a", 1: "b"}, directed=False)
    ps = mine(g, MiningConfig(1, 2))
    sizes = sorted((rec.pattern.k, len(rec.pattern.edges)) for rec in ps)
    assert sizes == [(1, 0), (1, 0), (2, 1)]  # two label singletons + the edge
    assert all(rec.support == 1 for rec in ps)


def test_equal_labels_single_seed():
    g = MultiplexGraph([0, 1], [(0, 1, 0)], directed=False)
    ps = mine(g, MiningConfig(1, 2))
    assert sorted((rec.pattern.k, len(rec.pattern.edges)) for rec in ps) == [
        (1, 0), (2, 1)]


def test_image_table_chain_is_found(image_table_graph, chain_pattern):
    ps = mine(image_table_graph, MiningConfig(3, 4))
    key = brute_canonical_key(chain_pattern)
    mined = _mined_by_brute_key(ps)
    assert mined[key] == 3


def test_fractional_sigma_bounds():
    g = MultiplexGraph([0, 1], [(0, 1, 0)])
    with pytest.raises(MiningError):
        mine(g, MiningConfig(1.5, 2))
    with pytest.raises(MiningError):
        mine(g, MiningConfig(0, 2))
    with pytest.raises(MiningError):
        mine(g, MiningConfig(0.0, 2))


def test_fractional_sigma_scales_with_nodes():
    # 10 nodes, sigma=0.4 -> image threshold 4
    edges = [(i, i + 1, 0) for i in range(9)]
    g = MultiplexGraph(range(10), edges, directed=False)
    ps = mine(g, MiningConfig(0.4, 2))
    assert all(rec.support >= 4 for rec in ps)


def test_oracle_equivalence_sample():
    # The full 200-graph gate lives in the acceptance suite; keep a quick
    # version here so regressions surface in unit runs.
    rng = random.Random(2024)
    for trial in range(30):
        g = random_multiplex(rng, max_nodes=7, max_layers=2, max_labels=2,
                             n_edges=rng.randint(4, 8))
        sigma = rng.choice((1, 2, 3))
        s = rng.choice((2, 3, 4))
        ps = mine(g, MiningConfig(sigma, s))
        assert _mined_by_brute_key(ps) == brute_mine(g, sigma, s)


def test_antimonotonicity_on_parent_chain():
    rng = random.Random(77)
    for _ in range(15):
        g = random_multiplex(rng, max_nodes=8)
        ps = mine(g, MiningConfig(1, 3))
        for rec in ps:
            if rec.parent_code is not None:
                parent = ps.get(rec.parent_code)
                assert rec.support <= parent.support


def test_bfs_dfs_same_pattern_sets():
    rng = random.Random(31)
    for _ in range(12):
        g = random_multiplex(rng, max_nodes=7)
        a = mine(g, MiningConfig(1, 3, Strategy.BFS))
        b = mine(g, MiningConfig(1, 3, Strategy.DFS))
        assert _mined_by_brute_key(a) == _mined_by_brute_key(b)


def test_invariance_under_node_permutation():
    rng = random.Random(63)
    for _ in range(8):
        g = random_multiplex(rng, max_nodes=7)
        nodes = sorted(g.nodes)
        perm = nodes[:]
        rng.shuffle(perm)
        mapping = dict(zip(nodes, perm))
        g2 = MultiplexGraph(
            [mapping[n] for n in nodes],
            [(mapping[u], mapping[v], l) for u, v, l in g.edges],
            attrs={mapping[n]: g.attrs[n] for n in nodes},
            directed=g.directed,
            layers=g.layers,
        )
        codes1 = {rec.code for rec in mine(g, MiningConfig(1, 3))}
        codes2 = {rec.code for rec in mine(g2, MiningConfig(1, 3))}
        assert codes1 == codes2


def test_cycle_closures_continue_at_node_cap():
    # at max_nodes, parallel/cycle edges must still extend
    g = MultiplexGraph([0, 1], [(0, 1, 0), (0, 1, 1)], directed=False,
                       layers=[0, 1])
    ps = mine(g, MiningConfig(1, 2))
    edge_counts = sorted(len(rec.pattern.edges) for rec in ps)
    assert edge_counts[-1] == 2  # the two-parallel-edge pattern is mined


def test_embedding_cap_keeps_supports_exact(image_table_graph):
    full = mine(image_table_graph, MiningConfig(1, 3))
    capped = mine(image_table_graph, MiningConfig(1, 3, max_embeddings=2))
    supports_full = {rec.code: rec.support for rec in full}
    supports_capped = {rec.code: rec.support for rec in capped}
    assert supports_full == supports_capped
    assert any(rec.embeddings.shape[0] < rec.n_embeddings for rec in capped)


def test_pattern_dump_stable(image_table_graph):
    a = mine(image_table_graph, MiningConfig(2, 3)).dump()
    b = mine(image_table_graph, MiningConfig(2, 3)).dump()
    assert a == b
    assert a.splitlines() == sorted(a.splitlines())
