import random

import pytest

from plexmine.graph import MultiplexGraph
from plexmine.matcher import (
    MatchError,
    enumerate_embeddings,
    image_table,
    match_array,
    mis_support,
    mis_support_array,
)
from plexmine.pattern import Pattern, PatternEdge

from oracles import brute_embeddings, random_connected_pattern, random_multiplex


def test_single_edge_pattern_counts_edges():
    g = MultiplexGraph(range(6), [(0, 1, 0), (2, 3, 0), (4, 5, 0)], directed=False)
    p = Pattern(False, ("_", "_"), (PatternEdge(0, 1, 0, False),))
    embs = enumerate_embeddings(p, g)
    # each undirected edge admits two injective maps of a symmetric pattern
    assert len(embs) == 6
    assert mis_support(embs, 2) == 6


def test_image_table_figure(image_table_graph, chain_pattern):
    embs = enumerate_embeddings(chain_pattern, image_table_graph)
    assert embs == [(1, 3, 6, 8), (1, 3, 6, 9), (8, 5, 2, 1), (9, 7, 4, 1)]
    table = image_table(embs, 4)
    assert [len(s) for s in table] == [3, 3, 3, 3]
    assert mis_support(embs, 4) == 3


def test_star_center_limits_support():
    # one hub with 5 leaves: many embeddings, support pinned by the center
    edges = [(0, i, 0) for i in range(1, 6)]
    g = MultiplexGraph(range(6), edges, attrs={0: "c", **{i: "l" for i in range(1, 6)}},
                       directed=False)
    star = Pattern(False, ("c", "l", "l"),
                   (PatternEdge(0, 1, 0, False), PatternEdge(0, 2, 0, False)))
    embs = enumerate_embeddings(star, g)
    assert len(embs) == 20  # 5*4 ordered leaf pairs
    assert mis_support(embs, 3) == 1  # the center image set is {0}


def test_mixed_arity_rejected():
    with pytest.raises(MatchError):
        mis_support([(0, 1), (0, 1, 2)], 2)


def test_empty_embeddings_support_zero():
    assert mis_support([], 3) == 0
    g = MultiplexGraph(range(2), [(0, 1, 0)], directed=False)
    p = Pattern(False, ("nope",), ())
    assert enumerate_embeddings(p, g) == []


def test_directedness_mismatch_rejected():
    g = MultiplexGraph(range(2), [(0, 1, 0)], directed=True)
    p = Pattern(False, ("_", "_"), (PatternEdge(0, 1, 0, False),))
    with pytest.raises(MatchError):
        match_array(p, g)


def test_direction_respected_in_directed_graphs():
    g = MultiplexGraph(range(2), [(0, 1, 0)], directed=True)
    fwd = Pattern(True, ("_", "_"), (PatternEdge(0, 1, 0, True),))
    rev = Pattern(True, ("_", "_"), (PatternEdge(0, 1, 0, False),))
    assert enumerate_embeddings(fwd, g) == [(0, 1)]
    assert enumerate_embeddings(rev, g) == [(1, 0)]


def test_matches_bruteforce_on_random_instances():
    rng = random.Random(123)
    checked = 0
    for _ in range(120):
        g = random_multiplex(rng, max_nodes=8)
        p = random_connected_pattern(
            rng, max_nodes=3, n_layers=max(1, len(g.layers)),
            labels=sorted(set(g.attrs.values())), directed=g.directed)
        if not p.layers <= g.layers:
            continue
        got = enumerate_embeddings(p, g)
        want = brute_embeddings(p, g)
        assert got == want
        checked += 1
    assert checked > 60


def test_mis_array_agrees_with_list_form(image_table_graph, chain_pattern):
    E = match_array(chain_pattern, image_table_graph)
    assert mis_support_array(E) == 3
