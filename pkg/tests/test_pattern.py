import itertools
import random

import pytest

from plexmine.pattern import (
    CanonicalCode,
    Delta,
    Pattern,
    PatternEdge,
    PatternError,
    Strategy,
    apply_delta,
    canonical_code,
    canonical_delta_key,
    canonical_orderings,
    delta_from_key,
    delta_key_from_string,
    delta_key_to_string,
    pattern_from_code,
)

from oracles import random_connected_pattern


def test_single_node_code():
    p = Pattern(False, ("x",), ())
    code = canonical_code(p)
    assert code.root_label == "x"
    assert code.tuples == ()


def test_triangle_all_orderings_one_code():
    tri = Pattern(False, ("x", "x", "x"),
                  (PatternEdge(0, 1, 0, False), PatternEdge(0, 2, 0, False),
                   PatternEdge(1, 2, 0, False)))
    for strategy in (Strategy.BFS, Strategy.DFS):
        codes = {canonical_code(tri.relabeled(perm), strategy)
                 for perm in itertools.permutations(range(3))}
        assert len(codes) == 1
    # uniform triangle has the full symmetric group of canonical orderings
    assert len(canonical_orderings(tri)) == 6


def test_parallel_edges_tree_then_cycle():
    par = Pattern(False, ("x", "y"),
                  (PatternEdge(0, 1, 0, False), PatternEdge(0, 1, 1, False)))
    code = canonical_code(par)
    assert len(code.tuples) == 2
    tree, cyc = code.tuples
    assert tree.dst == 1  # discovers node 1
    assert cyc.dst == 1   # closes the length-2 cycle on a discovered node
    assert tree.layer != cyc.layer


def test_disconnected_pattern_rejected():
    p = Pattern(False, ("x", "y", "z"), (PatternEdge(0, 1, 0, False),))
    with pytest.raises(PatternError):
        canonical_code(p)


def test_pattern_validation():
    with pytest.raises(PatternError):
        Pattern(False, ("x", "y"), (PatternEdge(1, 0, 0, False),))
    with pytest.raises(PatternError):
        Pattern(False, ("x", "y"), (PatternEdge(0, 1, 0, True),))  # dirbit undirected
    with pytest.raises(PatternError):
        Pattern(False, ("x", "y"),
                (PatternEdge(0, 1, 0, False), PatternEdge(0, 1, 0, False)))


@pytest.mark.parametrize("strategy", [Strategy.BFS, Strategy.DFS])
@pytest.mark.parametrize("directed", [False, True])
def test_canonical_invariance_random(strategy, directed):
    rng = random.Random(17 if directed else 23)
    for _ in range(60):
        p = random_connected_pattern(rng, max_nodes=5, directed=directed)
        base = canonical_code(p, strategy)
        for _ in range(10):
            perm = list(range(p.k))
            rng.shuffle(perm)
            assert canonical_code(p.relabeled(tuple(perm)), strategy) == base


def test_code_string_roundtrip():
    rng = random.Random(3)
    for _ in range(40):
        p = random_connected_pattern(rng, directed=rng.random() < 0.5)
        for strategy in (Strategy.BFS, Strategy.DFS):
            code = canonical_code(p, strategy)
            assert CanonicalCode.from_string(code.to_string()) == code
            # the code reconstructs the pattern up to isomorphism
            assert canonical_code(pattern_from_code(code), strategy) == code


def test_code_string_quotes_labels():
    p = Pattern(False, ("a b~;", "x:y"), (PatternEdge(0, 1, 0, False),))
    code = canonical_code(p)
    assert CanonicalCode.from_string(code.to_string()) == code


def test_apply_delta_node_and_cycle():
    edge = Pattern(False, ("x", "y"), (PatternEdge(0, 1, 0, False),))
    grown = apply_delta(edge, Delta(0, None, 1, True, "z"))
    assert grown.k == 3 and len(grown.edges) == 2
    closed = apply_delta(grown, Delta(1, 2, 0, True))
    assert closed.k == 3 and len(closed.edges) == 3
    with pytest.raises(PatternError):
        apply_delta(edge, Delta(0, 1, 0, True))  # already present


def test_delta_key_collapses_symmetric_placements():
    edge = Pattern(False, ("x", "x"), (PatternEdge(0, 1, 0, False),))
    k0 = canonical_delta_key(edge, Delta(0, None, 1, True, "y"))
    k1 = canonical_delta_key(edge, Delta(1, None, 1, True, "y"))
    assert k0 == k1
    # asymmetric labels keep placements apart
    edge2 = Pattern(False, ("x", "y"), (PatternEdge(0, 1, 0, False),))
    a = canonical_delta_key(edge2, Delta(0, None, 1, True, "z"))
    b = canonical_delta_key(edge2, Delta(1, None, 1, True, "z"))
    assert a != b


def test_delta_key_string_roundtrip():
    edge = Pattern(True, ("x", "y"), (PatternEdge(0, 1, 0, True),))
    for d in (Delta(0, None, 1, False, "z"), Delta(0, 1, 1, False)):
        key = canonical_delta_key(edge, d)
        assert delta_key_from_string(delta_key_to_string(key)) == key
        rebuilt = delta_from_key(key, True)
        assert rebuilt.layer == d.layer
        assert rebuilt.introduces_new_node == d.introduces_new_node


def test_directed_direction_bit_distinguishes():
    fwd = Pattern(True, ("x", "y"), (PatternEdge(0, 1, 0, True),))
    rev = Pattern(True, ("x", "y"), (PatternEdge(0, 1, 0, False),))
    assert canonical_code(fwd) != canonical_code(rev)
    # reciprocated pair is one isomorphism class regardless of indexing
    pair1 = Pattern(True, ("x", "x"),
                    (PatternEdge(0, 1, 0, True), PatternEdge(0, 1, 0, False)))
    assert canonical_code(pair1.relabeled((1, 0))) == canonical_code(pair1)
