import random

import pytest
from hypothesis import given, settings, strategies as st

from plexmine.coupled import (
    COUPLING,
    INTRA,
    CoupledSimpleGraph,
    MultilayerInstance,
    from_coupled,
    to_coupled,
)
from plexmine.graph import GraphError


def test_minimal_coupling():
    inst = MultilayerInstance.build(
        replicas=[("n", 0), ("n", 1)],
        couplings=[(("n", 0), ("n", 1))],
        intra_edges=[],
    )
    csg = to_coupled(inst)
    assert len(csg.nodes) == 2
    assert csg.edges == frozenset({(0, 1, COUPLING)})
    assert from_coupled(csg) == inst


def test_intra_edges_reappear_once_with_kind_2():
    # two layers, mixed couplings, several intra edges
    inst = MultilayerInstance.build(
        replicas=[("a", 0), ("b", 0), ("c", 0), ("a", 1), ("b", 1), ("d", 1)],
        couplings=[(("a", 0), ("a", 1)), (("b", 0), ("b", 1)),
                   (("a", 0), ("d", 1))],
        intra_edges=[(("a", 0), ("b", 0)), (("b", 0), ("c", 0)),
                     (("a", 1), ("d", 1))],
    )
    csg = to_coupled(inst)
    intra = [(csg.origin[u], csg.origin[v]) for u, v, k in csg.edges if k == INTRA]
    assert len(intra) == len(inst.intra_edges)
    normalized = {tuple(sorted(pair)) for pair in intra}
    assert normalized == set(inst.intra_edges)
    # layer of each intra edge recoverable from node labels
    for u, v, k in csg.edges:
        if k == INTRA:
            assert csg.node_layer[u] == csg.node_layer[v]


def test_coupling_referencing_absent_replica_rejected():
    inst = MultilayerInstance.build(
        replicas=[("n", 0)],
        couplings=[(("n", 0), ("n", 1))],
        intra_edges=[],
    )
    with pytest.raises(GraphError):
        to_coupled(inst)


def test_intra_edge_spanning_layers_rejected():
    good = MultilayerInstance.build(
        replicas=[("a", 0), ("b", 1)], couplings=[], intra_edges=[])
    csg = to_coupled(good)
    corrupted = CoupledSimpleGraph(
        nodes=csg.nodes,
        node_layer=csg.node_layer,
        edges=frozenset({(0, 1, INTRA)}),
        origin=csg.origin,
    )
    with pytest.raises(GraphError):
        from_coupled(corrupted)


def _random_instance(rng: random.Random) -> MultilayerInstance:
    n_layers = rng.randint(2, 3)
    names = "uvwxyz"[: rng.randint(2, 5)]
    replicas = {(n, l) for n in names for l in range(n_layers)
                if rng.random() < 0.8}
    if len(replicas) < 2:
        replicas = {(names[0], 0), (names[0], 1)}
    reps = sorted(replicas)
    couplings = set()
    intra = set()
    for _ in range(rng.randint(0, 6)):
        a, b = rng.sample(reps, 2)
        if a[1] == b[1]:
            if a[0] != b[0]:
                intra.add(tuple(sorted((a, b))))
        else:
            couplings.add(tuple(sorted((a, b))))
    return MultilayerInstance.build(replicas, couplings, intra)


def test_roundtrip_random_instances():
    rng = random.Random(42)
    for _ in range(100):
        inst = _random_instance(rng)
        assert from_coupled(to_coupled(inst)) == inst


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_roundtrip_property(seed):
    inst = _random_instance(random.Random(seed))
    assert from_coupled(to_coupled(inst)) == inst
