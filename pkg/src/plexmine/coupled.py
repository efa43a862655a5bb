"""Many-to-many multilayer pre/post transform.

A many-to-many multilayer instance lists per-layer node replicas, explicit
inter-layer couplings, and intra-layer edges. The pre-processor turns it
into a simple graph with layer-labeled nodes and two edge kinds (COUPLING
joins replicas of the same entity across layers, INTRA is a regular
in-layer connection); the post-processor reverses the transform exactly,
recovering each INTRA edge's layer from its endpoints' node labels.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import GraphError

COUPLING = 1
INTRA = 2

Replica = tuple[str, int]  # (entity name, layer id)


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class MultilayerInstance:
    """Input description: replicas + couplings + intra-layer edges."""

    replicas: frozenset[Replica]
    couplings: frozenset[tuple[Replica, Replica]]
    intra_edges: frozenset[tuple[Replica, Replica]]

    @classmethod
    def build(cls, replicas, couplings, intra_edges) -> "MultilayerInstance":
        return cls(
            replicas=frozenset((str(n), int(l)) for n, l in replicas),
            couplings=frozenset(_pair(tuple(a), tuple(b)) for a, b in couplings),
            intra_edges=frozenset(_pair(tuple(a), tuple(b)) for a, b in intra_edges),
        )


@dataclass(frozen=True)
class CoupledSimpleGraph:
    """Simple graph with per-node layer labels and two edge kinds."""

    nodes: tuple[int, ...]
    node_layer: dict[int, int]
    edges: frozenset[tuple[int, int, int]]  # (u, v, kind) with u < v
    origin: dict[int, Replica]

    def validate(self) -> None:
        for u, v, kind in self.edges:
            if kind == COUPLING and self.node_layer[u] == self.node_layer[v]:
                raise GraphError(f"COUPLING edge ({u},{v}) within one layer")
            if kind == INTRA and self.node_layer[u] != self.node_layer[v]:
                raise GraphError(f"INTRA edge ({u},{v}) spans two layers")


def to_coupled(inst: MultilayerInstance) -> CoupledSimpleGraph:
    """One output node per replica; couplings kind 1, intra edges kind 2."""
    ordered = sorted(inst.replicas)
    rid = {rep: i for i, rep in enumerate(ordered)}
    for a, b in inst.couplings:
        for rep in (a, b):
            if rep not in rid:
                raise GraphError(f"coupling references absent replica {rep}")
        if a[1] == b[1]:
            raise GraphError(f"coupling {a}-{b} within one layer")
    for a, b in inst.intra_edges:
        for rep in (a, b):
            if rep not in rid:
                raise GraphError(f"intra edge references absent replica {rep}")
        if a[1] != b[1]:
            raise GraphError(f"intra edge {a}-{b} spans layers {a[1]} and {b[1]}")
    edges = set()
    for a, b in inst.couplings:
        u, v = rid[a], rid[b]
        edges.add((min(u, v), max(u, v), COUPLING))
    for a, b in inst.intra_edges:
        u, v = rid[a], rid[b]
        edges.add((min(u, v), max(u, v), INTRA))
    csg = CoupledSimpleGraph(
        nodes=tuple(range(len(ordered))),
        node_layer={i: rep[1] for i, rep in enumerate(ordered)},
        edges=frozenset(edges),
        origin={i: rep for i, rep in enumerate(ordered)},
    )
    csg.validate()
    return csg


def from_coupled(csg: CoupledSimpleGraph) -> MultilayerInstance:
    """Exact inverse of :func:`to_coupled`."""
    csg.validate()
    replicas = frozenset(csg.origin[n] for n in csg.nodes)
    couplings = set()
    intra = set()
    for u, v, kind in csg.edges:
        a, b = csg.origin[u], csg.origin[v]
        if kind == COUPLING:
            couplings.add(_pair(a, b))
        elif kind == INTRA:
            # the layer is recoverable from either endpoint's label
            if a[1] != b[1]:
                raise GraphError(f"INTRA edge ({u},{v}) spans two layers")
            intra.add(_pair(a, b))
        else:
            raise GraphError(f"unknown edge kind {kind}")
    return MultilayerInstance(
        replicas=replicas, couplings=frozenset(couplings), intra_edges=frozenset(intra)
    )
