"""Multiplex graph data model.

A multiplex graph is a labeled multigraph: nodes carry one categorical
attribute each, and every edge is a triple (u, v, layer). Graphs are
immutable after construction and safe to share across workers; the
matcher-facing adjacency indexes are built lazily once and cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

DEFAULT_LABEL = "_"

EdgeTriple = tuple[int, int, int]  # (u, v, layer)


class GraphError(ValueError):
    """Raised for structurally invalid graphs or graph operations."""


class MultiplexGraph:
    """Immutable directed or undirected multiplex graph.

    Undirected graphs store each triple once with u < v; (u, v, l) and
    (v, u, l) are identified at construction. Self-loops are rejected.
    Nodes missing from ``attrs`` get the shared default label ``"_"``.
    """

    __slots__ = (
        "directed",
        "nodes",
        "layers",
        "edges",
        "attrs",
        "layer_names",
        "node_names",
        "_index",
    )

    def __init__(
        self,
        nodes: Iterable[int],
        edges: Iterable[EdgeTriple],
        attrs: Mapping[int, str] | None = None,
        directed: bool = False,
        layers: Iterable[int] | None = None,
        layer_names: Mapping[int, str] | None = None,
        node_names: Mapping[int, str] | None = None,
    ):
        self.directed = bool(directed)
        self.nodes = frozenset(int(u) for u in nodes)
        norm = set()
        for u, v, l in edges:
            u, v, l = int(u), int(v), int(l)
            if u == v:
                continue  # loops are dropped everywhere
            if not directed and u > v:
                u, v = v, u
            norm.add((u, v, l))
        self.edges = frozenset(norm)
        for u, v, l in self.edges:
            if u not in self.nodes or v not in self.nodes:
                raise GraphError(f"edge ({u},{v},{l}) references unknown node")
        edge_layers = {l for _, _, l in self.edges}
        self.layers = frozenset(int(l) for l in layers) if layers is not None else frozenset(edge_layers)
        if not edge_layers <= self.layers:
            raise GraphError("edge uses a layer outside the declared layer set")
        a = dict(attrs) if attrs else {}
        for n in a:
            if n not in self.nodes:
                raise GraphError(f"attribute for unknown node {n}")
        self.attrs = {n: str(a.get(n, DEFAULT_LABEL)) for n in self.nodes}
        self.layer_names = dict(layer_names) if layer_names else {l: str(l) for l in self.layers}
        self.node_names = dict(node_names) if node_names else {n: str(n) for n in self.nodes}
        self._index = None

    # -- basic views ------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int, l: int) -> bool:
        if not self.directed and u > v:
            u, v = v, u
        return (u, v, l) in self.edges

    def labels_present(self) -> frozenset[str]:
        return frozenset(self.attrs.values())

    def layer_id(self, name: str) -> int:
        for lid, lname in self.layer_names.items():
            if lname == name:
                return lid
        raise GraphError(f"unknown layer name {name!r}")

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return (
            f"MultiplexGraph({kind}, |V|={self.n_nodes}, "
            f"|E|={self.n_edges}, |L|={len(self.layers)})"
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiplexGraph):
            return NotImplemented
        return (
            self.directed == other.directed
            and self.nodes == other.nodes
            and self.edges == other.edges
            and self.attrs == other.attrs
            and self.layers == other.layers
        )

    def __hash__(self):
        return hash((self.directed, self.nodes, self.edges))

    # -- matcher-facing index ---------------------------------------------

    def index(self) -> "GraphIndex":
        if self._index is None:
            self._index = GraphIndex(self)
        return self._index

    def subgraph_of_edges(self, keep: Iterable[EdgeTriple]) -> "MultiplexGraph":
        """Graph induced by a subset of the edge set (nodes = endpoints)."""
        keep = set(keep)
        extra = keep - self.edges
        if extra:
            raise GraphError(f"{len(extra)} edges not in graph")
        nodes = {u for u, v, _ in keep} | {v for u, v, _ in keep}
        return MultiplexGraph(
            nodes,
            keep,
            attrs={n: self.attrs[n] for n in nodes},
            directed=self.directed,
            layers=self.layers,
            layer_names=self.layer_names,
            node_names={n: self.node_names[n] for n in nodes},
        )


@dataclass(frozen=True)
class TemporalMultiplexGraph:
    """A multiplex graph whose edges carry integer timestamps.

    ``node_times`` records each node's first-seen day; it never exceeds the
    earliest timestamp of the node's incident edges.
    """

    base: MultiplexGraph
    edge_times: Mapping[EdgeTriple, int]
    node_times: Mapping[int, int]

    def __post_init__(self):
        for e in self.base.edges:
            if e not in self.edge_times:
                raise GraphError(f"edge {e} has no timestamp")
        for (u, v, _), t in self.edge_times.items():
            for n in (u, v):
                if self.node_times.get(n, t) > t:
                    raise GraphError(f"node {n} first seen after its edge at t={t}")

    @property
    def time_range(self) -> tuple[int, int]:
        ts = list(self.edge_times.values())
        return min(ts), max(ts)


def flatten_monoplex(g: MultiplexGraph, keep_layers: Iterable[int] | None = None) -> MultiplexGraph:
    """Collapse layers into a single-layer graph.

    An edge (u, v) exists in the output iff (u, v, l) exists for some kept
    layer l. The node set is unchanged; the flattened layer has id 0.
    """
    if keep_layers is None:
        kept = set(g.layers)
    else:
        kept = {int(l) for l in keep_layers}
        if not kept:
            raise GraphError("keep_layers must be non-empty")
        if not kept <= g.layers:
            raise GraphError(f"keep_layers {sorted(kept - g.layers)} not in graph layers")
    pairs = {(u, v) for u, v, l in g.edges if l in kept}
    return MultiplexGraph(
        g.nodes,
        {(u, v, 0) for u, v in pairs},
        attrs=g.attrs,
        directed=g.directed,
        layers={0},
        layer_names={0: "*"},
        node_names=g.node_names,
    )


class GraphIndex:
    """Array adjacency built once per graph for the vectorized matcher.

    For directed graphs ``out_[l]`` / ``in_[l]`` are CSR-style neighbor
    arrays per layer; undirected graphs expose a single symmetric table in
    ``out_`` (and ``in_`` aliases it). ``edge_keys[l]`` holds sorted u*W+v
    keys for O(log E) membership tests; undirected keys are stored in both
    orientations.
    """

    def __init__(self, g: MultiplexGraph):
        self.g = g
        self.width = (max(g.nodes) + 1) if g.nodes else 1
        self.node_arr = np.array(sorted(g.nodes), dtype=np.int64)
        labels = sorted({g.attrs[n] for n in g.nodes}) if g.nodes else []
        self.labels_list = labels
        self.label_ids = {lab: i for i, lab in enumerate(labels)}
        self.node_label = np.full(self.width, -1, dtype=np.int64)
        for n in g.nodes:
            self.node_label[n] = self.label_ids[g.attrs[n]]
        self.nodes_by_label = {
            lab: np.array(sorted(n for n in g.nodes if g.attrs[n] == lab), dtype=np.int64)
            for lab in labels
        }
        self.out_: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self.in_: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self.edge_keys: dict[int, np.ndarray] = {}
        for l in g.layers:
            fwd: dict[int, list[int]] = {}
            rev: dict[int, list[int]] = {}
            keys = []
            for u, v, el in g.edges:
                if el != l:
                    continue
                fwd.setdefault(u, []).append(v)
                keys.append(u * self.width + v)
                if g.directed:
                    rev.setdefault(v, []).append(u)
                else:
                    fwd.setdefault(v, []).append(u)
                    keys.append(v * self.width + u)
            self.out_[l] = self._csr(fwd)
            self.in_[l] = self._csr(rev) if g.directed else self.out_[l]
            self.edge_keys[l] = np.array(sorted(keys), dtype=np.int64)

    def _csr(self, adj: dict[int, list[int]]) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.width + 1, dtype=np.int64)
        for u, vs in adj.items():
            indptr[u + 1] = len(vs)
        np.cumsum(indptr, out=indptr)
        indices = np.empty(indptr[-1], dtype=np.int64)
        for u, vs in adj.items():
            indices[indptr[u]:indptr[u + 1]] = sorted(vs)
        return indptr, indices

    def has_pairs(self, us: np.ndarray, vs: np.ndarray, layer: int) -> np.ndarray:
        """Vectorized membership: does the graph contain edge u->v in layer?

        For undirected graphs orientation is irrelevant (keys are stored
        both ways).
        """
        keys = self.edge_keys[layer]
        probe = us * self.width + vs
        pos = np.searchsorted(keys, probe)
        pos[pos >= len(keys)] = len(keys) - 1 if len(keys) else 0
        if len(keys) == 0:
            return np.zeros(len(probe), dtype=bool)
        return keys[pos] == probe

    def neighbors_flat(
        self, anchors: np.ndarray, layer: int, incoming: bool
    ) -> tuple[np.ndarray, np.ndarray]:
        """Gather all (row, neighbor) expansions of the anchor column.

        Returns (rows, nbrs): row indices into ``anchors`` repeated per
        neighbor, and the flattened neighbor ids.
        """
        indptr, indices = (self.in_ if incoming else self.out_)[layer]
        starts = indptr[anchors]
        counts = indptr[anchors + 1] - starts
        total = int(counts.sum())
        if total == 0:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        rows = np.repeat(np.arange(len(anchors), dtype=np.int64), counts)
        shift = np.repeat(np.cumsum(counts) - counts, counts)
        pos = np.arange(total, dtype=np.int64) - shift + np.repeat(starts, counts)
        return rows, indices[pos]
