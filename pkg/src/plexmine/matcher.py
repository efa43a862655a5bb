"""Embedding enumeration and minimum-image support.

An embedding is an injective map from pattern nodes to graph nodes that
preserves node labels, edge layers, and (for directed graphs) edge
direction. Enumeration is a vectorized join: anchor on the pattern node
with the fewest label candidates, then process pattern edges one at a
time, expanding along adjacency when the edge reaches a new node and
filtering by membership when it closes a cycle.
"""

from __future__ import annotations

import numpy as np

from .graph import MultiplexGraph
from .pattern import Pattern, PatternError

Embedding = tuple[int, ...]


class MatchError(ValueError):
    pass


def _join_plan(p: Pattern, anchor: int):
    """Order pattern edges so each step touches already-placed nodes."""
    remaining = list(p.edges)
    placed = [anchor]
    plan: list[tuple[str, object]] = []
    while remaining:
        both = [e for e in remaining if e.i in placed and e.j in placed]
        if both:
            e = both[0]
            plan.append(("filter", e))
            remaining.remove(e)
            continue
        half = [e for e in remaining if (e.i in placed) != (e.j in placed)]
        if not half:
            raise PatternError("disconnected pattern")
        e = half[0]
        new = e.j if e.i in placed else e.i
        plan.append(("expand", e))
        placed.append(new)
        remaining.remove(e)
    return plan, placed


def match_array(p: Pattern, g: MultiplexGraph) -> np.ndarray:
    """All embeddings of ``p`` in ``g`` as an (N, k) int array, sorted rows.

    Columns follow pattern node indices. Direction bits are ignored when
    the graph is undirected.
    """
    if p.directed != g.directed:
        raise MatchError("pattern/graph directedness mismatch")
    if not p.layers <= g.layers:
        return np.empty((0, p.k), dtype=np.int64)
    idx = g.index()
    for lab in p.node_labels:
        if lab not in idx.nodes_by_label:
            return np.empty((0, p.k), dtype=np.int64)
    anchor = min(range(p.k), key=lambda i: (len(idx.nodes_by_label[p.node_labels[i]]), i))
    plan, _ = _join_plan(p, anchor)
    col_of = {anchor: 0}  # grows as expansion appends columns

    E = idx.nodes_by_label[p.node_labels[anchor]].reshape(-1, 1).copy()
    for op, e in plan:
        if E.shape[0] == 0:
            break
        if op == "filter":
            a, b = E[:, col_of[e.i]], E[:, col_of[e.j]]
            if g.directed:
                us, vs = (a, b) if e.dirbit else (b, a)
            else:
                us, vs = a, b
            E = E[idx.has_pairs(us, vs, e.layer)]
        else:
            old = e.i if e.i in col_of else e.j
            new = e.j if old == e.i else e.i
            # direction of traversal: expanding from `old` towards `new`
            if g.directed:
                src = e.i if e.dirbit else e.j
                incoming = src == new  # new -> old means we follow in-edges of old
            else:
                incoming = False
            rows, nbrs = idx.neighbors_flat(E[:, col_of[old]], e.layer, incoming)
            want = idx.label_ids.get(p.node_labels[new])
            keep = idx.node_label[nbrs] == want
            for c in range(E.shape[1]):
                keep &= nbrs != E[rows, c]
            rows, nbrs = rows[keep], nbrs[keep]
            E = np.column_stack([E[rows], nbrs])
            col_of[new] = E.shape[1] - 1
    if E.shape[0] == 0:
        return np.empty((0, p.k), dtype=np.int64)
    # back to pattern-index column order, then deterministic row order
    E = E[:, [col_of[i] for i in range(p.k)]]
    E = E[np.lexsort(tuple(E[:, c] for c in reversed(range(p.k))))]
    return np.ascontiguousarray(E, dtype=np.int64)


def enumerate_embeddings(p: Pattern, g: MultiplexGraph) -> list[Embedding]:
    """Complete, duplicate-free list of embeddings as node tuples."""
    return [tuple(int(x) for x in row) for row in match_array(p, g)]


def image_table(embs: list[Embedding], k: int) -> list[set[int]]:
    """Per pattern-node sets of distinct graph nodes playing that role."""
    table: list[set[int]] = [set() for _ in range(k)]
    for emb in embs:
        if len(emb) != k:
            raise MatchError(f"embedding arity {len(emb)} != {k}")
        for pos, node in enumerate(emb):
            table[pos].add(node)
    return table


def mis_support(embs: list[Embedding], k: int) -> int:
    """Minimum image support: min over roles of distinct node images."""
    if not embs:
        return 0
    return min(len(s) for s in image_table(embs, k))


def mis_support_array(E: np.ndarray) -> int:
    if E.shape[0] == 0:
        return 0
    return min(int(len(np.unique(E[:, c]))) for c in range(E.shape[1]))
