"""Patterns and spanning-tree canonical codes.

A pattern is a small connected multiplex subgraph: labeled nodes indexed
0..k-1 in discovery order, and multigraph edges (i, j, layer, dirbit) with
i < j. The dirbit records whether the true edge direction runs from the
lower to the higher index; it is always False for undirected patterns.

The canonical code of a pattern is the lexicographically smallest tuple
sequence over all spanning-tree explorations consistent with the chosen
strategy (BFS or DFS). Equal codes <=> isomorphic patterns, which lets the
miner deduplicate candidates without isomorphism tests. Tuples compare by
the fixed key (src, layer, dirbit, dst_label, dst).
"""

from __future__ import annotations

import functools
import urllib.parse
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


class PatternError(ValueError):
    """Structurally invalid pattern or pattern operation."""


class Strategy(str, Enum):
    BFS = "bfs"
    DFS = "dfs"


class PatternEdge(NamedTuple):
    i: int
    j: int
    layer: int
    dirbit: bool  # True: actual direction is i -> j; False for undirected


class CodeTuple(NamedTuple):
    """One extension step; field order doubles as the comparison key."""

    src: int
    layer: int
    dirbit: int
    dst_label: str
    dst: int


@dataclass(frozen=True)
class Pattern:
    directed: bool
    node_labels: tuple[str, ...]
    edges: tuple[PatternEdge, ...]

    def __post_init__(self):
        k = len(self.node_labels)
        if k < 1:
            raise PatternError("pattern needs at least one node")
        seen = set()
        for e in self.edges:
            if not (0 <= e.i < e.j < k):
                raise PatternError(f"edge {e} out of range or not i<j")
            if not self.directed and e.dirbit:
                raise PatternError("dirbit set on undirected pattern")
            key = (e.i, e.j, e.layer, e.dirbit)
            if key in seen:
                raise PatternError(f"duplicate edge {e}")
            seen.add(key)
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    @property
    def k(self) -> int:
        return len(self.node_labels)

    @property
    def layers(self) -> frozenset[int]:
        return frozenset(e.layer for e in self.edges)

    def is_connected(self) -> bool:
        if self.k == 1:
            return True
        parent = list(range(self.k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            parent[find(e.i)] = find(e.j)
        return len({find(i) for i in range(self.k)}) == 1

    def relabeled(self, perm: tuple[int, ...]) -> "Pattern":
        """Apply an index permutation: new index of node i is perm[i]."""
        labels = [""] * self.k
        for i, lab in enumerate(self.node_labels):
            labels[perm[i]] = lab
        edges = []
        for e in self.edges:
            a, b = perm[e.i], perm[e.j]
            if a < b:
                edges.append(PatternEdge(a, b, e.layer, e.dirbit))
            else:
                edges.append(PatternEdge(b, a, e.layer, not e.dirbit if self.directed else False))
        return Pattern(self.directed, tuple(labels), tuple(edges))


@dataclass(frozen=True)
class Delta:
    """A single-edge extension of a pattern.

    Cycle deltas connect existing nodes i < j; node deltas (j is None)
    attach a fresh node labeled ``new_label`` to node i. ``forward`` is the
    true direction i -> j (or i -> new node); it is True for undirected
    patterns, where direction is meaningless.
    """

    i: int
    j: int | None
    layer: int
    forward: bool = True
    new_label: str | None = None

    def __post_init__(self):
        if self.j is None:
            if self.new_label is None:
                raise PatternError("node delta needs new_label")
        else:
            if self.i >= self.j:
                raise PatternError("cycle delta needs i < j")
            if self.new_label is not None:
                raise PatternError("cycle delta cannot carry new_label")

    @property
    def introduces_new_node(self) -> bool:
        return self.j is None


def apply_delta(p: Pattern, d: Delta) -> Pattern:
    """Extend a pattern by one edge (and at most one node)."""
    if d.j is None:
        k = p.k
        edge = PatternEdge(d.i, k, d.layer, d.forward if p.directed else False)
        return Pattern(p.directed, p.node_labels + (d.new_label,), p.edges + (edge,))
    edge = PatternEdge(d.i, d.j, d.layer, d.forward if p.directed else False)
    if (edge.i, edge.j, edge.layer, edge.dirbit) in {(e.i, e.j, e.layer, e.dirbit) for e in p.edges}:
        raise PatternError(f"delta edge {edge} already present")
    return Pattern(p.directed, p.node_labels, p.edges + (edge,))


def single_node(label: str, directed: bool) -> Pattern:
    return Pattern(directed, (label,), ())


@dataclass(frozen=True)
class CanonicalCode:
    strategy: Strategy
    directed: bool
    root_label: str
    tuples: tuple[CodeTuple, ...]

    def sort_key(self):
        return (self.root_label, self.tuples)

    def to_string(self) -> str:
        s = "B" if self.strategy == Strategy.BFS else "D"
        s += "d" if self.directed else "u"
        parts = [
            f"{t.src}-{t.dst}:{t.layer}:{t.dirbit}:{_q(t.dst_label)}" for t in self.tuples
        ]
        return f"{s}|{_q(self.root_label)}|{';'.join(parts)}"

    @classmethod
    def from_string(cls, s: str) -> "CanonicalCode":
        head, root, body = s.split("|")
        strategy = Strategy.BFS if head[0] == "B" else Strategy.DFS
        directed = head[1] == "d"
        tuples = []
        if body:
            for part in body.split(";"):
                span, layer, dirbit, lab = part.split(":")
                src, dst = span.split("-")
                tuples.append(CodeTuple(int(src), int(layer), int(dirbit), _uq(lab), int(dst)))
        return cls(strategy, directed, _uq(root), tuple(tuples))


def _q(label: str) -> str:
    return urllib.parse.quote(label, safe="")


def _uq(s: str) -> str:
    return urllib.parse.unquote(s)


@functools.lru_cache(maxsize=1 << 16)
def _canonical_search(p: Pattern, strategy: Strategy):
    """Minimal code tuples plus every discovery ordering achieving them.

    Explorations are enumerated with two sound prunings: at each state only
    locally minimal next tuples are expanded (any larger choice is
    dominated from the same prefix), and branches whose prefix exceeds the
    best complete code are cut. Orderings map code index -> node index;
    there is one per exploration attaining the minimum, so together they
    carry the pattern's canonical automorphisms.
    """
    if not p.is_connected():
        raise PatternError("canonical code requires a connected pattern")
    k = len(p.node_labels)
    inc: list[list[int]] = [[] for _ in range(k)]
    for eidx, e in enumerate(p.edges):
        inc[e.i].append(eidx)
        inc[e.j].append(eidx)

    best: list[CodeTuple] | None = None
    best_orders: list[tuple[int, ...]] = []
    min_label = min(p.node_labels)
    n_edges = len(p.edges)

    def candidates(state):
        order, pos, emitted, agenda = state
        # advance deterministically to the node that must emit next
        if strategy == Strategy.BFS:
            cur = agenda
            while cur < len(order) and all(
                e in emitted for e in inc[order[cur]]
            ):
                cur += 1
            if cur == len(order):
                return None, cur  # complete
            return order[cur], cur
        stack = list(agenda)
        while stack and all(e in emitted for e in inc[order[stack[-1]]]):
            stack.pop()
        if not stack:
            return None, tuple(stack)
        return order[stack[-1]], tuple(stack)

    def rec(order, pos, emitted, agenda, tuples, tied):
        nonlocal best, best_orders
        node, agenda = candidates((order, pos, emitted, agenda))
        if node is None:
            if len(emitted) != n_edges:
                return  # unreachable for connected patterns
            if best is None or tuples < best:
                best = list(tuples)
                best_orders = [tuple(order)]
            elif tuples == best:
                best_orders.append(tuple(order))
            return
        cur = pos[node]
        cands = []
        for eidx in inc[node]:
            if eidx in emitted:
                continue
            e = p.edges[eidx]
            other = e.j if e.i == node else e.i
            if other in pos:
                dst = pos[other]
                lo = min(cur, dst)
                if p.directed:
                    actual_src = e.i if e.dirbit else e.j
                    dirbit = 1 if pos[actual_src] == lo else 0
                else:
                    dirbit = 0
                t = CodeTuple(cur, e.layer, dirbit, p.node_labels[other], dst)
                cands.append((t, eidx, None))
            else:
                dst = len(order)
                if p.directed:
                    actual_src = e.i if e.dirbit else e.j
                    dirbit = 1 if actual_src == node else 0
                else:
                    dirbit = 0
                t = CodeTuple(cur, e.layer, dirbit, p.node_labels[other], dst)
                cands.append((t, eidx, other))
        t_min = min(t for t, _, _ in cands)
        depth = len(tuples)
        if best is not None and tied:
            if t_min > best[depth]:
                return
            tied_next = t_min == best[depth]
        else:
            tied_next = tied
        for t, eidx, new_node in cands:
            if t != t_min:
                continue
            if new_node is None:
                rec(order, pos, emitted | {eidx}, agenda, tuples + [t], tied_next)
            else:
                pos2 = dict(pos)
                pos2[new_node] = len(order)
                agenda2 = agenda if strategy == Strategy.BFS else agenda + (len(order),)
                rec(order + [new_node], pos2, emitted | {eidx}, agenda2, tuples + [t], tied_next)

    for root in range(k):
        if p.node_labels[root] != min_label:
            continue
        start_agenda = 0 if strategy == Strategy.BFS else (0,)
        rec([root], {root: 0}, frozenset(), start_agenda, [], best is not None)
    return tuple(best), tuple(dict.fromkeys(best_orders))


def canonical_code(p: Pattern, strategy: Strategy = Strategy.BFS) -> CanonicalCode:
    tuples, _ = _canonical_search(p, strategy)
    return CanonicalCode(strategy, p.directed, min(p.node_labels), tuples)


def canonical_orderings(p: Pattern, strategy: Strategy = Strategy.BFS) -> tuple[tuple[int, ...], ...]:
    """All discovery orderings whose exploration attains the minimal code."""
    _, orders = _canonical_search(p, strategy)
    return orders


def pattern_from_code(code: CanonicalCode) -> Pattern:
    labels = [code.root_label]
    edges = []
    for t in code.tuples:
        if t.dst == len(labels):
            labels.append(t.dst_label)
        elif t.dst > len(labels):
            raise PatternError(f"code tuple {t} skips an index")
        lo, hi = (t.src, t.dst) if t.src < t.dst else (t.dst, t.src)
        edges.append(PatternEdge(lo, hi, t.layer, bool(t.dirbit) if code.directed else False))
    return Pattern(code.directed, tuple(labels), tuple(edges))


# -- delta canonicalization -------------------------------------------------

CYCLE_KIND = 0
NODE_KIND = 1


def canonical_delta_key(p: Pattern, d: Delta, strategy: Strategy = Strategy.BFS) -> tuple:
    """Position-independent identity of a delta on pattern ``p``.

    The delta's endpoints are reprojected through every canonical ordering
    of ``p`` and the smallest image is kept, so automorphic placements of
    the same extension collapse to one key.
    """
    best = None
    for order in canonical_orderings(p, strategy):
        pos = {node: ci for ci, node in enumerate(order)}
        if d.j is None:
            dirbit = 1 if (p.directed and d.forward) else 0
            cand = (NODE_KIND, pos[d.i], d.layer, dirbit, d.new_label)
        else:
            a, b = pos[d.i], pos[d.j]
            lo, hi = (a, b) if a < b else (b, a)
            if p.directed:
                src = d.i if d.forward else d.j
                dirbit = 1 if pos[src] == lo else 0
            else:
                dirbit = 0
            cand = (CYCLE_KIND, lo, hi, d.layer, dirbit)
        if best is None or cand < best:
            best = cand
    return best


def delta_from_key(key: tuple, directed: bool) -> Delta:
    """Rebuild a delta, in canonical antecedent indexing, from its key."""
    if key[0] == NODE_KIND:
        _, i, layer, dirbit, new_label = key
        return Delta(i=i, j=None, layer=layer, forward=bool(dirbit) if directed else True,
                     new_label=new_label)
    _, lo, hi, layer, dirbit = key
    return Delta(i=lo, j=hi, layer=layer, forward=bool(dirbit) if directed else True)


def delta_key_to_string(key: tuple) -> str:
    if key[0] == NODE_KIND:
        _, i, layer, dirbit, new_label = key
        return f"N:{i}:{layer}:{dirbit}:{_q(new_label)}"
    _, lo, hi, layer, dirbit = key
    return f"C:{lo}-{hi}:{layer}:{dirbit}"


def delta_key_from_string(s: str) -> tuple:
    parts = s.split(":")
    if parts[0] == "N":
        return (NODE_KIND, int(parts[1]), int(parts[2]), int(parts[3]), _uq(parts[4]))
    lo, hi = parts[1].split("-")
    return (CYCLE_KIND, int(lo), int(hi), int(parts[2]), int(parts[3]))
