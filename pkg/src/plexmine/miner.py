"""Frequent multiplex pattern mining under minimum-image support.

The search grows connected patterns one edge at a time from single-node
seeds (one per attribute label). Each extension either attaches a fresh
node or closes a cycle between existing nodes; candidate extensions are
read off the parent's embedding array, so child embeddings are computed
by an incremental join instead of a fresh subgraph-isomorphism search.
Duplicates are pruned by canonical-code lookup, and every frequent
(parent, child) extension is offered to the optional rule sink while the
search runs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Protocol

import numpy as np

from .graph import MultiplexGraph
from .matcher import match_array, mis_support_array
from .pattern import (
    CanonicalCode,
    Delta,
    Pattern,
    Strategy,
    apply_delta,
    canonical_code,
    canonical_orderings,
    single_node,
)


class MiningError(ValueError):
    pass


class MiningInvariantError(AssertionError):
    """An internal mining invariant (e.g. anti-monotonicity) failed."""


@dataclass
class MiningConfig:
    """Search parameters.

    ``support`` is an absolute minimum image count when given as an int,
    or a fraction of |V| when given as a float in (0, 1] (the threshold is
    then ceil(fraction * |V|)). ``max_nodes`` caps pattern size in nodes;
    edges keep growing via cycle closures at the cap. ``max_embeddings``
    optionally truncates stored embedding arrays; supports stay exact and
    consumers re-enumerate when they need the full set.
    """

    support: float | int = 1
    max_nodes: int = 3
    strategy: Strategy = Strategy.BFS
    max_embeddings: int | None = None

    def resolve_support(self, g: MultiplexGraph) -> int:
        s = self.support
        if isinstance(s, bool):
            raise MiningError("support must be a number")
        if isinstance(s, int):
            if s < 1:
                raise MiningError(f"absolute support must be >= 1, got {s}")
            return s
        if not 0.0 < s <= 1.0:
            raise MiningError(f"fractional support must be in (0,1], got {s}")
        return max(1, math.ceil(s * g.n_nodes))

    def validate(self) -> None:
        if self.max_nodes < 1:
            raise MiningError(f"max_nodes must be >= 1, got {self.max_nodes}")


@dataclass
class MinedPattern:
    pattern: Pattern
    code: CanonicalCode
    support: int
    embeddings: np.ndarray  # (N, k), pattern-index columns, sorted rows
    n_embeddings: int  # full count even when the stored array is truncated
    orderings: tuple[tuple[int, ...], ...]  # canonical discovery orderings
    parent_code: CanonicalCode | None = None

    @property
    def complete(self) -> bool:
        return self.embeddings.shape[0] == self.n_embeddings

    def full_embeddings(self, g: MultiplexGraph) -> np.ndarray:
        if self.complete:
            return self.embeddings
        return match_array(self.pattern, g)

    def embeddings_canonical(self, g: MultiplexGraph) -> np.ndarray:
        """Embeddings with columns permuted to canonical node indexing."""
        return self.full_embeddings(g)[:, list(self.orderings[0])]


class PatternSet:
    """Mining output: insertion-ordered records keyed by canonical code."""

    def __init__(self):
        self.records: dict[CanonicalCode, MinedPattern] = {}

    def add(self, rec: MinedPattern) -> None:
        self.records[rec.code] = rec

    def get(self, code: CanonicalCode) -> MinedPattern | None:
        return self.records.get(code)

    def __contains__(self, code: CanonicalCode) -> bool:
        return code in self.records

    def __iter__(self):
        return iter(self.records.values())

    def __len__(self) -> int:
        return len(self.records)

    def dump(self) -> str:
        """One line per pattern: code, support, embedding count. Sorted."""
        lines = [
            f"{rec.code.to_string()}\t{rec.support}\t{rec.n_embeddings}"
            for rec in self.records.values()
        ]
        return "\n".join(sorted(lines)) + ("\n" if lines else "")


class RuleSink(Protocol):
    def offer(self, parent: MinedPattern, child: MinedPattern, delta: Delta) -> None: ...


def mine(g: MultiplexGraph, cfg: MiningConfig, rule_sink: RuleSink | None = None) -> PatternSet:
    """Enumerate every frequent connected pattern up to the size cap.

    Each pattern is reported once (canonical-code deduplication) with its
    exact support and embeddings. When a rule sink is given, every
    frequent single-edge (parent, child) extension is offered to it during
    the search, including extensions whose child was first reached from a
    different parent.
    """
    cfg.validate()
    sigma = cfg.resolve_support(g)
    idx = g.index()
    ps = PatternSet()
    queue: deque[MinedPattern] = deque()

    for label in sorted(set(g.attrs.values())):
        members = idx.nodes_by_label[label]
        if len(members) < sigma:
            continue
        p = single_node(label, g.directed)
        rec = MinedPattern(
            pattern=p,
            code=canonical_code(p, cfg.strategy),
            support=len(members),
            embeddings=members.reshape(-1, 1),
            n_embeddings=len(members),
            orderings=canonical_orderings(p, cfg.strategy),
        )
        ps.add(rec)
        queue.append(rec)

    while queue:
        parent = queue.popleft()
        for delta, child_pattern, child_embs in _extensions(parent, g, cfg, sigma):
            supp_c = mis_support_array(child_embs)
            if supp_c > parent.support:
                raise MiningInvariantError(
                    f"anti-monotonicity violated: child support {supp_c} > "
                    f"parent support {parent.support}"
                )
            if supp_c < sigma:
                continue
            code_c = canonical_code(child_pattern, cfg.strategy)
            rec_c = ps.get(code_c)
            if rec_c is None:
                child_embs = _sorted_rows(child_embs)
                stored = child_embs
                if cfg.max_embeddings is not None and len(stored) > cfg.max_embeddings:
                    stored = stored[: cfg.max_embeddings]
                rec_c = MinedPattern(
                    pattern=child_pattern,
                    code=code_c,
                    support=supp_c,
                    embeddings=stored,
                    n_embeddings=len(child_embs),
                    orderings=canonical_orderings(child_pattern, cfg.strategy),
                    parent_code=parent.code,
                )
                ps.add(rec_c)
                queue.append(rec_c)
            elif rec_c.support != supp_c:
                raise MiningInvariantError(
                    f"support mismatch for {code_c.to_string()}: "
                    f"{rec_c.support} vs {supp_c}"
                )
            if rule_sink is not None:
                rule_sink.offer(parent, rec_c, delta)
    return ps


def _sorted_rows(E: np.ndarray) -> np.ndarray:
    if E.shape[0] == 0:
        return E
    return E[np.lexsort(tuple(E[:, c] for c in reversed(range(E.shape[1]))))]


def _extensions(
    parent: MinedPattern, g: MultiplexGraph, cfg: MiningConfig, sigma: int = 1
) -> Iterator[tuple[Delta, Pattern, np.ndarray]]:
    """All single-edge extension candidates with nonempty embedding sets.

    Fresh-node candidates whose new-node image count provably falls below
    ``sigma`` are pruned before the expansion join is materialized; the
    bound is sound because the new column's images are a subset of the
    distinct neighbors of the anchor column's distinct images.
    """
    p = parent.pattern
    idx = g.index()
    E = parent.full_embeddings(g)
    if E.shape[0] == 0:
        return
    k = p.k
    existing = {(e.i, e.j, e.layer, e.dirbit) for e in p.edges}
    directions = (True, False) if g.directed else (True,)

    # cycle closures (including parallel edges between the same pair)
    for i in range(k):
        for j in range(i + 1, k):
            for layer in sorted(g.layers):
                for forward in directions:
                    dirbit = forward if g.directed else False
                    if (i, j, layer, dirbit) in existing:
                        continue
                    us, vs = (E[:, i], E[:, j]) if forward else (E[:, j], E[:, i])
                    mask = idx.has_pairs(us, vs, layer)
                    if not mask.any():
                        continue
                    d = Delta(i, j, layer, forward=forward if g.directed else True)
                    yield d, apply_delta(p, d), E[mask]

    # fresh-node attachments
    if k >= cfg.max_nodes:
        return
    for i in range(k):
        anchors_unique = np.unique(E[:, i])
        for layer in sorted(g.layers):
            for incoming in ((False, True) if g.directed else (False,)):
                _, cand_nbrs = idx.neighbors_flat(anchors_unique, layer, incoming)
                if cand_nbrs.size == 0:
                    continue
                cand_labels = idx.node_label[np.unique(cand_nbrs)]
                frequent_labels = {
                    int(lab) for lab in np.unique(cand_labels)
                    if int(np.sum(cand_labels == lab)) >= sigma
                }
                if not frequent_labels:
                    continue
                rows, nbrs = idx.neighbors_flat(E[:, i], layer, incoming)
                keep = np.ones(rows.size, dtype=bool)
                for c in range(k):
                    keep &= nbrs != E[rows, c]
                rows, nbrs = rows[keep], nbrs[keep]
                if rows.size == 0:
                    continue
                lab_ids = idx.node_label[nbrs]
                for lab_id in np.unique(lab_ids):
                    if int(lab_id) not in frequent_labels:
                        continue
                    label = idx.labels_list[int(lab_id)]
                    m = lab_ids == lab_id
                    child_embs = np.column_stack([E[rows[m]], nbrs[m]])
                    forward = not incoming
                    d = Delta(
                        i,
                        None,
                        layer,
                        forward=forward if g.directed else True,
                        new_label=label,
                    )
                    yield d, apply_delta(p, d), child_embs
