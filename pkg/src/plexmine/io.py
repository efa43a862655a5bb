"""Edge-list / attribute file parsing and canonical serialization.

File formats (UTF-8, TAB-separated, ``#`` comments):
    edge file:          u <TAB> v <TAB> layer
    attribute file:     node <TAB> label
    temporal edge file: u <TAB> v <TAB> layer <TAB> t      (integer t)

Node and layer identifiers in files are arbitrary strings; the loader
remaps nodes to dense 0..n-1 ids (numeric sort when every id parses as an
integer, lexicographic otherwise) and keeps the original names in a
sidecar table. Layers are numbered by sorted name.
"""

from __future__ import annotations

import os
from typing import Iterable

from .graph import MultiplexGraph, TemporalMultiplexGraph


class ParseError(ValueError):
    """Malformed input file; carries path and line number."""

    def __init__(self, path: str, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path = path
        self.lineno = lineno


def _rows(path: str, n_fields: int) -> Iterable[tuple[int, list[str]]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != n_fields:
                raise ParseError(path, lineno, f"expected {n_fields} fields, got {len(parts)}")
            yield lineno, parts


def _dense_ids(names: set[str]) -> dict[str, int]:
    try:
        ordered = sorted(names, key=lambda s: (0, int(s)))
    except ValueError:
        ordered = sorted(names)
    return {name: i for i, name in enumerate(ordered)}


def load_multiplex(
    edge_path: str, attr_path: str | None = None, directed: bool = False
) -> MultiplexGraph:
    """Load a multiplex graph; drops loops and collapses duplicate triples."""
    raw = []
    node_names: set[str] = set()
    layer_names: set[str] = set()
    for lineno, (u, v, l) in _rows(edge_path, 3):
        raw.append((u, v, l))
        node_names.update((u, v))
        layer_names.add(l)
    nid = _dense_ids(node_names)
    lid = {name: i for i, name in enumerate(sorted(layer_names))}
    edges = {(nid[u], nid[v], lid[l]) for u, v, l in raw if u != v}
    attrs = _load_attrs(attr_path, nid) if attr_path else {}
    return MultiplexGraph(
        nodes=range(len(nid)),
        edges=edges,
        attrs=attrs,
        directed=directed,
        layers=range(len(lid)),
        layer_names={i: name for name, i in lid.items()},
        node_names={i: name for name, i in nid.items()},
    )


def _load_attrs(path: str, nid: dict[str, int]) -> dict[int, str]:
    attrs: dict[int, str] = {}
    for lineno, (node, label) in _rows(path, 2):
        if node not in nid:
            raise ParseError(path, lineno, f"attribute references unknown node {node!r}")
        attrs[nid[node]] = label
    return attrs


def load_temporal(
    edge_path: str, attr_path: str | None = None, directed: bool = False
) -> TemporalMultiplexGraph:
    """Load a temporal edge file. Duplicate triples keep the earliest time."""
    raw: list[tuple[str, str, str, int]] = []
    node_names: set[str] = set()
    layer_names: set[str] = set()
    for lineno, (u, v, l, t) in _rows(edge_path, 4):
        try:
            ti = int(t)
        except ValueError:
            raise ParseError(edge_path, lineno, f"non-integer timestamp {t!r}") from None
        raw.append((u, v, l, ti))
        node_names.update((u, v))
        layer_names.add(l)
    nid = _dense_ids(node_names)
    lid = {name: i for i, name in enumerate(sorted(layer_names))}
    times: dict[tuple[int, int, int], int] = {}
    for u, v, l, t in raw:
        if u == v:
            continue
        a, b = nid[u], nid[v]
        if not directed and a > b:
            a, b = b, a
        key = (a, b, lid[l])
        times[key] = min(times.get(key, t), t)
    attrs = _load_attrs(attr_path, nid) if attr_path else {}
    base = MultiplexGraph(
        nodes=range(len(nid)),
        edges=times.keys(),
        attrs=attrs,
        directed=directed,
        layers=range(len(lid)),
        layer_names={i: name for name, i in lid.items()},
        node_names={i: name for name, i in nid.items()},
    )
    node_times = {}
    for (u, v, _), t in times.items():
        for n in (u, v):
            node_times[n] = min(node_times.get(n, t), t)
    return TemporalMultiplexGraph(base=base, edge_times=times, node_times=node_times)


def canonical_edge_text(g: MultiplexGraph) -> str:
    """Canonical serialization: one edge per line, sorted by (layer, u, v)."""
    lines = []
    for u, v, l in sorted(g.edges, key=lambda e: (e[2], e[0], e[1])):
        lines.append(f"{g.node_names[u]}\t{g.node_names[v]}\t{g.layer_names[l]}")
    return "\n".join(lines) + ("\n" if lines else "")


def canonical_attr_text(g: MultiplexGraph) -> str:
    lines = [f"{g.node_names[n]}\t{g.attrs[n]}" for n in sorted(g.nodes)]
    return "\n".join(lines) + ("\n" if lines else "")


def save_multiplex(g: MultiplexGraph, edge_path: str, attr_path: str | None = None) -> None:
    with open(edge_path, "w", encoding="utf-8") as fh:
        fh.write(canonical_edge_text(g))
    if attr_path:
        with open(attr_path, "w", encoding="utf-8") as fh:
            fh.write(canonical_attr_text(g))


def dataset_paths(name: str, data_dir: str | None = None) -> tuple[str, str | None]:
    """Resolve data/<name>.edges (+ optional .attrs) under a data directory.

    The directory defaults to $PLEXMINE_DATA_DIR, falling back to ./data.
    Raises FileNotFoundError when the edge file is absent.
    """
    root = data_dir or os.environ.get("PLEXMINE_DATA_DIR", "data")
    edge = os.path.join(root, f"{name}.edges")
    attr = os.path.join(root, f"{name}.attrs")
    if not os.path.exists(edge):
        raise FileNotFoundError(edge)
    return edge, (attr if os.path.exists(attr) else None)
