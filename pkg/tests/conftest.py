import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from plexmine.graph import MultiplexGraph
from plexmine.pattern import Pattern, PatternEdge


@pytest.fixture
def image_table_graph() -> MultiplexGraph:
    """The worked minimum-image-support example.

    A single-layer undirected graph whose X-Y-Z-X chain pattern occurs
    exactly four times (1-3-6-8, 1-3-6-9, 8-5-2-1, 9-7-4-1) while every
    chain position is played by only three distinct nodes, so the pattern
    has support 3.
    """
    edges = [(8, 5), (5, 2), (2, 1), (1, 3), (3, 6), (6, 8), (6, 9), (9, 7),
             (7, 4), (4, 1)]
    labels = {1: "X", 8: "X", 9: "X", 3: "Y", 5: "Y", 7: "Y", 2: "Z", 4: "Z",
              6: "Z"}
    return MultiplexGraph(range(1, 10), [(u, v, 0) for u, v in edges],
                          attrs=labels, directed=False)


@pytest.fixture
def chain_pattern() -> Pattern:
    return Pattern(False, ("X", "Y", "Z", "X"),
                   (PatternEdge(0, 1, 0, False), PatternEdge(1, 2, 0, False),
                    PatternEdge(2, 3, 0, False)))
