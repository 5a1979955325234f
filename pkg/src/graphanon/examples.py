"""Small fixed graphs used by the demos and tests."""

from .graph import Graph

# 9 nodes: hub 4 sits on a triangle with two pendant leaves, bridge 3 joins
# it to the path 3-6-1; a second cluster hangs off node 0.
MERGING_EXAMPLE_EDGES = ((0, 2), (0, 4), (0, 5), (1, 6), (3, 4), (3, 6), (4, 7), (4, 8), (7, 8))
MERGING_EXAMPLE_HUB = 4
MERGING_EXAMPLE_BRIDGE = 3


def merging_example() -> Graph:
    """Seven plain nodes, one hub and one bridge; k=2 restricted clustering
    yields supernodes of 2, 2 and 3 nodes."""
    return Graph.from_edges(9, MERGING_EXAMPLE_EDGES)
