"""Covers and colourings of weighted graphs with certified weak-diameter bounds."""

from .cover import (ColoredPartition, Cover, coloring_to_cover, cover_to_coloring, r_multiplicity,
                    verify_coloring, verify_cover)
from .metric import WeightedGraph, read_graph, write_graph

__all__ = [
    "ColoredPartition", "Cover", "WeightedGraph", "coloring_to_cover", "cover_to_coloring",
    "r_multiplicity", "read_graph", "verify_coloring", "verify_cover", "write_graph",
]
__version__ = "0.1.0"
