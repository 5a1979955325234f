"""Restricted and unrestricted k-anonymization of undirected graphs."""

__version__ = "0.1.0"

from .graph import Graph, load_edge_list, write_edge_list  # noqa: E402
