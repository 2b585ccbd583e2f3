"""Exact Walter Neumann coefficients of subgroups of free groups via linear programming."""

from .pipeline import SubgroupInput, compressed, oracle_enumerate, shnc_check, sigma, strongly_inert
from .um_graphs import BasedGraph, UmGraph, ambient_graph, core, reduced_rank, stallings_graph

__all__ = [
    "BasedGraph",
    "SubgroupInput",
    "UmGraph",
    "ambient_graph",
    "compressed",
    "core",
    "oracle_enumerate",
    "reduced_rank",
    "shnc_check",
    "sigma",
    "stallings_graph",
    "strongly_inert",
]
