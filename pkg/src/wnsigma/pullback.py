"""Fiber products of U_m-graphs and generalized intersection ranks."""

from __future__ import annotations

from dataclasses import dataclass, field

from .um_graphs import (
    BasedGraph,
    UmGraph,
    Word,
    core,
    free_reduce,
    inverse,
    loop_to_word,
    spanning_paths,
)


@dataclass(frozen=True)
class ProductGraph:
    """A subgraph of ``Y1 x Y2`` with its two projections.

    ``vertex_pairs[w] = (v1, v2)`` and ``edge_pairs[f] = (e1, e2)`` give the
    projections of product vertex ``w`` and product edge ``f``.
    """

    graph: UmGraph
    vertex_pairs: dict[int, tuple[int, int]]
    edge_pairs: dict[int, tuple[int, int]]
    left: UmGraph
    right: UmGraph

    def restrict(self, graph: UmGraph) -> "ProductGraph":
        return ProductGraph(
            graph,
            {w: self.vertex_pairs[w] for w in graph.vertices},
            {f: self.edge_pairs[f] for f in graph.edges},
            self.left,
            self.right,
        )

    def preimage_right(self) -> dict[int, set[int]]:
        """Edge id of ``right`` -> set of ``left`` edges paired with it."""
        out: dict[int, set[int]] = {e: set() for e in self.right.edges}
        for e1, e2 in self.edge_pairs.values():
            out[e2].add(e1)
        return out

    def vertex_of(self, v1: int, v2: int) -> int | None:
        index = self.__dict__.get("_pair_index")
        if index is None:
            index = {p: w for w, p in self.vertex_pairs.items()}
            object.__setattr__(self, "_pair_index", index)
        return index.get((v1, v2))


@dataclass
class ComponentReport:
    component_id: int
    brr: int
    n_vertices: int
    n_edges: int
    basepoint: tuple[int, int]
    coset_word: Word | None = None
    vertices: list[int] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "component": self.component_id,
            "brr": self.brr,
            "vertices": self.n_vertices,
            "edges": self.n_edges,
            "basepoint": list(self.basepoint),
            "coset_word": None if self.coset_word is None else list(self.coset_word),
        }


def product(y1: UmGraph, y2: UmGraph) -> ProductGraph:
    """The full pullback ``Y1 x_U Y2``: type-matched vertex pairs, label-matched edge pairs."""
    if y1.m != y2.m:
        raise ValueError(f"mismatched m: {y1.m} vs {y2.m}")
    pairs = sorted((v1, v2) for v1, t1 in y1.vertices.items() for v2, t2 in y2.vertices.items() if t1 == t2)
    vid = {p: i for i, p in enumerate(pairs)}
    by_label2: dict[int, list[int]] = {}
    for e2 in sorted(y2.edges):
        by_label2.setdefault(y2.edges[e2][2], []).append(e2)
    edges = {}
    edge_pairs = {}
    for e1 in sorted(y1.edges):
        s1, d1, lab = y1.edges[e1]
        for e2 in by_label2.get(lab, ()):
            s2, d2, _ = y2.edges[e2]
            f = len(edges)
            edges[f] = (vid[(s1, s2)], vid[(d1, d2)], lab)
            edge_pairs[f] = (e1, e2)
    graph = UmGraph(y1.m, {vid[p]: y1.vertices[p[0]] for p in pairs}, edges)
    return ProductGraph(graph, {vid[p]: p for p in pairs}, edge_pairs, y1, y2)


def pullback_core(y1: UmGraph, y2: UmGraph) -> ProductGraph:
    full = product(y1, y2)
    return full.restrict(core(full.graph))


def image_subgraph(y1: UmGraph, y2: UmGraph) -> UmGraph:
    """The part of ``Y2`` covered by ``core(Y1 x Y2)``.

    Dropping the rest leaves the pullback core unchanged and makes the
    projection onto ``Y2`` surjective.
    """
    p = pullback_core(y1, y2)
    keep_e = {e2 for _, e2 in p.edge_pairs.values()}
    keep_v = {v2 for _, v2 in p.vertex_pairs.values()}
    return UmGraph(
        y2.m,
        {v: t for v, t in y2.vertices.items() if v in keep_v},
        {e: r for e, r in y2.edges.items() if e in keep_e},
    )


def has_property_b(y1: UmGraph, y2: UmGraph) -> bool:
    """Pullback core projects onto ``Y2`` and ``Y2`` has positive reduced rank."""
    img = image_subgraph(y1, y2)
    return (
        img.n_vertices == y2.n_vertices
        and img.n_edges == y2.n_edges
        and y2.n_edges - y2.n_vertices > 0
    )


def components(p: ProductGraph) -> list[ComponentReport]:
    reports = []
    for idx, comp in enumerate(p.graph.components()):
        sub = p.graph.subgraph(comp)
        brr = max(sub.n_edges - sub.n_vertices, 0)
        ones = [w for w in comp if p.graph.vertices[w] == 1] or comp
        reports.append(
            ComponentReport(idx, brr, sub.n_vertices, sub.n_edges, p.vertex_pairs[ones[0]], vertices=comp)
        )
    return reports


def generalized_reduced_rank(y1: UmGraph, y2: UmGraph) -> int:
    """Sum of reduced ranks of the components of ``core(Y1 x Y2)``."""
    return sum(c.brr for c in components(pullback_core(y1, y2)))


def component_reports(h1: BasedGraph, h2: BasedGraph) -> list[ComponentReport]:
    """Components of the pullback core, each with a double coset representative.

    For a component containing ``(v1, v2)`` with ``v1``, ``v2`` reached from
    the bases by words ``w1``, ``w2``, the representative is ``t = w1 w2^-1``
    and ``H1 ∩ t H2 t^-1`` is conjugate (by ``w1``) to the component's
    fundamental group.  The pair minimizing ``|w1| + |w2|`` is chosen, so a
    component through the base pair gets the empty word.
    """
    m = h1.graph.m
    p = pullback_core(h1.graph, h2.graph)
    paths1 = spanning_paths(h1.graph, h1.base)
    paths2 = spanning_paths(h2.graph, h2.base)
    reports = components(p)
    for rep in reports:
        candidates = []
        for w in rep.vertices:
            if p.graph.vertices[w] != 1:
                continue
            v1, v2 = p.vertex_pairs[w]
            if v1 in paths1 and v2 in paths2:
                candidates.append((len(paths1[v1]) + len(paths2[v2]), (v1, v2)))
        if not candidates:
            continue
        _, (v1, v2) = min(candidates)
        rep.basepoint = (v1, v2)
        w1 = loop_to_word(paths1[v1], m)
        w2 = loop_to_word(paths2[v2], m)
        rep.coset_word = free_reduce(w1 + inverse(w2))
    return reports


def double_coset_reps(h1: BasedGraph, h2: BasedGraph, include_cyclic: bool = False) -> list[Word]:
    """Representatives ``t`` with ``H1 ∩ t H2 t^-1`` noncyclic (or nontrivial with ``include_cyclic``)."""
    return [
        r.coset_word
        for r in component_reports(h1, h2)
        if r.coset_word is not None and (include_cyclic or r.brr > 0)
    ]
