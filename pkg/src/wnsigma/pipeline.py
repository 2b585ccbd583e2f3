"""User-level computations: sigma, decision procedures, brute-force oracles."""

from __future__ import annotations

import itertools
import random
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

from .errors import InternalConsistencyError
from .exact_lp import check_primal_feasible_point, sigma_bounds, solve_primal, solve_sigma_lp, verify_duality
from .pullback import generalized_reduced_rank, product
from .sli import build_sli
from .um_graphs import (
    BasedGraph,
    UmGraph,
    Word,
    canonical_code,
    core,
    fold_with_map,
    free_reduce,
    load_graph,
    read_words,
    reduced_rank,
    stallings_graph,
)
from .witness import compute_witness


def ambient_m(rank: int | None = None, m: int | None = None) -> int:
    """``m`` from ``--rank n`` (m = n + 1) or a direct ``--m``."""
    if (rank is None) == (m is None):
        raise ValueError("give exactly one of rank or m")
    value = rank + 1 if rank is not None else m
    if value < 3:
        raise ValueError(f"ambient graph needs m >= 3 (rank >= 2), got m = {value}")
    return value


@dataclass
class SubgroupInput:
    m: int
    words: list[Word] | None = None
    graph: BasedGraph | None = None

    def __post_init__(self):
        if (self.words is None) == (self.graph is None):
            raise ValueError("give either generator words or a graph")
        if self.graph is not None and self.graph.graph.m != self.m:
            raise ValueError(f"graph has m = {self.graph.graph.m}, expected {self.m}")

    @classmethod
    def from_words(cls, words: Sequence[Sequence[int]], rank: int | None = None, m: int | None = None):
        return cls(ambient_m(rank, m), words=[free_reduce(w) for w in words])

    @classmethod
    def from_path(cls, path, rank: int | None = None, m: int | None = None) -> "SubgroupInput":
        """A ``.json`` graph file or a words file."""
        path = Path(path)
        if path.suffix == ".json":
            g = load_graph(path)
            if isinstance(g, UmGraph):
                g = BasedGraph(g, min(g.vertices_of_type(1), default=0))
            if rank is None and m is None:
                m = g.graph.m
            return cls(ambient_m(rank, m), graph=g)
        return cls.from_words(read_words(path), rank, m)

    def based_graph(self) -> BasedGraph:
        cached = self.__dict__.get("_based")
        if cached is None:
            if self.graph is not None:
                cached = self.graph
            else:
                cached = stallings_graph(self.words, self.m)
            self.__dict__["_based"] = cached
        return cached

    def core_graph(self) -> UmGraph:
        return core(self.based_graph().graph)

    def brr(self) -> int:
        return reduced_rank(self.core_graph())

    def noncyclic_core(self) -> UmGraph:
        """Core graph of a noncyclic subgroup; raises ValueError otherwise."""
        g = self.core_graph()
        if not g.edges:
            raise ValueError("subgroup is trivial")
        if not g.is_connected():
            raise ValueError("input graph is not connected")
        if reduced_rank(g) <= 0:
            raise ValueError("subgroup is cyclic (reduced rank 0)")
        return g


@dataclass
class SigmaReport:
    m: int
    brr: int
    sigma: Fraction
    witness: dict
    m_inq: int
    n_inq: int
    pivots: int
    primal_optimum: Fraction | None
    duality_verified: bool | None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def sigma_brr(self) -> Fraction:
        return self.sigma * self.brr

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "brr": self.brr,
            "sigma": str(self.sigma),
            "sigma_brr": str(self.sigma_brr),
            "witness": self.witness,
            "lp": {"m_inq": self.m_inq, "n_inq": self.n_inq, "pivots": self.pivots},
            "primal_optimum": None if self.primal_optimum is None else str(self.primal_optimum),
            "duality_verified": self.duality_verified,
            "timings": {k: round(v, 4) for k, v in self.timings.items()},
        }


def sigma(h: SubgroupInput, cross_check: bool = True, witness_graph: list | None = None) -> SigmaReport:
    """Walter Neumann coefficient of ``h`` with a verified witness.

    With ``cross_check`` the primal LP is also solved and duality verified.
    If ``witness_graph`` is a list, the full witness result is appended to it.
    """
    timings = {}
    t0 = time.perf_counter()
    y1 = h.noncyclic_core()
    brr1 = reduced_rank(y1)
    s = build_sli(y1)
    timings["build"] = time.perf_counter() - t0
    if not check_primal_feasible_point(s, brr1):
        raise InternalConsistencyError("known feasible point violates the system")

    t0 = time.perf_counter()
    lp = solve_sigma_lp(s, brr1)
    timings["dual"] = time.perf_counter() - t0

    primal_opt = verified = None
    if cross_check:
        t0 = time.perf_counter()
        primal = solve_primal(s, shift=2 * brr1)
        timings["primal"] = time.perf_counter() - t0
        primal_opt = primal.optimum
        verified = verify_duality(primal.optimum, lp.y, s, primal.x)
        if not verified:
            raise InternalConsistencyError("primal and dual optima disagree")

    t0 = time.perf_counter()
    w = compute_witness(y1, s, lp)
    timings["witness"] = time.perf_counter() - t0
    if not (w.connected and w.size_ok):
        raise InternalConsistencyError("witness is disconnected or exceeds the size ceiling")
    if witness_graph is not None:
        witness_graph.append(w)

    lo, hi = sigma_bounds(h.m)
    if not lo <= lp.sigma <= hi:
        raise InternalConsistencyError("sigma outside its bounds")
    return SigmaReport(
        m=h.m,
        brr=brr1,
        sigma=lp.sigma,
        witness=w.summary(),
        m_inq=s.m_inq,
        n_inq=s.n_inq,
        pivots=lp.y.pivots,
        primal_optimum=primal_opt,
        duality_verified=verified,
        timings=timings,
    )


def strongly_inert(h: SubgroupInput) -> bool:
    """``brr(H, K) <= brr(K)`` for all K, i.e. ``sigma(H) * brr(H) <= 1``."""
    report = sigma(h, cross_check=False)
    return report.sigma_brr <= 1


# ---------------------------------------------------------------------------
# compressedness


@dataclass
class Compression:
    """A quotient ``Z`` of ``Y(H)`` of smaller reduced rank, with the quotient maps."""

    source: UmGraph
    quotient: UmGraph
    vertex_map: dict[int, int]
    edge_map: dict[int, int]

    @property
    def brr(self) -> int:
        return reduced_rank(core(self.quotient))


def _identify(g: UmGraph, keep: int, drop: int) -> UmGraph:
    vertices = {v: t for v, t in g.vertices.items() if v != drop}
    edges = {
        e: (keep if s == drop else s, keep if d == drop else d, lab) for e, (s, d, lab) in g.edges.items()
    }
    return UmGraph(g.m, vertices, edges)


def find_compression(h: SubgroupInput, max_states: int | None = None) -> Compression | None:
    """Breadth-first search over quotients of ``Y(H)`` for one of smaller reduced rank.

    Moves identify two vertices of equal type and fold.  Quotients are
    memoized by canonical code.  Returns None when ``H`` is compressed.
    """
    y = h.noncyclic_core()
    target = reduced_rank(y)
    start = (y, {v: v for v in y.vertices}, {e: e for e in y.edges})
    seen = {canonical_code(y)}
    queue = deque([start])
    while queue:
        z, vmap, emap = queue.popleft()
        for t in (1, 2):
            verts = z.vertices_of_type(t)
            for a, b in itertools.combinations(verts, 2):
                folded, fv, fe = fold_with_map(_identify(z, a, b))
                code = canonical_code(folded)
                if code in seen:
                    continue
                seen.add(code)
                nv = {v: fv[a if w == b else w] for v, w in vmap.items()}
                ne = {e: fe[f] for e, f in emap.items()}
                if reduced_rank(core(folded)) < target:
                    return Compression(y, folded, nv, ne)
                queue.append((folded, nv, ne))
                if max_states is not None and len(seen) > max_states:
                    raise RuntimeError(f"search exceeded {max_states} states")
    return None


def compressed(h: SubgroupInput) -> bool:
    return find_compression(h) is None


def is_surjective_morphism(y: UmGraph, z: UmGraph, vmap: dict[int, int], emap: dict[int, int]) -> bool:
    """Label- and type-preserving graph map from ``y`` onto ``z``."""
    for v, t in y.vertices.items():
        if z.vertices.get(vmap[v]) != t:
            return False
    for e, (s, d, lab) in y.edges.items():
        if z.edges.get(emap[e]) != (vmap[s], vmap[d], lab):
            return False
    return set(vmap.values()) == set(z.vertices) and set(emap.values()) == set(z.edges)


# ---------------------------------------------------------------------------
# brute-force oracle


def _partial_injections(n1: int, n2: int) -> list[tuple[tuple[int, int], ...]]:
    out = []
    for size in range(min(n1, n2) + 1):
        for src in itertools.combinations(range(n1), size):
            for dst in itertools.permutations(range(n2), size):
                out.append(tuple(zip(src, dst)))
    return out


def enumerate_core_graphs(
    m: int,
    max_vertices: int,
    connected: bool = True,
    positive_rank: bool = True,
    max_edges: int | None = None,
) -> Iterator[UmGraph]:
    """Immersed core U_m-graphs with at most ``max_vertices`` vertices, one per isomorphism class.

    By default only connected graphs of positive reduced rank are produced.
    """
    seen = set()
    for total in range(2, max_vertices + 1):
        for n1 in range(1, total):
            n2 = total - n1
            matchings = _partial_injections(n1, n2)
            vertices = {i: 1 for i in range(n1)}
            vertices.update({n1 + i: 2 for i in range(n2)})
            for choice in itertools.product(matchings, repeat=m):
                n_edges = sum(len(c) for c in choice)
                if n_edges < total or (positive_rank and n_edges == total):
                    continue
                if max_edges is not None and n_edges > max_edges:
                    continue
                deg = [0] * total
                edges = {}
                for lab, pairs in enumerate(choice, start=1):
                    for a, b in pairs:
                        edges[len(edges)] = (a, n1 + b, lab)
                        deg[a] += 1
                        deg[n1 + b] += 1
                if min(deg) < 2:
                    continue
                g = UmGraph(m, vertices, edges)
                if connected and not g.is_connected():
                    continue
                if positive_rank and any(
                    (sub := g.subgraph(c)).n_edges <= sub.n_vertices for c in g.components()
                ):
                    continue
                code = canonical_code(g)
                if code not in seen:
                    seen.add(code)
                    yield g


@dataclass
class OracleReport:
    max_ratio: Fraction
    graph: UmGraph | None
    max_vertices: int
    candidates: int
    # heuristic only: best based-intersection ratio seen, not the Hanna Neumann coefficient
    hn_lower_bound: Fraction
    hn_graph: UmGraph | None = None

    def to_dict(self) -> dict:
        return {
            "max_ratio": str(self.max_ratio),
            "max_vertices": self.max_vertices,
            "candidates": self.candidates,
            "attaining_graph": None if self.graph is None else self.graph.to_dict(),
            "hn_lower_bound_heuristic": str(self.hn_lower_bound),
        }


def _based_component_brr(y1: UmGraph, y2: UmGraph, b1: int, b2: int, prod=None) -> int:
    p = prod or product(y1, y2)
    w = p.vertex_of(b1, b2)
    if w is None:
        return 0
    comp = next(c for c in p.graph.components() if w in c)
    c = core(p.graph.subgraph(comp))
    return c.n_edges - c.n_vertices if c.edges else 0


def oracle_enumerate(y1: UmGraph, max_vertices: int, base: int | None = None) -> OracleReport:
    """Max of ``brr(core(Y1 x Y2)) / (brr(Y1) brr(Y2))`` over small connected cores ``Y2``.

    This is a lower bound for sigma.  The report also carries a heuristic
    lower bound for ``sup brr(H ∩ K) / (brr(H) brr(K))`` using the pullback
    component through the base pair.
    """
    if max_vertices < 2:
        raise ValueError("max_vertices must be at least 2")
    brr1 = reduced_rank(y1)
    if brr1 <= 0:
        raise ValueError("Y1 must have positive reduced rank")
    b1 = base if base is not None else min(y1.vertices_of_type(1))
    best, best_g = Fraction(-1), None
    hn, hn_g = Fraction(0), None
    count = 0
    for y2 in enumerate_core_graphs(y1.m, max_vertices):
        count += 1
        brr2 = reduced_rank(y2)
        p = product(y1, y2)
        c = core(p.graph)
        ratio = Fraction(c.n_edges - c.n_vertices, brr1 * brr2)
        if ratio > best:
            best, best_g = ratio, y2
        for b2 in y2.vertices_of_type(1):
            r = Fraction(_based_component_brr(y1, y2, b1, b2, p), brr1 * brr2)
            if r > hn:
                hn, hn_g = r, y2
    return OracleReport(max(best, Fraction(0)), best_g, max_vertices, count, hn, hn_g)


# ---------------------------------------------------------------------------
# strengthened Hanna Neumann checks


@dataclass
class ShncReport:
    brr12: int
    brr1: int
    brr2: int

    @property
    def product(self) -> int:
        return self.brr1 * self.brr2

    @property
    def shnc_ok(self) -> bool:
        return self.brr12 <= self.product

    @property
    def weak_ok(self) -> bool:
        return self.brr12 <= 2 * self.product

    def to_dict(self) -> dict:
        return {
            "brr12": self.brr12,
            "brr1": self.brr1,
            "brr2": self.brr2,
            "product": self.product,
            "shnc_ok": self.shnc_ok,
            "weak_ok": self.weak_ok,
        }


def shnc_check(h1: SubgroupInput, h2: SubgroupInput) -> ShncReport:
    if h1.m != h2.m:
        raise ValueError(f"mismatched m: {h1.m} vs {h2.m}")
    g1, g2 = h1.core_graph(), h2.core_graph()
    return ShncReport(generalized_reduced_rank(g1, g2), reduced_rank(g1), reduced_rank(g2))


def random_words(rng: random.Random, rank: int, n_words: int, max_len: int) -> list[Word]:
    letters = [x for i in range(1, rank + 1) for x in (i, -i)]
    out = []
    while len(out) < n_words:
        w = free_reduce(rng.choice(letters) for _ in range(rng.randint(1, max_len)))
        if w:
            out.append(w)
    return out


def random_subgroup(
    rng: random.Random,
    rank: int,
    n_words: tuple[int, int] = (2, 3),
    max_len: int = 4,
    max_edges: int | None = None,
    noncyclic: bool = True,
) -> SubgroupInput:
    """Rejection-sample a subgroup of ``F_rank`` from random generator words."""
    while True:
        h = SubgroupInput.from_words(random_words(rng, rank, rng.randint(*n_words), max_len), rank=rank)
        g = h.core_graph()
        if max_edges is not None and g.n_edges > max_edges:
            continue
        if noncyclic and (not g.edges or reduced_rank(g) <= 0):
            continue
        return h
