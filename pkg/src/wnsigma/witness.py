"""From a dual vertex solution back to an extremal subgroup graph.

A multiset ``Q`` of inequalities whose left-hand sides sum to ``-C x_s`` is
realized as a graph with one vertex per inequality instance: every ``-x_{j,B}``
slot (side-1 instance) is joined to a ``+x_{j,B}`` slot (side-2 instance) by
an ``a_j``-edge.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InternalConsistencyError
from .exact_lp import SigmaLp, VertexSolution, solve_sigma_lp, support_is_independent
from .pullback import generalized_reduced_rank
from .sli import XS, IneqMultiset, SliSystem, build_sli, lhs_sum
from .um_graphs import UmGraph, reduced_rank

__all__ = [
    "IneqMultiset",
    "WitnessResult",
    "compute_witness",
    "multiset_from_vertex",
    "realize",
    "size_ceiling_ok",
    "sol",
]


def scale_of(q: IneqMultiset, s: SliSystem) -> int:
    """``C(Q) = sum (k_i - 2) l_i``."""
    return sum(c * (s.inequalities[i].k - 2) for i, c in q.counts.items())


def sol(q: IneqMultiset, s: SliSystem) -> list[Fraction]:
    c = scale_of(q, s)
    if c <= 0:
        raise ValueError("degenerate multiset: C(Q) = 0")
    y = [Fraction(0)] * s.m_inq
    for i, n in q.counts.items():
        y[i] = Fraction(n, c)
    return y


def multiset_from_vertex(y: VertexSolution | list[Fraction]) -> tuple[int, IneqMultiset]:
    values = y.values if isinstance(y, VertexSolution) else y
    positive = [v for v in values if v]
    if not positive:
        raise ValueError("zero vector")
    if any(v < 0 for v in values):
        raise ValueError("negative component")
    lcm = math.lcm(*(v.denominator for v in positive))
    counts = {i: int(v * lcm) for i, v in enumerate(values) if v}
    return lcm, IneqMultiset(counts)


def is_balanced(q: IneqMultiset, s: SliSystem) -> bool:
    total = lhs_sum(s, q)
    return set(total) <= {XS} and total.get(XS, 0) < 0


def realize(q: IneqMultiset, s: SliSystem, rng: random.Random | None = None) -> UmGraph:
    """Graph whose vertices are the instances of ``Q``.

    Instances are numbered in (inequality index, copy) order.  For each
    variable the n-th negative slot is paired with the n-th positive slot,
    unless ``rng`` is given, in which case the pairing is random.
    """
    if not is_balanced(q, s):
        raise ValueError("multiset is not balanced: the x_{j,B} terms do not cancel")
    vertices = {}
    neg: dict = {}
    pos: dict = {}
    for i, count in q.counts.items():
        ineq = s.inequalities[i]
        for _ in range(count):
            u = len(vertices)
            vertices[u] = ineq.side
            for v in ineq.x_vars():
                (neg if ineq.coeffs[v] < 0 else pos).setdefault(v, []).append(u)
    edges = {}
    for v in sorted(neg):
        tails, heads = neg[v], list(pos.get(v, []))
        if len(tails) != len(heads):
            raise ValueError(f"unbalanced variable {v.name}")
        if rng is not None:
            rng.shuffle(heads)
        for a, b in zip(tails, heads):
            edges[len(edges)] = (a, b, v.j)
    return UmGraph(s.m, vertices, edges)


def size_ceiling_ok(y1: UmGraph, y2: UmGraph) -> bool:
    """``|E Y2| < 2^(2^(|E Y1|/4 + 2 log2 m))`` with oriented edge counts."""
    if y2.n_edges == 0:
        return True
    exponent = y1.n_oriented_edges / 4 + 2 * math.log2(y1.m)
    return math.log2(y2.n_oriented_edges) < 2.0**exponent


@dataclass
class WitnessResult:
    sigma: Fraction
    L: int
    Q: IneqMultiset
    graph: UmGraph
    sigma_check: bool
    connected: bool
    size_ok: bool
    vertex_ok: bool
    lp: SigmaLp
    system: SliSystem

    @property
    def brr(self) -> int:
        return reduced_rank(self.graph)

    def summary(self) -> dict:
        return {
            "sigma": str(self.sigma),
            "L": self.L,
            "instances": len(self.Q),
            "witness_vertices": self.graph.n_vertices,
            "witness_edges": self.graph.n_edges,
            "witness_brr": self.brr,
            "sigma_check": self.sigma_check,
            "connected": self.connected,
            "size_ok": self.size_ok,
            "vertex_ok": self.vertex_ok,
        }


def check_extremal(y1: UmGraph, y2: UmGraph, sigma: Fraction) -> bool:
    """``brr(core(Y1 x Y2)) == sigma * brr(Y1) * brr(Y2)``, recomputed from the pullback."""
    return generalized_reduced_rank(y1, y2) == sigma * reduced_rank(y1) * reduced_rank(y2)


def compute_witness(
    y1: UmGraph, system: SliSystem | None = None, lp: SigmaLp | None = None
) -> WitnessResult:
    brr1 = reduced_rank(y1)
    if not y1.is_connected():
        raise ValueError("Y1 must be connected")
    s = system if system is not None else build_sli(y1)
    res = lp if lp is not None else solve_sigma_lp(s, brr1)
    L, q = multiset_from_vertex(res.y)
    if sol(q, s) != res.y.values:
        raise InternalConsistencyError("sol(Q) does not reproduce the vertex solution")
    y2 = realize(q, s)
    result = WitnessResult(
        sigma=res.sigma,
        L=L,
        Q=q,
        graph=y2,
        sigma_check=check_extremal(y1, y2, res.sigma),
        connected=y2.is_connected(),
        size_ok=size_ceiling_ok(y1, y2),
        vertex_ok=support_is_independent(res.y, s),
        lp=res,
        system=s,
    )
    if not result.sigma_check:
        raise InternalConsistencyError("witness does not attain sigma")
    return result
