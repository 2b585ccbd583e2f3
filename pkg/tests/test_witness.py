import math
import random
from fractions import Fraction
from types import SimpleNamespace

import pytest

from conftest import double_cover_u3, property_b_pairs, squares_subgroup, words
from oracles import brute_pullback_brr, isomorphic
from wnsigma.errors import InternalConsistencyError
from wnsigma.exact_lp import SigmaLp, solve_sigma_lp
from wnsigma.pullback import generalized_reduced_rank
from wnsigma.sli import XS, AdmissibleTuple, IneqMultiset, build_sli, inq_multiset, lhs_sum, rhs_sum
from wnsigma.um_graphs import ambient_graph, core, disjoint_union, reduced_rank, stallings_graph
from wnsigma.witness import (
    check_extremal,
    compute_witness,
    is_balanced,
    multiset_from_vertex,
    realize,
    scale_of,
    size_ceiling_ok,
    sol,
)


def _full(s, side):
    return s.index_of(AdmissibleTuple(side, tuple(frozenset({j}) for j in range(s.m))))


@pytest.fixture
def s3():
    return build_sli(ambient_graph(3))


def test_sol_examples(s3):
    q = IneqMultiset({_full(s3, 1): 1, _full(s3, 2): 1})
    y = sol(q, s3)
    assert y[_full(s3, 1)] == y[_full(s3, 2)] == Fraction(1, 2)
    assert sum(y) == 1
    assert sol(q.scaled(2), s3) == y
    k2 = [i for i, ineq in enumerate(s3.inequalities) if ineq.k == 2]
    with pytest.raises(ValueError):
        sol(IneqMultiset({k2[0]: 1, k2[1]: 1}), s3)


def test_multiset_from_vertex_examples():
    L, q = multiset_from_vertex([Fraction(1, 2), Fraction(1, 2), Fraction(0)])
    assert L == 2 and q.counts == {0: 1, 1: 1}
    L, q = multiset_from_vertex([Fraction(2), Fraction(0), Fraction(1)])
    assert L == 1 and q.counts == {0: 2, 2: 1}
    L, q = multiset_from_vertex([Fraction(1, 3), Fraction(1, 6)])
    assert L == 6 and q.counts == {0: 2, 1: 1}
    with pytest.raises(ValueError):
        multiset_from_vertex([Fraction(0), Fraction(0)])


def test_realize_u3(s3):
    q = IneqMultiset({_full(s3, 1): 1, _full(s3, 2): 1})
    g = realize(q, s3)
    assert isomorphic(g, ambient_graph(3))
    assert inq_multiset(s3, g) == q


def test_realize_doubled_u3(s3):
    q = IneqMultiset({_full(s3, 1): 2, _full(s3, 2): 2})
    g = realize(q, s3)
    assert g.n_vertices == 4 and g.is_immersed() and core(g) == g
    assert inq_multiset(s3, g) == q


def test_realize_rejects_unbalanced(s3):
    with pytest.raises(ValueError):
        realize(IneqMultiset({_full(s3, 1): 2, _full(s3, 2): 1}), s3)
    assert not is_balanced(IneqMultiset({_full(s3, 1): 1}), s3)


def test_compute_witness_u3():
    w = compute_witness(ambient_graph(3))
    assert w.sigma == 1 and w.L == 2
    assert isomorphic(w.graph, ambient_graph(3))
    assert w.sigma_check and w.connected and w.size_ok and w.vertex_ok
    assert sol(w.Q, w.system) == w.lp.y.values


@pytest.mark.parametrize("m", [3, 4, 5])
def test_compute_witness_ambient(m):
    w = compute_witness(ambient_graph(m))
    assert w.sigma == Fraction(1, m - 2)
    assert w.sigma_check and w.connected and w.size_ok
    # recomputed independently of the package pullback
    assert brute_pullback_brr(ambient_graph(m), w.graph) == w.sigma * (m - 2) * reduced_rank(w.graph)


def test_compute_witness_squares():
    y1 = squares_subgroup().core_graph()
    w = compute_witness(y1)
    assert w.sigma == 1
    brr2 = reduced_rank(w.graph)
    assert generalized_reduced_rank(y1, w.graph) == 2 * brr2
    assert brute_pullback_brr(y1, w.graph) == 2 * brr2
    assert w.connected and w.size_ok and w.vertex_ok


def test_round_trips():
    for graph in (ambient_graph(4), squares_subgroup().core_graph(), double_cover_u3()):
        s = build_sli(graph)
        res = solve_sigma_lp(s, reduced_rank(graph))
        L, q = multiset_from_vertex(res.y)
        assert sol(q, s) == res.y.values
        assert math.gcd(*q.counts.values()) == 1
        L2, q2 = multiset_from_vertex(sol(q, s))
        assert q2 == q
        assert scale_of(q, s) > 0
        assert lhs_sum(s, q) == {XS: -scale_of(q, s)}


def test_extremality_is_pairing_independent():
    cases = [
        ambient_graph(4),
        squares_subgroup().core_graph(),
        double_cover_u3(),
        stallings_graph(words("x1 x2", "x2 x3^-1", "x1^2"), 4).graph,
    ]
    rng = random.Random(17)
    for y1 in cases:
        w = compute_witness(y1)
        for _ in range(8):
            g = realize(w.Q, w.system, rng)
            assert g.is_immersed() and core(g) == g
            assert g.is_connected()
            assert check_extremal(y1, g, w.sigma)


def test_objective_identity_on_property_b_pairs():
    for y1, y2 in property_b_pairs(seed=23, n=30):
        s = build_sli(y1)
        q = inq_multiset(s, y2)
        y = sol(q, s)
        value = sum(yi * ineq.rhs for yi, ineq in zip(y, s.inequalities))
        assert value == Fraction(-generalized_reduced_rank(y1, y2), reduced_rank(y2))
        # and therefore never better than the LP optimum
        assert value >= solve_sigma_lp(s, reduced_rank(y1)).optimum


def test_realized_multiset_can_differ_under_deck_symmetry():
    """A realized graph may carry extra pullback components.

    The double cover D of U_3 has a deck swap, so core(D x D) has a second
    component next to the diagonal.  Realizing the diagonal multiset gives
    D back, yet D's own multiset has doubled preimages.  The pullback only
    grows, so the ratio can only go up.
    """
    d = double_cover_u3()
    s = build_sli(d)
    diag = IneqMultiset({s.index_of(AdmissibleTuple(d.vertices[u], _star_sets(d, u))): 1 for u in d.vertices})
    g = realize(diag, s)
    assert isomorphic(g, d)
    assert inq_multiset(s, g) != diag
    predicted = -rhs_sum(s, diag) * reduced_rank(g) // scale_of(diag, s)
    assert generalized_reduced_rank(d, g) == 4 > predicted == 2


def _star_sets(g, u):
    sets = [frozenset()] * g.m
    for e in g.star(u):
        sets[g.edges[e][2] - 1] = frozenset({e})
    return tuple(sets)


def test_size_ceiling():
    u3 = ambient_graph(3)
    assert size_ceiling_ok(u3, u3)
    # for Y1 = U_3 the bound is log2 |E Y2| < 2^(6/4 + 2 log2 3), about 25.4
    assert size_ceiling_ok(u3, SimpleNamespace(n_edges=1, n_oriented_edges=2**25))
    assert not size_ceiling_ok(u3, SimpleNamespace(n_edges=1, n_oriented_edges=2**26))


def test_compute_witness_rejects_bad_input():
    with pytest.raises(ValueError):
        compute_witness(disjoint_union(ambient_graph(3), ambient_graph(3)))


def test_wrong_sigma_is_an_internal_error():
    u4 = ambient_graph(4)
    s = build_sli(u4)
    res = solve_sigma_lp(s, 2)
    doctored = SigmaLp(res.optimum, Fraction(1), res.y)
    with pytest.raises(InternalConsistencyError):
        compute_witness(u4, s, doctored)
