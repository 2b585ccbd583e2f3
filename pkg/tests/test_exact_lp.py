import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import double_cover_u3, squares_subgroup
from oracles import brute_lp_min
from wnsigma.errors import InternalConsistencyError
from wnsigma.exact_lp import (
    Infeasible,
    LpStandard,
    Unbounded,
    VertexSolution,
    check_primal_feasible_point,
    dual_feasible,
    dual_of_sli,
    rank_of,
    simplex_solve,
    solution_json,
    solve_primal,
    solve_sigma_lp,
    support_is_independent,
    verify_duality,
)
from wnsigma.sli import XS, AdmissibleTuple, Inequality, SliSystem, build_sli
from wnsigma.um_graphs import ambient_graph, reduced_rank


def test_simplex_examples():
    sol = simplex_solve(LpStandard.from_dense([[1, 1]], [1], [1, 2]))
    assert sol.objective == 1 and sol.values == [1, 0]
    with pytest.raises(Infeasible):
        simplex_solve(LpStandard.from_dense([[1]], [-1], [1]))
    with pytest.raises(Unbounded):
        simplex_solve(LpStandard.from_dense([[0]], [0], [-1]))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        LpStandard.from_dense([[1, 1]], [1], [1])
    with pytest.raises(ValueError):
        LpStandard(2, [{0: Fraction(1)}], [Fraction(1), Fraction(2)], {})
    with pytest.raises(ValueError):
        LpStandard(2, [{5: Fraction(1)}], [Fraction(1)], {})


def test_redundant_rows_and_degeneracy():
    # duplicated equality rows, degenerate start
    lp = LpStandard.from_dense([[1, 1, 0], [1, 1, 0], [0, 1, 1]], [0, 0, 1], [0, 1, 1])
    sol = simplex_solve(lp)
    assert sol.objective == 1
    assert brute_lp_min([[1, 1, 0], [1, 1, 0], [0, 1, 1]], [0, 0, 1], [0, 1, 1]) == ("optimal", 1)


def _check_basic(lp, sol):
    n = lp.n_cols
    for row, b in zip(lp.rows, lp.rhs):
        assert sum(c * sol.values[j] for j, c in row.items()) == b
    assert all(v >= 0 for v in sol.values)
    assert all(sol.values[j] == 0 for j in range(n) if j not in sol.basis)
    cols = [{r: row[j] for r, row in enumerate(lp.rows) if j in row} for j in sol.basis]
    assert rank_of(cols) == len(cols)


small = st.integers(-2, 2)


@given(
    st.integers(1, 3).flatmap(
        lambda r: st.integers(2, 4).flatmap(
            lambda n: st.tuples(
                st.lists(st.lists(small, min_size=n, max_size=n), min_size=r, max_size=r),
                st.lists(st.integers(-3, 3), min_size=r, max_size=r),
                st.lists(st.integers(-3, 3), min_size=n, max_size=n),
            )
        )
    )
)
def test_simplex_against_basis_enumeration(data):
    a, b, c = data
    kind, value = brute_lp_min(a, b, c)
    lp = LpStandard.from_dense(a, b, c)
    if kind == "infeasible":
        with pytest.raises(Infeasible):
            simplex_solve(lp)
    elif kind == "unbounded":
        with pytest.raises(Unbounded):
            simplex_solve(lp)
    else:
        sol = simplex_solve(lp)
        assert sol.objective == value
        _check_basic(lp, sol)


def test_dual_of_u3_shape():
    s = build_sli(ambient_graph(3))
    lp = dual_of_sli(s)
    assert lp.n_cols == 8 and len(lp.rows) == 4
    ks = s.var_index[XS]
    assert lp.rhs[ks] == -1
    assert lp.rows[ks] == {i: -(q.k - 2) for i, q in enumerate(s.inequalities) if q.k != 2}
    assert all(lp.rhs[i] == 0 for i in range(4) if i != ks)
    assert lp.cost == {i: q.rhs for i, q in enumerate(s.inequalities) if q.rhs}


def test_sigma_lp_u3():
    s = build_sli(ambient_graph(3))
    res = solve_sigma_lp(s, 1)
    assert res.optimum == -1 and res.sigma == 1
    assert res.y.objective == -1
    # the hand-computed vertex: 1/2 on each full-tuple inequality
    y = [Fraction(0)] * s.m_inq
    for side in (1, 2):
        y[s.index_of(AdmissibleTuple(side, tuple(frozenset({j}) for j in range(3))))] = Fraction(1, 2)
    assert dual_feasible(y, s)
    assert sum(yi * q.rhs for yi, q in zip(y, s.inequalities)) == -1


@pytest.mark.parametrize("m", [3, 4, 5])
def test_sigma_lp_ambient(m):
    s = build_sli(ambient_graph(m))
    res = solve_sigma_lp(s, m - 2)
    assert res.optimum == -1 and res.sigma == Fraction(1, m - 2)
    assert support_is_independent(res.y, s)


def test_sigma_lp_squares():
    y1 = squares_subgroup().core_graph()
    s = build_sli(y1)
    res = solve_sigma_lp(s, reduced_rank(y1))
    assert res.sigma == 1 and res.optimum == -2
    assert support_is_independent(res.y, s)
    assert res.y.pivots < 2000


def test_sigma_out_of_bounds_is_internal_error():
    s = build_sli(ambient_graph(3))
    with pytest.raises(InternalConsistencyError):
        solve_sigma_lp(s, 5)  # wrong brr makes sigma = 1/5 < 1/(m-2)
    with pytest.raises(ValueError):
        solve_sigma_lp(s, 0)


def test_feasible_point_examples():
    assert check_primal_feasible_point(build_sli(ambient_graph(3)), 1)
    assert check_primal_feasible_point(build_sli(ambient_graph(4)), 2)
    s = build_sli(ambient_graph(3))
    q = s.inequalities[0]
    bad = Inequality(q.coeffs, q.rhs - 10, q.side, q.k, q.source)
    corrupted = SliSystem(s.m, [bad] + s.inequalities[1:], s.variables, s.graph)
    assert not check_primal_feasible_point(corrupted, 1)


@pytest.mark.parametrize(
    "graph",
    [ambient_graph(3), ambient_graph(4), double_cover_u3(), squares_subgroup().core_graph()],
    ids=["U3", "U4", "double-cover", "squares"],
)
def test_duality_certificate(graph):
    brr = reduced_rank(graph)
    s = build_sli(graph)
    assert check_primal_feasible_point(s, brr)
    dual = solve_sigma_lp(s, brr)
    primal = solve_primal(s, shift=2 * brr)
    assert primal.optimum == dual.optimum
    assert verify_duality(primal.optimum, dual.y, s, primal.x)
    # the unshifted primal solve reaches the same optimum
    if graph.n_edges <= 4:
        assert solve_primal(s).optimum == dual.optimum


def test_duality_detects_perturbation():
    s = build_sli(ambient_graph(3))
    dual = solve_sigma_lp(s, 1)
    primal = solve_primal(s, shift=2)
    assert verify_duality(primal.optimum, dual.y, s, primal.x)
    for i in range(s.m_inq):
        vals = list(dual.y.values)
        vals[i] += 1
        bumped = VertexSolution(vals, dual.y.basis, dual.y.objective)
        assert not verify_duality(primal.optimum, bumped, s, primal.x)
    assert not verify_duality(primal.optimum - 1, dual.y, s)
    # a feasible but non-optimal primal point violates slackness / optimality
    x = {v: Fraction(0) for v in s.variables}
    x[XS] = Fraction(2)
    assert not verify_duality(Fraction(-2), dual.y, s, x)


def test_against_floating_point_solver():
    scipy_opt = pytest.importorskip("scipy.optimize")
    for graph in (ambient_graph(4), double_cover_u3(), squares_subgroup().core_graph()):
        s = build_sli(graph)
        lp = dual_of_sli(s)
        a = [[float(row.get(j, 0)) for j in range(lp.n_cols)] for row in lp.rows]
        c = [float(lp.cost.get(j, 0)) for j in range(lp.n_cols)]
        res = scipy_opt.linprog(c, A_eq=a, b_eq=[float(v) for v in lp.rhs], bounds=(0, None), method="highs")
        assert res.status == 0
        exact = solve_sigma_lp(s, reduced_rank(graph)).optimum
        assert abs(res.fun - float(exact)) < 1e-7


def test_reproducible_and_json():
    s = build_sli(squares_subgroup().core_graph())
    a = solve_sigma_lp(s, 2).y
    b = solve_sigma_lp(s, 2).y
    assert a.values == b.values and a.basis == b.basis
    data = json.loads(solution_json(a, s))
    assert data["objective"] == "-2"
    for v in data["nonzero"].values():
        Fraction(v)
    assert set(data["nonzero_named"]) <= {q.source.name for q in s.inequalities}


def test_rank_of():
    assert rank_of([{0: 1, 1: 1}, {0: 2, 1: 2}, {1: 1}]) == 2
    assert rank_of([]) == 0
    assert rank_of([{"a": Fraction(1, 3)}, {"b": 1}, {"a": 1, "b": 1}]) == 2
