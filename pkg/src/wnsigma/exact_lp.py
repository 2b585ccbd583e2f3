"""Exact two-phase simplex over the rationals, and the LPs built from an SLI system.

The solver works on problems in equality form

    min  cost . y   subject to   rows . y = rhs,   y >= 0

with sparse rows stored as ``{column: Fraction}`` dicts.  Pivoting follows
Bland's rule, so it terminates and the returned vertex depends only on the
column order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InternalConsistencyError
from .sli import XS, SliSystem, Var


class LpError(Exception):
    pass


class Infeasible(LpError):
    pass


class Unbounded(LpError):
    pass


@dataclass
class LpStandard:
    n_cols: int
    rows: list[dict[int, Fraction]]
    rhs: list[Fraction]
    cost: dict[int, Fraction]
    row_names: list[str] = field(default_factory=list)
    col_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.rows) != len(self.rhs):
            raise ValueError("rows and rhs differ in length")
        for row in self.rows:
            if any(not 0 <= j < self.n_cols for j in row):
                raise ValueError("column index out of range")
        if any(not 0 <= j < self.n_cols for j in self.cost):
            raise ValueError("cost index out of range")

    @classmethod
    def from_dense(cls, a, b, c) -> "LpStandard":
        n = len(c)
        rows = [{j: Fraction(v) for j, v in enumerate(r) if v} for r in a]
        if any(len(r) != n for r in a):
            raise ValueError("dimension mismatch")
        return cls(n, rows, [Fraction(v) for v in b], {j: Fraction(v) for j, v in enumerate(c) if v})


@dataclass
class VertexSolution:
    values: list[Fraction]
    basis: list[int]
    objective: Fraction
    pivots: int = 0

    def support(self) -> list[int]:
        return [j for j, v in enumerate(self.values) if v]

    def to_dict(self) -> dict:
        return {
            "objective": str(self.objective),
            "nonzero": {str(j): str(v) for j, v in enumerate(self.values) if v},
            "basis": list(self.basis),
            "pivots": self.pivots,
        }


def _axpy(target: dict, f: Fraction, src: dict) -> None:
    """target -= f * src, dropping zeros."""
    for k, v in src.items():
        nv = target.get(k, 0) - f * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.d: dict[int, Fraction] = {}
        self.z = Fraction(0)
        self.pivots = 0

    def pivot(self, r: int, col: int) -> None:
        row = self.rows[r]
        a = row[col]
        if a != 1:
            inv = 1 / a
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        br = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other.get(col)
                if f:
                    _axpy(other, f, row)
                    self.rhs[i] -= f * br
        f = self.d.get(col)
        if f:
            _axpy(self.d, f, row)
            self.z += f * br
        self.basis[r] = col
        self.pivots += 1

    def set_cost(self, cost: dict[int, Fraction]) -> None:
        self.d = dict(cost)
        self.z = Fraction(0)
        for r, col in enumerate(self.basis):
            cb = cost.get(col)
            if cb:
                _axpy(self.d, cb, self.rows[r])
                self.z += cb * self.rhs[r]

    def run(self, allowed: int, limit: int | None) -> None:
        """Bland's rule on columns ``< allowed``; raises Unbounded."""
        while True:
            entering = min((j for j, v in self.d.items() if v < 0 and j < allowed), default=None)
            if entering is None:
                return
            best = None
            for r, row in enumerate(self.rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    key = (self.rhs[r] / a, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                raise Unbounded(f"column {entering} is an unbounded direction")
            self.pivot(best[1], entering)
            if limit is not None and self.pivots > limit:
                raise LpError(f"pivot limit {limit} exceeded")


def simplex_solve(lp: LpStandard, max_pivots: int | None = None) -> VertexSolution:
    """Optimal basic feasible solution of ``min{cost.y | rows.y = rhs, y >= 0}``.

    Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    n = lp.n_cols
    rows = []
    rhs = []
    for row, b in zip(lp.rows, lp.rhs):
        sign = -1 if b < 0 else 1
        rows.append({j: sign * Fraction(v) for j, v in row.items() if v})
        rhs.append(sign * Fraction(b))
    n_rows = len(rows)
    # unit columns (e.g. slacks) start in the basis; other rows get artificials
    count: dict[int, int] = {}
    for row in rows:
        for j in row:
            count[j] = count.get(j, 0) + 1
    basis = []
    used = set()
    for r, row in enumerate(rows):
        unit = min((j for j, v in row.items() if v == 1 and count[j] == 1 and j not in used), default=None)
        if unit is None:
            unit = n + r
            row[unit] = Fraction(1)
        used.add(unit)
        basis.append(unit)
    tab = _Tableau(rows, rhs, basis)

    # phase 1: minimize the sum of artificials
    tab.set_cost({n + r: Fraction(1) for r in range(n_rows) if basis[r] >= n})
    tab.run(n, max_pivots)
    if tab.z > 0:
        raise Infeasible(f"phase 1 ended with infeasibility {tab.z}")

    # drive artificials out of the basis; rows where that fails are redundant
    redundant = []
    for r in range(n_rows):
        if tab.basis[r] >= n:
            col = min((j for j in tab.rows[r] if j < n), default=None)
            if col is None:
                redundant.append(r)
            else:
                tab.pivot(r, col)
    for r in reversed(redundant):
        del tab.rows[r], tab.rhs[r], tab.basis[r]
    for row in tab.rows:
        for j in [j for j in row if j >= n]:
            del row[j]

    tab.set_cost({j: Fraction(v) for j, v in lp.cost.items() if v})
    tab.run(n, max_pivots)

    values = [Fraction(0)] * n
    for r, col in enumerate(tab.basis):
        values[col] = tab.rhs[r]
    objective = sum((Fraction(c) * values[j] for j, c in lp.cost.items()), Fraction(0))
    if objective != tab.z:
        raise InternalConsistencyError("objective bookkeeping drifted")
    return VertexSolution(values, sorted(tab.basis), objective, tab.pivots)


def rank_of(vectors: list[dict]) -> int:
    """Rank over Q of sparse vectors (dicts key -> number)."""
    pivots: list[tuple[object, dict]] = []
    rank = 0
    for vec in vectors:
        v = {k: Fraction(x) for k, x in vec.items() if x}
        for key, p in pivots:
            f = v.get(key)
            if f:
                _axpy(v, f, p)
        if v:
            key = min(v, key=repr)
            inv = 1 / v[key]
            pivots.append((key, {k: x * inv for k, x in v.items()}))
            rank += 1
    return rank


# ---------------------------------------------------------------------------
# LPs from an SLI system


def dual_of_sli(s: SliSystem) -> LpStandard:
    """``min sum y_i q_i^R  s.t.  sum y_i q_i^L = -x_s,  y >= 0``; one row per variable."""
    rows: list[dict[int, Fraction]] = [{} for _ in s.variables]
    for i, q in enumerate(s.inequalities):
        for v, c in q.coeffs.items():
            rows[s.var_index[v]][i] = Fraction(c)
    rhs = [Fraction(-1) if v == XS else Fraction(0) for v in s.variables]
    cost = {i: Fraction(q.rhs) for i, q in enumerate(s.inequalities) if q.rhs}
    return LpStandard(
        s.m_inq, rows, rhs, cost, [v.name for v in s.variables], [q.source.name for q in s.inequalities]
    )


@dataclass
class SigmaLp:
    optimum: Fraction
    sigma: Fraction
    y: VertexSolution


def sigma_bounds(m: int) -> tuple[Fraction, Fraction]:
    return Fraction(1, m - 2), Fraction(1)


def solve_sigma_lp(s: SliSystem, brr1: int) -> SigmaLp:
    """Solve the dual LP; its optimum is ``-sigma * brr1``."""
    if brr1 <= 0:
        raise ValueError("brr1 must be positive")
    y = simplex_solve(dual_of_sli(s))
    sigma = -y.objective / brr1
    lo, hi = sigma_bounds(s.m)
    if not lo <= sigma <= hi:
        raise InternalConsistencyError(f"sigma = {sigma} outside [{lo}, {hi}]")
    return SigmaLp(y.objective, sigma, y)


@dataclass
class PrimalSolution:
    optimum: Fraction
    x: dict[Var, Fraction]
    pivots: int


def solve_primal(s: SliSystem, shift: int = 0) -> PrimalSolution:
    """``max{-x_s | SLI}`` solved directly: free variables split, one slack per row.

    ``x_s`` is written as ``shift + (x_s+ - x_s-)``; with ``shift = 2 brr(Y1)``
    every slack starts feasible and phase 1 is empty.
    """
    n = s.n_inq
    rows = []
    rhs = []
    for i, q in enumerate(s.inequalities):
        row = {}
        for v, c in q.coeffs.items():
            k = s.var_index[v]
            row[2 * k] = Fraction(c)
            row[2 * k + 1] = Fraction(-c)
        row[2 * n + i] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(q.rhs - q.xs_coeff * shift))
    ks = s.var_index[XS]
    lp = LpStandard(2 * n + s.m_inq, rows, rhs, {2 * ks: Fraction(1), 2 * ks + 1: Fraction(-1)})
    sol = simplex_solve(lp)
    x = {v: sol.values[2 * k] - sol.values[2 * k + 1] for k, v in enumerate(s.variables)}
    x[XS] += shift
    return PrimalSolution(-x[XS], x, sol.pivots)


def check_primal_feasible_point(s: SliSystem, brr1: int) -> bool:
    """Whether ``x_{j,B} = 0, x_s = 2 brr1`` satisfies every inequality."""
    xs = 2 * brr1
    return all(q.xs_coeff * xs <= q.rhs for q in s.inequalities)


def _lhs_value(q, x: dict[Var, Fraction]) -> Fraction:
    return sum((c * x.get(v, 0) for v, c in q.coeffs.items()), Fraction(0))


def dual_feasible(y: list[Fraction], s: SliSystem) -> bool:
    if len(y) != s.m_inq or any(v < 0 for v in y):
        return False
    totals = {v: Fraction(0) for v in s.variables}
    for yi, q in zip(y, s.inequalities):
        if yi:
            for v, c in q.coeffs.items():
                totals[v] += yi * c
    return all(t == (-1 if v == XS else 0) for v, t in totals.items())


def verify_duality(
    primal_opt: Fraction,
    dual: VertexSolution,
    s: SliSystem,
    x: dict[Var, Fraction] | None = None,
) -> bool:
    """Dual feasibility, equal optima, and (given a primal point) complementary slackness."""
    if not dual_feasible(dual.values, s):
        return False
    dual_obj = sum((yi * q.rhs for yi, q in zip(dual.values, s.inequalities)), Fraction(0))
    if dual_obj != dual.objective or dual_obj != primal_opt:
        return False
    if x is None:
        return True
    if -x.get(XS, 0) != primal_opt:
        return False
    for yi, q in zip(dual.values, s.inequalities):
        lhs = _lhs_value(q, x)
        if lhs > q.rhs or (yi > 0 and lhs != q.rhs):
            return False
    return True


def support_is_independent(y: VertexSolution, s: SliSystem) -> bool:
    """Positive components sit on linearly independent inequality left-hand sides."""
    support = y.support()
    return rank_of([s.inequalities[i].coeffs for i in support]) == len(support)


def solution_json(y: VertexSolution, s: SliSystem | None = None) -> str:
    data = y.to_dict()
    if s is not None:
        data["nonzero_named"] = {s.inequalities[j].source.name: str(v) for j, v in enumerate(y.values) if v}
    return json.dumps(data, indent=2)
