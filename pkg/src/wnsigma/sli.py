"""The system of linear inequalities attached to a core U_m-graph Y1.

For a side ``i`` (1 or 2), a tuple ``(A_1, .., A_m)`` of sets of Y1-edges,
``A_j`` made of ``a_j``-edges, is *i-admissible* when its union is nonempty
and every class of "shares the i-side endpoint" has at least two members.
Each such tuple gives one inequality

    side 1:  - sum_j x_{j,A_j} - (k-2) x_s <= -N
    side 2:  + sum_j x_{j,A_j} - (k-2) x_s <= -N

over the nonempty ``A_j``, where ``k`` counts the nonempty sets and ``N``
is the sum of ``(|class| - 2)`` over the classes.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InternalConsistencyError
from .pullback import ProductGraph, pullback_core
from .um_graphs import UmGraph, reduced_rank


@dataclass(frozen=True, order=True)
class Var:
    """``x_{j,B}``; the scale variable ``x_s`` is ``Var(0, ())``."""

    j: int
    edges: tuple[int, ...]

    @property
    def name(self) -> str:
        if self.j == 0:
            return "xs"
        return f"x{self.j}_" + ".".join(map(str, self.edges))

    @classmethod
    def from_name(cls, name: str) -> "Var":
        if name == "xs":
            return XS
        mt = re.fullmatch(r"x(\d+)_(\d+(?:\.\d+)*)", name)
        if not mt:
            raise ValueError(f"bad variable name {name!r}")
        return cls(int(mt.group(1)), tuple(int(e) for e in mt.group(2).split(".")))


XS = Var(0, ())


@dataclass(frozen=True)
class AdmissibleTuple:
    side: int
    sets: tuple[frozenset, ...]  # sets[j-1] = A_j

    @property
    def k(self) -> int:
        return sum(1 for a in self.sets if a)

    def union(self) -> set[int]:
        return set().union(*self.sets)

    def encoding(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(a)) for a in self.sets)

    @property
    def name(self) -> str:
        parts = [".".join(map(str, a)) or "n" for a in self.encoding()]
        return f"s{self.side}_" + "_".join(parts)

    @classmethod
    def from_name(cls, name: str) -> "AdmissibleTuple":
        mt = re.fullmatch(r"s([12])_(.*)", name)
        if not mt:
            raise ValueError(f"bad row name {name!r}")
        sets = tuple(
            frozenset() if part == "n" else frozenset(int(e) for e in part.split("."))
            for part in mt.group(2).split("_")
        )
        return cls(int(mt.group(1)), sets)


@dataclass(frozen=True)
class Inequality:
    """``sum(coeffs[v] * v) <= rhs``."""

    coeffs: dict[Var, int]
    rhs: int
    side: int
    k: int
    source: AdmissibleTuple

    @property
    def xs_coeff(self) -> int:
        return self.coeffs.get(XS, 0)

    def x_vars(self) -> list[Var]:
        return sorted(v for v in self.coeffs if v != XS)


@dataclass
class IneqMultiset:
    """Multiset of inequality indices of an :class:`SliSystem` (``counts[i] = l_i``)."""

    counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.counts = {i: c for i, c in sorted(self.counts.items()) if c}
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("multiplicities must be nonnegative")

    def __len__(self) -> int:
        return sum(self.counts.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, IneqMultiset) and self.counts == other.counts

    def scaled(self, factor: int) -> "IneqMultiset":
        return IneqMultiset({i: c * factor for i, c in self.counts.items()})


@dataclass
class SliSystem:
    m: int
    inequalities: list[Inequality]
    variables: list[Var]
    graph: UmGraph | None = None

    def __post_init__(self):
        self.var_index = {v: n for n, v in enumerate(self.variables)}
        self.tuple_index = {q.source: n for n, q in enumerate(self.inequalities)}

    @property
    def m_inq(self) -> int:
        return len(self.inequalities)

    @property
    def n_inq(self) -> int:
        return len(self.variables)

    def index_of(self, t: AdmissibleTuple) -> int:
        try:
            return self.tuple_index[t]
        except KeyError:
            raise KeyError(f"tuple {t.name} is not in the system") from None

    def same_system(self, other: "SliSystem") -> bool:
        return (
            self.m == other.m
            and self.variables == other.variables
            and self.inequalities == other.inequalities
        )

    # LP text -------------------------------------------------------------

    def to_lp_text(self) -> str:
        lines = [f"\\ inequality system, m = {self.m}", "Maximize", " obj: - xs", "Subject To"]
        for q in self.inequalities:
            terms = []
            for v in q.x_vars() + ([XS] if q.xs_coeff else []):
                c = q.coeffs[v]
                sign = "-" if c < 0 else "+"
                mag = "" if abs(c) == 1 else f"{abs(c)} "
                terms.append(f"{sign} {mag}{v.name}")
            lines.append(f" {q.source.name}: {' '.join(terms)} <= {q.rhs}")
        lines.append("Bounds")
        lines.extend(f" {v.name} free" for v in self.variables)
        lines.append("End")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "variables": [v.name for v in self.variables],
            "inequalities": [
                {
                    "name": q.source.name,
                    "side": q.side,
                    "k": q.k,
                    "coeffs": {v.name: c for v, c in sorted(q.coeffs.items())},
                    "rhs": q.rhs,
                }
                for q in self.inequalities
            ],
            "graph": None if self.graph is None else self.graph.to_dict(),
        }


def parse_lp_text(text: str) -> SliSystem:
    """Read back the output of :meth:`SliSystem.to_lp_text`."""
    m = None
    section = None
    inequalities = []
    free: list[Var] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            mt = re.search(r"m\s*=\s*(\d+)", line)
            if mt:
                m = int(mt.group(1))
            continue
        low = line.lower()
        if low in ("maximize", "subject to", "bounds", "end"):
            section = low
            continue
        if section == "maximize":
            if line.replace(" ", "") != "obj:-xs":
                raise ValueError(f"unexpected objective {line!r}")
        elif section == "subject to":
            name, _, body = line.partition(":")
            lhs, _, rhs = body.partition("<=")
            if not rhs:
                raise ValueError(f"row {name!r} is not a <= constraint")
            coeffs: dict[Var, int] = {}
            for sign, mag, var in re.findall(r"([+-])\s*(\d+)?\s*([A-Za-z][\w.]*)", lhs):
                c = int(mag) if mag else 1
                coeffs[Var.from_name(var)] = -c if sign == "-" else c
            tup = AdmissibleTuple.from_name(name.strip())
            inequalities.append(Inequality(coeffs, int(rhs), tup.side, tup.k, tup))
        elif section == "bounds":
            var, _, kind = line.partition(" ")
            if kind.strip() != "free":
                raise ValueError(f"unsupported bound {line!r}")
            free.append(Var.from_name(var))
        else:
            raise ValueError(f"unexpected line {line!r}")
    if m is None:
        if not inequalities:
            raise ValueError("cannot determine m")
        m = len(inequalities[0].source.sets)
    for q in inequalities:
        if len(q.source.sets) != m:
            raise ValueError(f"row {q.source.name} has the wrong number of sets")
    return SliSystem(m, inequalities, free)


# ---------------------------------------------------------------------------
# tuples


def relation_classes(y1: UmGraph, edges: Iterable[int], i: int) -> list[list[int]]:
    """Partition ``edges`` by their initial (i=1) or terminal (i=2) vertex."""
    if i not in (1, 2):
        raise ValueError("side must be 1 or 2")
    groups: dict[int, list[int]] = {}
    for e in edges:
        if e not in y1.edges:
            raise KeyError(f"unknown edge {e}")
        groups.setdefault(y1.edges[e][i - 1], []).append(e)
    return [sorted(g) for _, g in sorted(groups.items())]


def is_admissible(t: AdmissibleTuple, y1: UmGraph) -> bool:
    if len(t.sets) != y1.m:
        return False
    for j, a in enumerate(t.sets, start=1):
        if any(e not in y1.edges or y1.edges[e][2] != j for e in a):
            return False
    classes = relation_classes(y1, t.union(), t.side)
    return bool(classes) and all(len(c) >= 2 for c in classes)


def n_value(t: AdmissibleTuple, y1: UmGraph) -> int:
    if not is_admissible(t, y1):
        raise ValueError(f"tuple {t.name} is not admissible")
    return sum(len(c) - 2 for c in relation_classes(y1, t.union(), t.side))


def _tuple_from_edges(y1: UmGraph, side: int, chosen: Iterable[int]) -> AdmissibleTuple:
    sets: list[set[int]] = [set() for _ in range(y1.m)]
    for e in chosen:
        sets[y1.edges[e][2] - 1].add(e)
    return AdmissibleTuple(side, tuple(frozenset(a) for a in sets))


def enumerate_admissible(y1: UmGraph, i: int) -> Iterator[AdmissibleTuple]:
    """All i-admissible tuples: per i-vertex, a subset of its star of size != 1, not all empty."""
    if i not in (1, 2):
        raise ValueError("side must be 1 or 2")
    if not y1.edges:
        raise ValueError("empty graph")
    options = []
    for v in y1.vertices_of_type(i):
        star = y1.star(v)
        opts = [()]
        for size in range(2, len(star) + 1):
            opts.extend(itertools.combinations(star, size))
        options.append(opts)
    for choice in itertools.product(*options):
        chosen = [e for part in choice for e in part]
        if chosen:
            yield _tuple_from_edges(y1, i, chosen)


def naive_admissible(y1: UmGraph, i: int) -> set[AdmissibleTuple]:
    """Filter every subset m-tuple by the definition; exponential in |E Y1|."""
    per_label = []
    for j in range(1, y1.m + 1):
        es = y1.edges_with_label(j)
        per_label.append([frozenset(c) for r in range(len(es) + 1) for c in itertools.combinations(es, r)])
    out = set()
    for sets in itertools.product(*per_label):
        t = AdmissibleTuple(i, tuple(sets))
        if is_admissible(t, y1):
            out.add(t)
    return out


def admissible_count(y1: UmGraph, i: int) -> int:
    total = 1
    for v in y1.vertices_of_type(i):
        d = y1.degree(v)
        total *= 2**d - d
    return total - 1


def inequality_of(t: AdmissibleTuple, y1: UmGraph) -> Inequality:
    n = n_value(t, y1)
    sign = -1 if t.side == 1 else 1
    coeffs = {Var(j, tuple(sorted(a))): sign for j, a in enumerate(t.sets, start=1) if a}
    if t.k != 2:
        coeffs[XS] = -(t.k - 2)
    return Inequality(coeffs, -n, t.side, t.k, t)


def _sort_key(q: Inequality):
    return (q.side, -q.k, q.source.encoding())


def build_sli(y1: UmGraph) -> SliSystem:
    if not y1.is_immersed():
        raise ValueError("Y1 must be immersed")
    if reduced_rank(y1) <= 0:
        raise ValueError("Y1 must have positive reduced rank")
    ineqs = [inequality_of(t, y1) for side in (1, 2) for t in enumerate_admissible(y1, side)]
    ineqs.sort(key=_sort_key)
    used = {v for q in ineqs for v in q.coeffs}
    used.add(XS)
    variables = sorted(used)
    # each a_j-edge has its own 1-vertex and core vertices have degree >= 2,
    # so |E_{a_j} Y1| <= (stored edges) / 2
    ceiling = y1.m * (2 ** (y1.n_edges // 2) - 1) + 1
    if len(variables) > ceiling:
        raise InternalConsistencyError(f"{len(variables)} variables exceed the ceiling {ceiling}")
    return SliSystem(y1.m, ineqs, variables, y1)


# ---------------------------------------------------------------------------
# the vertex -> inequality map


def inq_tuple(p: ProductGraph, u: int) -> AdmissibleTuple:
    """Tuple ``(A_1(u), .., A_m(u))`` of a vertex ``u`` of ``Y2 = p.right``.

    ``p`` must be the pullback core; ``A_j(u)`` collects the Y1-edges paired
    with the ``a_j``-edge at ``u``.
    """
    y1, y2 = p.left, p.right
    pre = p.__dict__.get("_pre_right")
    if pre is None:
        pre = p.preimage_right()
        object.__setattr__(p, "_pre_right", pre)
    sets: list[frozenset] = [frozenset()] * y1.m
    star = y2.star(u)
    if not star:
        raise ValueError(f"vertex {u} of Y2 has no edges")
    for f in star:
        b = pre[f]
        if not b:
            raise ValueError(f"edge {f} at vertex {u} has no preimage in the pullback core")
        sets[y2.edges[f][2] - 1] = frozenset(b)
    return AdmissibleTuple(y2.vertices[u], tuple(sets))


def inq_vertex(s: SliSystem, p: ProductGraph, u: int) -> int:
    return s.index_of(inq_tuple(p, u))


def inq_multiset(s: SliSystem, y2: UmGraph) -> IneqMultiset:
    """Multiset of the inequalities attached to the vertices of ``Y2``."""
    if s.graph is None:
        raise ValueError("system has no attached graph")
    p = pullback_core(s.graph, y2)
    covered = {v2 for _, v2 in p.vertex_pairs.values()}
    missing = set(y2.vertices) - covered
    if missing:
        raise ValueError(f"pullback core does not cover vertices {sorted(missing)} of Y2")
    return IneqMultiset(Counter(inq_vertex(s, p, u) for u in sorted(y2.vertices)))


def lhs_sum(s: SliSystem, q: IneqMultiset) -> dict[Var, int]:
    total: Counter = Counter()
    for i, c in q.counts.items():
        for v, a in s.inequalities[i].coeffs.items():
            total[v] += c * a
    return {v: a for v, a in total.items() if a}


def rhs_sum(s: SliSystem, q: IneqMultiset) -> int:
    return sum(c * s.inequalities[i].rhs for i, c in q.counts.items())
