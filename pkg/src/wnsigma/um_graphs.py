"""Graphs immersed in the two-vertex ambient graph U_m.

U_m has a 1-vertex ``o1``, a 2-vertex ``o2`` and ``m >= 3`` edges
``a_1 .. a_m``, each oriented from ``o1`` to ``o2``.  Its fundamental group
at ``o1`` is free of rank ``m - 1`` with basis ``x_i = a_i a_m^-1``.

A :class:`UmGraph` stores every geometric edge once, oriented from its
1-vertex to its 2-vertex, together with its label ``j``.  Oriented edge
counts (``|EX|`` in the usual convention) are twice the number of records.

Words in the free group are tuples of nonzero ints: ``i`` stands for
``x_i`` and ``-i`` for ``x_i^-1``.  Paths in U_m use the same encoding with
``j`` for ``a_j`` and ``-j`` for ``a_j^-1``.
"""

from __future__ import annotations

import json
import random
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Word = tuple[int, ...]


# ---------------------------------------------------------------------------
# words


def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for letter in word:
        if letter == 0:
            raise ValueError("0 is not a valid letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def inverse(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def check_word(word: Sequence[int], rank: int) -> None:
    for letter in word:
        if letter == 0 or abs(letter) > rank:
            raise ValueError(f"generator index {letter} outside 1..{rank}")


def parse_word(text: str) -> Word:
    """Parse ``"x1 x2^-1 x3"``; ``x3^2`` and ``x3^-2`` are also accepted."""
    letters: list[int] = []
    for tok in text.replace("*", " ").split():
        base, _, power = tok.partition("^")
        if not base.startswith("x") or not base[1:].isdigit():
            raise ValueError(f"cannot parse token {tok!r}")
        gen = int(base[1:])
        if gen < 1:
            raise ValueError(f"generator index must be positive in {tok!r}")
        exp = int(power) if power else 1
        letters.extend([gen if exp > 0 else -gen] * abs(exp))
    return free_reduce(letters)


def format_word(word: Sequence[int]) -> str:
    if not word:
        return "1"
    return " ".join(f"x{x}" if x > 0 else f"x{-x}^-1" for x in word)


def read_words(path) -> list[Word]:
    """One word per line; blank lines and ``#`` comments are skipped."""
    words = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                words.append(parse_word(line))
    return words


def word_to_loop(word: Sequence[int], m: int) -> Word:
    """Label of the closed path at ``o1`` spelling ``word``, freely reduced."""
    if m < 3:
        raise ValueError("ambient graph needs m >= 3")
    check_word(word, m - 1)
    letters: list[int] = []
    for x in word:
        letters.extend((x, -m) if x > 0 else (m, x))
    return free_reduce(letters)


def loop_to_word(path: Sequence[int], m: int) -> Word:
    """Inverse of :func:`word_to_loop` for even-length paths starting at a 1-vertex."""
    if len(path) % 2:
        raise ValueError("path must return to a 1-vertex")
    word: list[int] = []
    for a, b in zip(path[::2], path[1::2]):
        if a <= 0 or b >= 0:
            raise ValueError("path does not alternate A / A^-1 letters")
        if a != m:
            word.append(a)
        if -b != m:
            word.append(b)
    return free_reduce(word)


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class UmGraph:
    """Labelled graph over U_m.

    ``vertices`` maps vertex id to its type (1 or 2); ``edges`` maps edge id
    to ``(src, dst, label)`` with ``src`` a 1-vertex and ``dst`` a 2-vertex.
    Treat instances as immutable.
    """

    m: int
    vertices: dict[int, int] = field(default_factory=dict)
    edges: dict[int, tuple[int, int, int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.m < 3:
            raise ValueError("ambient graph needs m >= 3")
        for v, t in self.vertices.items():
            if t not in (1, 2):
                raise ValueError(f"vertex {v} has type {t}")
        for e, (s, d, lab) in self.edges.items():
            if self.vertices.get(s) != 1 or self.vertices.get(d) != 2:
                raise ValueError(f"edge {e} must run from a 1-vertex to a 2-vertex")
            if not 1 <= lab <= self.m:
                raise ValueError(f"edge {e} has label {lab} outside 1..{self.m}")

    # basic queries -------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        """Number of stored (geometric) edges."""
        return len(self.edges)

    @property
    def n_oriented_edges(self) -> int:
        return 2 * len(self.edges)

    def star(self, v: int) -> list[int]:
        return self._stars().get(v, [])

    def degree(self, v: int) -> int:
        return len(self.star(v))

    def _stars(self) -> dict[int, list[int]]:
        cache = self.__dict__.get("_star_cache")
        if cache is None:
            cache = {v: [] for v in self.vertices}
            for e in sorted(self.edges):
                s, d, _ = self.edges[e]
                cache[s].append(e)
                cache[d].append(e)
            object.__setattr__(self, "_star_cache", cache)
        return cache

    def other_end(self, e: int, v: int) -> int:
        s, d, _ = self.edges[e]
        return d if v == s else s

    def label(self, e: int) -> int:
        return self.edges[e][2]

    def edges_with_label(self, j: int) -> list[int]:
        return sorted(e for e, (_, _, lab) in self.edges.items() if lab == j)

    def vertices_of_type(self, t: int) -> list[int]:
        return sorted(v for v, vt in self.vertices.items() if vt == t)

    def is_immersed(self) -> bool:
        for v, es in self._stars().items():
            labels = [self.edges[e][2] for e in es]
            if len(set(labels)) != len(labels):
                return False
        return True

    def edge_at(self, v: int, j: int) -> int | None:
        """The edge labelled ``j`` at ``v`` (immersed graphs only)."""
        for e in self.star(v):
            if self.edges[e][2] == j:
                return e
        return None

    def components(self) -> list[list[int]]:
        """Vertex sets of connected components, each sorted, ordered by min id."""
        seen: set[int] = set()
        comps = []
        for v0 in sorted(self.vertices):
            if v0 in seen:
                continue
            comp = [v0]
            seen.add(v0)
            queue = deque([v0])
            while queue:
                v = queue.popleft()
                for e in self.star(v):
                    w = self.other_end(e, v)
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def subgraph(self, vertices: Iterable[int]) -> "UmGraph":
        keep = set(vertices)
        return UmGraph(
            self.m,
            {v: t for v, t in self.vertices.items() if v in keep},
            {e: r for e, r in self.edges.items() if r[0] in keep and r[1] in keep},
        )

    def relabeled(self) -> "UmGraph":
        """Copy with vertex and edge ids renumbered 0.. in sorted order."""
        vmap = {v: i for i, v in enumerate(sorted(self.vertices))}
        return UmGraph(
            self.m,
            {vmap[v]: t for v, t in self.vertices.items()},
            {i: (vmap[s], vmap[d], lab) for i, (s, d, lab) in enumerate(self.edges[e] for e in sorted(self.edges))},
        )

    # serialization ---------------------------------------------------------

    def to_dict(self, base: int | None = None) -> dict:
        return {
            "m": self.m,
            "vertices": [{"id": v, "type": t} for v, t in sorted(self.vertices.items())],
            "edges": [
                {"id": e, "from": s, "to": d, "label": lab}
                for e, (s, d, lab) in sorted(self.edges.items())
            ],
            "base": base,
        }

    def to_dot(self, name: str = "G", vertex_names: dict[int, str] | None = None) -> str:
        lines = [f"digraph {name} {{"]
        for v, t in sorted(self.vertices.items()):
            shape = "circle" if t == 1 else "box"
            label = vertex_names[v] if vertex_names else str(v)
            lines.append(f'  v{v} [shape={shape}, label="{label}"];')
        for e, (s, d, lab) in sorted(self.edges.items()):
            lines.append(f'  v{s} -> v{d} [label="a{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BasedGraph:
    graph: UmGraph
    base: int

    def __post_init__(self):
        if self.base not in self.graph.vertices:
            raise ValueError(f"base {self.base} is not a vertex")

    def to_dict(self) -> dict:
        return self.graph.to_dict(self.base)


def graph_from_dict(data: dict) -> UmGraph | BasedGraph:
    """Inverse of ``to_dict``; returns a :class:`BasedGraph` when ``base`` is set."""
    g = UmGraph(
        int(data["m"]),
        {int(v["id"]): int(v["type"]) for v in data["vertices"]},
        {int(e["id"]): (int(e["from"]), int(e["to"]), int(e["label"])) for e in data["edges"]},
    )
    if data.get("base") is None:
        return g
    return BasedGraph(g, int(data["base"]))


def load_graph(path) -> UmGraph | BasedGraph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))


def ambient_graph(m: int) -> UmGraph:
    """U_m itself: vertex 0 is ``o1``, vertex 1 is ``o2``, edge ``j-1`` is ``a_j``."""
    return UmGraph(m, {0: 1, 1: 2}, {j - 1: (0, 1, j) for j in range(1, m + 1)})


def cycle_graph(labels: Sequence[int], m: int) -> UmGraph:
    """Cycle ``v0 -a_{l0}- w0 -a_{l1}- v1 - ...`` of length ``len(labels)``.

    ``labels`` must have even length; consecutive labels (cyclically) must
    differ for the result to be immersed.
    """
    n = len(labels)
    if n < 2 or n % 2:
        raise ValueError("a cycle needs an even number >= 2 of edges")
    vertices = {i: 1 if i % 2 == 0 else 2 for i in range(n)}
    edges = {}
    for i, lab in enumerate(labels):
        a, b = i, (i + 1) % n
        edges[i] = (a, b, lab) if vertices[a] == 1 else (b, a, lab)
    return UmGraph(m, vertices, edges)


def disjoint_union(g: UmGraph, h: UmGraph) -> UmGraph:
    if g.m != h.m:
        raise ValueError("mismatched m")
    off_v = max(g.vertices, default=-1) + 1
    off_e = max(g.edges, default=-1) + 1
    vertices = dict(g.vertices)
    vertices.update({v + off_v: t for v, t in h.vertices.items()})
    edges = dict(g.edges)
    edges.update({e + off_e: (s + off_v, d + off_v, lab) for e, (s, d, lab) in h.edges.items()})
    return UmGraph(g.m, vertices, edges)


# ---------------------------------------------------------------------------
# folding


def fold_with_map(
    g: UmGraph, rng: random.Random | None = None
) -> tuple[UmGraph, dict[int, int], dict[int, int]]:
    """Fold ``g`` to an immersion.

    Returns the folded graph and the maps sending old vertex ids and old
    edge ids to ids of the result.  ``rng`` randomizes the fold order.
    """
    parent = {v: v for v in g.vertices}

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    edge_parent = {e: e for e in g.edges}

    def efind(e):
        while edge_parent[e] != e:
            e = edge_parent[e]
        return e

    alive = dict(g.edges)
    changed = True
    while changed:
        changed = False
        seen: dict[tuple[int, int, int], int] = {}
        order = sorted(alive)
        if rng is not None:
            rng.shuffle(order)
        for e in order:
            s, d, lab = alive[e]
            s, d = find(s), find(d)
            alive[e] = (s, d, lab)
            hit = None
            for key in ((1, s, lab), (2, d, lab)):
                if key in seen and seen[key] in alive:
                    hit = seen[key]
                    break
            if hit is None:
                seen[(1, s, lab)] = e
                seen[(2, d, lab)] = e
                continue
            hs, hd, _ = alive[hit]
            hs, hd = find(hs), find(hd)
            # identify endpoints, then drop the duplicate edge
            if hs != s:
                parent[find(s)] = find(hs)
            if hd != d:
                parent[find(d)] = find(hd)
            del alive[e]
            edge_parent[e] = hit
            changed = True

    roots = sorted({find(v) for v in g.vertices})
    vmap = {r: i for i, r in enumerate(roots)}
    vertex_map = {v: vmap[find(v)] for v in g.vertices}
    kept = sorted(alive)
    emap = {e: i for i, e in enumerate(kept)}
    edge_map = {e: emap[efind(e)] for e in g.edges}
    folded = UmGraph(
        g.m,
        {vmap[r]: g.vertices[r] for r in roots},
        {emap[e]: (vertex_map[s], vertex_map[d], lab) for e, (s, d, lab) in ((e, alive[e]) for e in kept)},
    )
    return folded, vertex_map, edge_map


def fold(g: BasedGraph, rng: random.Random | None = None) -> BasedGraph:
    folded, vmap, _ = fold_with_map(g.graph, rng)
    return BasedGraph(folded, vmap[g.base])


def trim(g: BasedGraph) -> BasedGraph:
    """Remove degree-<=1 vertices other than the base, repeatedly."""
    graph = _prune(g.graph, keep={g.base})
    return BasedGraph(graph, g.base)


def _prune(g: UmGraph, keep: set[int] = frozenset()) -> UmGraph:
    vertices = dict(g.vertices)
    edges = dict(g.edges)
    star: dict[int, set[int]] = {v: set() for v in vertices}
    for e, (s, d, _) in edges.items():
        star[s].add(e)
        star[d].add(e)
    queue = deque(v for v in vertices if len(star[v]) <= 1 and v not in keep)
    while queue:
        v = queue.popleft()
        if v not in vertices or len(star[v]) > 1 or v in keep:
            continue
        for e in list(star[v]):
            s, d, _ = edges.pop(e)
            w = d if s == v else s
            star[w].discard(e)
            if len(star[w]) <= 1 and w not in keep:
                queue.append(w)
        del vertices[v]
        del star[v]
    return UmGraph(g.m, vertices, edges)


def core(g: UmGraph) -> UmGraph:
    """Union of all cyclically reduced closed paths: prune leaves and isolated vertices."""
    return _prune(g)


def stallings_graph(words: Sequence[Sequence[int]], m: int) -> BasedGraph:
    """Folded, trimmed graph of the subgroup generated by ``words`` at base ``o1``."""
    if m < 3:
        raise ValueError("ambient graph needs m >= 3")
    vertices = {0: 1}
    edges: dict[int, tuple[int, int, int]] = {}
    for w in words:
        check_word(w, m - 1)
        loop = word_to_loop(free_reduce(w), m)
        cur = 0
        for pos, letter in enumerate(loop):
            if pos == len(loop) - 1:
                nxt = 0
            else:
                nxt = len(vertices)
                vertices[nxt] = 2 if letter > 0 else 1
            eid = len(edges)
            if letter > 0:
                edges[eid] = (cur, nxt, letter)
            else:
                edges[eid] = (nxt, cur, -letter)
            cur = nxt
    return trim(fold(BasedGraph(UmGraph(m, vertices, edges), 0)))


def trace(g: BasedGraph, path: Sequence[int], start: int | None = None) -> int | None:
    """Follow a U_m path in an immersed graph; return the end vertex or None."""
    v = g.base if start is None else start
    graph = g.graph
    for letter in path:
        e = graph.edge_at(v, abs(letter))
        if e is None:
            return None
        s, d, _ = graph.edges[e]
        if letter > 0:
            if s != v:
                return None
            v = d
        else:
            if d != v:
                return None
            v = s
    return v


def accepts(g: BasedGraph, word: Sequence[int]) -> bool:
    """Whether ``word`` (in the x-basis) lies in the subgroup represented by ``g``."""
    return trace(g, word_to_loop(free_reduce(word), g.graph.m)) == g.base


def spanning_paths(g: UmGraph, root: int) -> dict[int, Word]:
    """Labels of BFS-tree paths from ``root`` to every reachable vertex."""
    paths = {root: ()}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for e in g.star(v):
            s, d, lab = g.edges[e]
            w, step = (d, lab) if v == s else (s, -lab)
            if w not in paths:
                paths[w] = paths[v] + (step,)
                queue.append(w)
    return paths


# ---------------------------------------------------------------------------
# ranks


def _require_core(g: UmGraph) -> None:
    if any(g.degree(v) < 2 for v in g.vertices):
        raise ValueError("graph is not equal to its core")


def reduced_rank(g: UmGraph) -> int:
    """``|EX|/2 - |VX|`` for a core graph."""
    _require_core(g)
    return g.n_edges - g.n_vertices


def brr_side(g: UmGraph, i: int) -> Fraction:
    """Half the excess degree over the i-vertices; the two sides sum to the reduced rank."""
    if i not in (1, 2):
        raise ValueError("side must be 1 or 2")
    _require_core(g)
    return Fraction(sum(g.degree(v) - 2 for v in g.vertices_of_type(i)), 2)


def rank(g: UmGraph) -> int:
    """Rank of the fundamental group of a connected graph."""
    return g.n_edges - g.n_vertices + 1


# ---------------------------------------------------------------------------
# canonical codes


def _component_code(g: UmGraph, comp: Sequence[int]) -> tuple:
    best = None
    for start in comp:
        order = {start: 0}
        queue = deque([start])
        code_edges = []
        while queue:
            v = queue.popleft()
            for e in sorted(g.star(v), key=lambda e: g.edges[e][2]):
                w = g.other_end(e, v)
                if w not in order:
                    order[w] = len(order)
                    queue.append(w)
        for s, d, lab in (g.edges[e] for v in comp for e in g.star(v) if g.edges[e][0] == v):
            code_edges.append((order[s], order[d], lab))
        code = (
            len(comp),
            tuple(g.vertices[v] for v in sorted(comp, key=order.__getitem__)),
            tuple(sorted(code_edges)),
        )
        if best is None or code < best:
            best = code
    return best


def canonical_code(g: UmGraph) -> bytes:
    """Isomorphism invariant of an immersed graph (labels and vertex types preserved)."""
    if not g.is_immersed():
        raise ValueError("canonical codes are defined for immersed graphs only")
    codes = sorted(_component_code(g, comp) for comp in g.components())
    return repr((g.m, codes)).encode()
