from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings

from wnsigma.pipeline import SubgroupInput
from wnsigma.um_graphs import UmGraph, ambient_graph, parse_word

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# (criterion number, description, passed, detail) rows filled in by test_acceptance
ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


def words(*texts: str):
    return [parse_word(t) for t in texts]


def squares_subgroup() -> SubgroupInput:
    """<x1^2, x2^2, (x1 x2)^2> in F_2."""
    return SubgroupInput.from_words(words("x1^2", "x2^2", "x1 x2 x1 x2"), rank=2)


def double_cover_u3() -> UmGraph:
    """Connected double cover of U_3: a1, a2 lift straight, a3 crosses over."""
    return UmGraph(
        3,
        {0: 1, 1: 1, 2: 2, 3: 2},
        {0: (0, 2, 1), 1: (1, 3, 1), 2: (0, 2, 2), 3: (1, 3, 2), 4: (0, 3, 3), 5: (1, 2, 3)},
    )


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def u3():
    return ambient_graph(3)


@pytest.fixture
def u4():
    return ambient_graph(4)


@pytest.fixture
def h_squares():
    return squares_subgroup()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {desc} ({detail})")


def property_b_pairs(seed: int, n: int, max_edges: int = 8):
    """``n`` random pairs ``(Y1, Y2)`` with property (B), both with <= ``max_edges`` stored edges.

    ``Y1`` is a random noncyclic core and ``Y2`` the part of a second random
    core covered by the pullback core, kept when it has positive reduced rank.
    """
    from oracles import random_immersed
    from wnsigma.pipeline import random_subgroup
    from wnsigma.pullback import has_property_b, image_subgraph
    from wnsigma.um_graphs import core

    rng = random.Random(seed)
    out = []
    while len(out) < n:
        rank = rng.choice([2, 2, 3])
        y1 = random_subgroup(rng, rank, max_len=5, max_edges=max_edges).core_graph()
        roll = rng.random()
        if roll < 0.15:
            other = y1
        elif roll < 0.6:
            other = random_subgroup(rng, rank, max_len=5, max_edges=max_edges).core_graph()
        else:
            other = core(random_immersed(rng, rank + 1, rng.randint(1, 4), rng.randint(1, 4), 0.8))
        y2 = image_subgraph(y1, other)
        if 0 < y2.n_edges <= max_edges and y2.n_edges > y2.n_vertices and has_property_b(y1, y2):
            out.append((y1, y2))
    return out
