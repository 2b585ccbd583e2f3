"""Compare the LP value of sigma with brute-force enumeration of small graphs.

For each subgroup the exact LP sigma is printed next to the best ratio
brr(core(Y1 x Y2)) / (brr(Y1) brr(Y2)) over all connected core graphs Y2 with
at most ``--max-vertices`` vertices.  The oracle can only fall short of sigma.

    python scripts/oracle_vs_lp.py --max-vertices 4
"""

from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass

from wnsigma.pipeline import SubgroupInput, oracle_enumerate, random_subgroup, sigma
from wnsigma.um_graphs import format_word, parse_word


@dataclass
class OracleConfig:
    max_vertices: int = 4
    random_count: int = 4
    seed: int = 1


FIXED = {
    "F_2": (2, ["x1", "x2"]),
    "F_3": (3, ["x1", "x2", "x3"]),
    "<x1, x2 x3>": (3, ["x1", "x2 x3"]),
    "<x1^2, x2^2, (x1 x2)^2>": (2, ["x1^2", "x2^2", "x1 x2 x1 x2"]),
}


def cases(cfg: OracleConfig):
    for name, (rank, gens) in FIXED.items():
        yield name, SubgroupInput.from_words([parse_word(g) for g in gens], rank=rank)
    rng = random.Random(cfg.seed)
    for _ in range(cfg.random_count):
        rank = rng.choice([2, 3])
        h = random_subgroup(rng, rank, max_len=4, max_edges=8)
        yield f"<{', '.join(format_word(w) for w in h.words)}> (rank {rank})", h


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-vertices", type=int, default=4)
    ap.add_argument("--random-count", type=int, default=4)
    ap.add_argument("--seed", type=int, default=1)
    a = ap.parse_args()
    cfg = OracleConfig(a.max_vertices, a.random_count, a.seed)
    print(f"{'subgroup':40} {'LP sigma':>9} {'oracle':>8} {'graphs':>7} {'secs':>6}")
    for name, h in cases(cfg):
        lp = sigma(h, cross_check=False).sigma
        t0 = time.perf_counter()
        rep = oracle_enumerate(h.noncyclic_core(), cfg.max_vertices)
        secs = time.perf_counter() - t0
        flag = "" if rep.max_ratio <= lp else "  <-- oracle exceeds LP"
        print(f"{name:40} {str(lp):>9} {str(rep.max_ratio):>8} {rep.candidates:>7} {secs:6.2f}{flag}")


if __name__ == "__main__":
    main()
