"""Survey sigma over random finitely generated subgroups.

Writes one JSON line per subgroup with sigma, brr, LP size and timings, then a
histogram of sigma values per ambient rank.

    python scripts/sigma_survey.py --ranks 2 3 --count 20 --max-edges 10
"""

from __future__ import annotations

import argparse
import json
import random
import time
from collections import Counter
from dataclasses import dataclass, field

from wnsigma.pipeline import random_subgroup, sigma
from wnsigma.um_graphs import format_word


@dataclass
class SurveyConfig:
    ranks: list[int] = field(default_factory=lambda: [2, 3])
    count: int = 20
    max_edges: int = 10
    max_len: int = 5
    seed: int = 0
    out: str | None = None


def run(cfg: SurveyConfig) -> dict[int, Counter]:
    rng = random.Random(cfg.seed)
    hist: dict[int, Counter] = {}
    sink = open(cfg.out, "w") if cfg.out else None
    try:
        for rank in cfg.ranks:
            hist[rank] = Counter()
            for _ in range(cfg.count):
                h = random_subgroup(rng, rank, n_words=(2, 4), max_len=cfg.max_len, max_edges=cfg.max_edges)
                t0 = time.perf_counter()
                rep = sigma(h)
                row = {
                    "rank": rank,
                    "generators": [format_word(w) for w in h.words],
                    "elapsed": round(time.perf_counter() - t0, 4),
                    **rep.to_dict(),
                }
                hist[rank][str(rep.sigma)] += 1
                line = json.dumps(row)
                if sink:
                    sink.write(line + "\n")
                else:
                    print(line)
    finally:
        if sink:
            sink.close()
    return hist


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ranks", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--max-edges", type=int, default=10)
    ap.add_argument("--max-len", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="JSON lines file (default: stdout)")
    a = ap.parse_args()
    cfg = SurveyConfig(a.ranks, a.count, a.max_edges, a.max_len, a.seed, a.out)
    for rank, counts in run(cfg).items():
        summary = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))
        print(f"# rank {rank}: {summary}")


if __name__ == "__main__":
    main()
