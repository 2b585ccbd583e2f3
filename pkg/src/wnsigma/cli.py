"""Command line interface: ``wnsigma <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .errors import InternalConsistencyError
from .exact_lp import LpError
from .pipeline import (
    SubgroupInput,
    find_compression,
    oracle_enumerate,
    random_subgroup,
    shnc_check,
    sigma,
    strongly_inert,
)
from .pullback import component_reports
from .sli import build_sli
from .um_graphs import format_word, reduced_rank
from .witness import compute_witness


def _add_ambient(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rank", type=int, help="rank n of the free group (sets m = n + 1)")
    p.add_argument("--m", type=int, help="number of edges of the ambient graph (>= 3)")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")


def _add_input(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--words", help="words file, one generator per line")
    src.add_argument("--graph", help="graph JSON file")
    src.add_argument("--input", help="words file or .json graph file")
    _add_ambient(p)


def _ambient_args(args) -> dict:
    return {"rank": args.rank, "m": args.m}


def _load(args) -> SubgroupInput:
    path = args.words or args.graph or args.input
    if args.graph and not str(path).endswith(".json"):
        raise ValueError("--graph expects a .json file")
    if args.words:
        from .um_graphs import read_words

        return SubgroupInput.from_words(read_words(path), **_ambient_args(args))
    return SubgroupInput.from_path(path, **_ambient_args(args))


def _load_path(path: str, args) -> SubgroupInput:
    kw = _ambient_args(args)
    if kw["rank"] is None and kw["m"] is None and not path.endswith(".json"):
        raise ValueError("words files need --rank or --m")
    return SubgroupInput.from_path(path, **kw)


def _emit(args, data: dict, text: str) -> None:
    print(json.dumps(data, indent=2) if args.json else text)


def _write_dot(path: str | None, dot: str) -> None:
    if path:
        Path(path).write_text(dot)


def cmd_stallings(args) -> int:
    h = _load(args)
    g = h.based_graph()
    _write_dot(args.dot, g.graph.to_dot("stallings"))
    core = h.core_graph()
    brr = reduced_rank(core) if core.edges else 0
    text = f"vertices {g.graph.n_vertices}  edges {g.graph.n_edges}  base {g.base}  brr {brr}"
    _emit(args, g.to_dict(), text)
    return 0


def cmd_sigma(args) -> int:
    h = _load(args)
    out: list = []
    report = sigma(h, cross_check=not args.no_cross_check, witness_graph=out)
    _write_dot(args.dot, out[0].graph.to_dot("witness"))
    w = report.witness
    text = "\n".join(
        [
            f"sigma = {report.sigma}",
            f"brr(H) = {report.brr}  sigma*brr = {report.sigma_brr}  m = {report.m}",
            f"LP: {report.m_inq} inequalities, {report.n_inq} variables, {report.pivots} pivots",
            f"witness: {w['witness_vertices']} vertices, {w['witness_edges']} edges, brr {w['witness_brr']}, "
            f"attains sigma {w['sigma_check']}, connected {w['connected']}, size ok {w['size_ok']}",
        ]
    )
    _emit(args, report.to_dict(), text)
    return 0


def cmd_witness(args) -> int:
    h = _load(args)
    w = compute_witness(h.noncyclic_core())
    _write_dot(args.dot, w.graph.to_dot("witness"))
    data = {"summary": w.summary(), "graph": w.graph.to_dict()}
    if args.out:
        Path(args.out).write_text(json.dumps(w.graph.to_dict(), indent=2))
    text = json.dumps(w.summary())
    _emit(args, data, text)
    return 0


def cmd_pullback(args) -> int:
    h1 = _load_path(args.first, args)
    h2 = _load_path(args.second, args)
    if h1.m != h2.m:
        raise ValueError(f"mismatched m: {h1.m} vs {h2.m}")
    reports = component_reports(h1.based_graph(), h2.based_graph())
    if args.dot:
        from .pullback import pullback_core

        p = pullback_core(h1.based_graph().graph, h2.based_graph().graph)
        names = {w: f"{a},{b}" for w, (a, b) in p.vertex_pairs.items()}
        _write_dot(args.dot, p.graph.to_dot("pullback", names))
    lines = ["component  brr  vertices  edges  basepoint  coset_rep"]
    for r in reports:
        word = "-" if r.coset_word is None else format_word(r.coset_word)
        lines.append(f"{r.component_id:>9}  {r.brr:>3}  {r.n_vertices:>8}  {r.n_edges:>5}  {str(r.basepoint):>9}  {word}")
    lines.append(f"generalized reduced rank = {sum(r.brr for r in reports)}")
    _emit(args, {"components": [r.to_dict() for r in reports]}, "\n".join(lines))
    return 0


def cmd_shnc(args) -> int:
    if args.random:
        if args.rank is None:
            raise ValueError("--random needs --rank")
        rng = random.Random(args.seed)
        rows = []
        for _ in range(args.random):
            h1 = random_subgroup(rng, args.rank, noncyclic=False)
            h2 = random_subgroup(rng, args.rank, noncyclic=False)
            rows.append(shnc_check(h1, h2).to_dict())
        failures = sum(not (r["shnc_ok"] and r["weak_ok"]) for r in rows)
        _emit(args, {"pairs": rows, "failures": failures}, f"{len(rows)} pairs, {failures} failures")
        return 0 if not failures else 2
    if not (args.first and args.second):
        raise ValueError("give two inputs or --random N")
    rep = shnc_check(_load_path(args.first, args), _load_path(args.second, args))
    text = (
        f"brr(H1,H2) = {rep.brr12}  brr(H1)*brr(H2) = {rep.product}  "
        f"SHNC {'pass' if rep.shnc_ok else 'FAIL'}  factor-2 bound {'pass' if rep.weak_ok else 'FAIL'}"
    )
    _emit(args, rep.to_dict(), text)
    return 0


def cmd_strongly_inert(args) -> int:
    h = _load(args)
    result = strongly_inert(h)
    _emit(args, {"strongly_inert": result}, f"strongly inert: {result}")
    return 0


def cmd_compressed(args) -> int:
    h = _load(args)
    comp = find_compression(h)
    data = {"compressed": comp is None}
    text = f"compressed: {comp is None}"
    if comp is not None:
        data["quotient"] = comp.quotient.to_dict()
        data["quotient_brr"] = comp.brr
        text += f"  (quotient with brr {comp.brr} < {h.brr()})"
        _write_dot(args.dot, comp.quotient.to_dot("quotient"))
    _emit(args, data, text)
    return 0


def cmd_oracle(args) -> int:
    h = _load(args)
    rep = oracle_enumerate(h.noncyclic_core(), args.max_vertices)
    text = (
        f"max ratio over {rep.candidates} graphs with <= {rep.max_vertices} vertices: {rep.max_ratio}\n"
        f"heuristic Hanna Neumann lower bound: {rep.hn_lower_bound}"
    )
    if rep.graph is not None:
        _write_dot(args.dot, rep.graph.to_dot("oracle"))
    _emit(args, rep.to_dict(), text)
    return 0


def cmd_export_lp(args) -> int:
    h = _load(args)
    s = build_sli(h.noncyclic_core())
    body = json.dumps(s.to_dict(), indent=2) if args.format == "json" else s.to_lp_text()
    if args.out:
        Path(args.out).write_text(body)
        print(f"wrote {s.m_inq} inequalities over {s.n_inq} variables to {args.out}")
    else:
        sys.stdout.write(body)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wnsigma", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stallings", help="Stallings graph of a subgroup")
    _add_input(p)
    p.add_argument("--dot")
    p.set_defaults(func=cmd_stallings)

    p = sub.add_parser("sigma", help="Walter Neumann coefficient")
    _add_input(p)
    p.add_argument("--dot", help="write the witness graph as DOT")
    p.add_argument("--no-cross-check", action="store_true", help="skip the primal solve")
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("witness", help="extremal witness graph")
    _add_input(p)
    p.add_argument("--dot")
    p.add_argument("--out", help="write the witness graph JSON here")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("pullback", help="components of the pullback core")
    p.add_argument("first")
    p.add_argument("second")
    _add_ambient(p)
    p.add_argument("--dot")
    p.set_defaults(func=cmd_pullback)

    p = sub.add_parser("shnc", help="check the Hanna Neumann bounds")
    p.add_argument("first", nargs="?")
    p.add_argument("second", nargs="?")
    _add_ambient(p)
    p.add_argument("--random", type=int, default=0, help="check N random pairs instead")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_shnc)

    p = sub.add_parser("strongly-inert", help="decide strong inertness")
    _add_input(p)
    p.set_defaults(func=cmd_strongly_inert)

    p = sub.add_parser("compressed", help="decide compressedness")
    _add_input(p)
    p.add_argument("--dot")
    p.set_defaults(func=cmd_compressed)

    p = sub.add_parser("oracle", help="brute-force lower bound for sigma")
    _add_input(p)
    p.add_argument("--max-vertices", type=int, default=4)
    p.add_argument("--dot")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-lp", help="write the inequality system")
    _add_input(p)
    p.add_argument("--out")
    p.add_argument("--format", choices=["lp", "json"], default="lp")
    p.set_defaults(func=cmd_export_lp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, LpError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
