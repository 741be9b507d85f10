"""Command line entry point.

Exit codes: 0 property holds or verdict reached, 1 property fails,
2 budget exhausted or verdict unknown, 3 input or precondition error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .errors import BudgetExceeded, DiagramError, GrscError, InsufficientData
from .graph_core import DEFAULT_CYCLE_BUDGET, Alphabet, format_graph, load_graph, parse_word, save_graph

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    return int(value) if value else default


def _emit(report: dict, args: argparse.Namespace, code: int) -> int:
    config = {k: v for k, v in vars(args).items() if k != "func" and not callable(v)}
    out = {"schema": SCHEMA_VERSION, "version": __version__, "config": config, "report": report, "exit": code}
    text = json.dumps(out, sort_keys=True, indent=1, default=str)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return code


# ---------------------------------------------------------------- handlers


def cmd_check(args) -> int:
    from .conditions import check_condition
    from .pieces import PieceIndex

    g = load_graph(args.graph)
    idx = PieceIndex(g, args.orbit_mode)
    rep = check_condition(g, idx, args.cond, args.budget)
    return _emit(rep.to_dict(), args, EXIT_OK if rep.holds else EXIT_FAIL)


def cmd_pieces(args) -> int:
    from .pieces import PieceIndex, maximal_pieces

    g = load_graph(args.graph)
    idx = PieceIndex(g)
    found = maximal_pieces(g, idx, args.max_len, args.essential)
    return _emit({"pieces": [p.to_dict() for p in found]}, args, EXIT_OK)


def cmd_present(args) -> int:
    from .presentation import conciseness_and_powers, relators_pi1, relators_simple_cycles

    g = load_graph(args.graph)
    p = relators_simple_cycles(g, args.budget) if args.mode == "simple" else relators_pi1(g, args.budget)
    report = p.to_dict()
    report["checks"] = conciseness_and_powers(p)
    return _emit(report, args, EXIT_OK)


def cmd_classify(args) -> int:
    from .presentation import classify

    g = load_graph(args.graph)
    c = classify(g, None, args.budget, witness=args.witness)
    report = c.to_dict()
    if report.get("witness"):
        report["witness"] = {k: v for k, v in report["witness"].items() if not k.endswith("_word")}
    return _emit(report, args, EXIT_UNKNOWN if c.verdict == "Inconclusive" else EXIT_OK)


def cmd_word(args) -> int:
    from .conditions import check_condition
    from .diagram import save_diagram
    from .presentation import relators_simple_cycles
    from .solver import derivation_to_diagram, solve

    g = load_graph(args.graph)
    rep = check_condition(g, None, args.cond, args.budget)
    p = relators_simple_cycles(g, args.budget)
    w = parse_word(args.word, g.alphabet)
    v = solve(w, p, rep, node_budget=args.nodes)
    report = v.to_dict(g.alphabet)
    report["condition"] = {"tag": rep.condition, "holds": rep.holds}
    if args.emit_diagram and v.verdict == "Trivial" and v.derivation:
        save_diagram(derivation_to_diagram(w, v.derivation, p), args.emit_diagram)
        report["diagram"] = args.emit_diagram
    code = {"Trivial": EXIT_OK, "Nontrivial": EXIT_FAIL}.get(v.verdict, EXIT_UNKNOWN)
    return _emit(report, args, code)


def cmd_diagram_verify(args) -> int:
    from .diagram import (area_bounds, curvature_I, curvature_II, forget_degree2, is_pq_diagram, lift_faces,
                          load_diagram, validate)
    from .pieces import PieceIndex

    d = load_diagram(args.diagram)
    try:
        v = validate(d)
    except DiagramError as exc:
        return _emit({"valid": False, "error": exc.to_dict()}, args, EXIT_FAIL)
    report = {"valid": True, "validation": v.to_dict(), "area": d.area}
    reduced = forget_degree2(d)
    report["pq"] = {"(3,6)": is_pq_diagram(reduced, 3, 6).to_dict(), "[3,6]": is_pq_diagram(reduced, 3, 6, True).to_dict(),
                    "(3,7)": is_pq_diagram(reduced, 3, 7).to_dict()}
    for name, fn in (("curvature_I", curvature_I), ("curvature_II", curvature_II)):
        try:
            report[name] = fn(reduced).to_dict()
        except GrscError as exc:
            report[name] = {"not_applicable": str(exc)}
    report["area_bounds"] = area_bounds(d)
    if args.graph:
        g = load_graph(args.graph)
        lifts = lift_faces(d, g, PieceIndex(g), gr_mode=args.gr)
        report["lifts"] = [x.to_dict() for x in lifts]
    return _emit(report, args, EXIT_OK)


def cmd_embed(args) -> int:
    from .conditions import check_condition
    from .geometry import CayleyBall, embed_component
    from .presentation import relators_pi1, relators_simple_cycles

    g = load_graph(args.graph)
    p = relators_pi1(g, args.budget) if args.relators == "pi1" else relators_simple_cycles(g, args.budget)
    cond = check_condition(g, None, args.cond, args.budget) if args.cond else None
    if cond is not None and not cond.holds:
        cond = None
    component = int(args.component) if args.component.isdigit() else args.component
    ball = CayleyBall(p, args.radius, cond if args.relators == "simple" else None, node_budget=args.nodes,
                      materialise=False)
    rep = embed_component(g, component, ball)
    report = rep.to_dict(g.alphabet)
    report["ball"] = ball.to_dict()
    if rep.isometric is True:
        code = EXIT_OK
    elif rep.isometric is False or rep.injective is False:
        code = EXIT_FAIL
    else:
        code = EXIT_UNKNOWN
    return _emit(report, args, code)


def cmd_lacunary(args) -> int:
    from .geometry import _graph_stats, lacunary_select, sparse_check

    g = load_graph(args.graph)
    seq = [g.component_graph(ci)[0] for ci in range(len(g.components))]
    girths, _ = _graph_stats(seq)
    sparse = sparse_check([x for x in girths if x > 0], Fraction(args.K))
    report = {"sparse": sparse.to_dict()}
    code = EXIT_OK if sparse.gap_found else EXIT_FAIL
    try:
        sel = lacunary_select(seq, "girth" if args.mode == "girth" else "search",
                              C=Fraction(args.C) if args.C else None, budget=args.nodes)
        report["selection"] = sel.to_dict()
    except InsufficientData as exc:
        report["selection"] = {"stalled": str(exc), "partial": exc.report.to_dict() if hasattr(exc, "report") else None}
        code = EXIT_UNKNOWN
    return _emit(report, args, code)


def cmd_gen(args) -> int:
    from .corpus import gen_cayley_cycle, gen_classical, gen_figure1, gen_figure5, figure5_union

    if args.kind == "figure1":
        g = gen_figure1()
    elif args.kind == "cayley-cycle":
        g = gen_cayley_cycle(args.k, args.letter)
    elif args.kind == "figure5":
        g = figure5_union(gen_figure5(args.p, args.n_max))
    else:
        if not args.alphabet or not args.relators:
            raise GrscError("classical needs --alphabet and --relators")
        alphabet = Alphabet(tuple(args.alphabet.split(",")))
        rels = [parse_word(r, alphabet) for r in args.relators.split(";") if r.strip()]
        g = gen_classical(rels, alphabet)
    if args.o:
        save_graph(g, args.o)
    else:
        sys.stdout.write(format_graph(g))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    cycles = _env_int("GRSC_BUDGET_CYCLES", DEFAULT_CYCLE_BUDGET)
    nodes = _env_int("GRSC_BUDGET_NODES", 10**5)
    parser = argparse.ArgumentParser(prog="grsc", description="Graphical small cancellation toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("graph")
        p.add_argument("--budget", type=int, default=cycles, help="simple cycle budget")
        p.add_argument("--out", help="also write the JSON report here")

    p = sub.add_parser("check", help="evaluate a small cancellation condition")
    common(p)
    p.add_argument("--cond", required=True)
    p.add_argument("--orbit-mode", choices=("union", "component"), default="union")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("pieces", help="list maximal pieces")
    common(p)
    p.add_argument("--essential", action="store_true")
    p.add_argument("--max-len", type=int, default=8)
    p.set_defaults(func=cmd_pieces)

    p = sub.add_parser("present", help="read a presentation off the graph")
    common(p)
    p.add_argument("--mode", choices=("simple", "pi1"), default="simple")
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("classify", help="trivial / cyclic / free / contains a free subgroup")
    common(p)
    p.add_argument("--witness", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("word", help="bounded word problem")
    common(p)
    p.add_argument("--cond", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--nodes", type=int, default=nodes, help="solver node budget")
    p.add_argument("--emit-diagram")
    p.set_defaults(func=cmd_word)

    p = sub.add_parser("diagram", help="diagram tools")
    dsub = p.add_subparsers(dest="action", required=True)
    q = dsub.add_parser("verify")
    q.add_argument("diagram")
    q.add_argument("--graph")
    q.add_argument("--gr", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_diagram_verify)

    p = sub.add_parser("embed", help="embedding of a component into the Cayley graph")
    common(p)
    p.add_argument("--component", default="0")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--cond")
    p.add_argument("--relators", choices=("simple", "pi1"), default="simple")
    p.add_argument("--nodes", type=int, default=20_000)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("lacunary", help="sparseness of girths and subsequence selection")
    common(p)
    p.add_argument("--mode", choices=("girth", "search"), default="girth")
    p.add_argument("--K", default="3")
    p.add_argument("--C")
    p.add_argument("--nodes", type=int, default=200_000)
    p.set_defaults(func=cmd_lacunary)

    p = sub.add_parser("gen", help="write a corpus graph")
    p.add_argument("kind", choices=("figure1", "classical", "figure5", "cayley-cycle"))
    p.add_argument("-o")
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--letter", default="a")
    p.add_argument("--p", type=int, default=6)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--alphabet")
    p.add_argument("--relators", help="semicolon separated words")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(json.dumps({"error": exc.to_dict(), "exit": EXIT_UNKNOWN}, sort_keys=True))
        return EXIT_UNKNOWN
    except GrscError as exc:
        print(json.dumps({"error": exc.to_dict(), "exit": EXIT_INPUT}, sort_keys=True))
        return EXIT_INPUT
    except OSError as exc:
        print(json.dumps({"error": {"cause": "io", "message": str(exc)}, "exit": EXIT_INPUT}, sort_keys=True))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
