"""Command-line interface.

Exit codes: 0 success (feasible, deceptive, certifying, satisfied), 1 a
negative verdict from verify/certify/check or a budget the optimum exceeds,
2 infeasible plan, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .alteration import as_cost, format_cost
from .automata import AutomatonError
from .builtins import ALIASES, BUILTIN_NAMES, builtin_doc, builtin_instance
from .formats import (
    FormatError,
    dumps,
    format_result_text,
    gen_random,
    instance_to_dict,
    load_instance,
    parse_alteration,
    result_doc,
)
from .ilp import build_model, check_assignment, export_lp, model_stats, solve
from .multicut import Digraph, connectify, parse_arc_list, reduce_to_mcsd
from .verifier import InstanceError, is_deceptive
from .world import is_certifying

EXIT_OK, EXIT_NO, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load(ref: str):
    if os.path.exists(ref):
        return load_instance(ref)
    name = ALIASES.get(ref, ref)
    if name in BUILTIN_NAMES:
        return builtin_instance(name)
    raise InputError(f"{ref!r} is neither a file nor a builtin instance")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(args, doc, text):
    if args.format == "structured":
        sys.stdout.write(dumps(doc))
    else:
        print(text)


def _plan_one(ref: str, cross_check: bool = True) -> dict:
    inst = _load(ref)
    return result_doc(inst.name or ref, solve(inst, cross_check=cross_check))


def cmd_plan(args) -> int:
    if args.all:
        if args.instance != "builtin":
            raise InputError("--all only supports 'builtin'")
        names = list(BUILTIN_NAMES)
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                docs = list(pool.map(_plan_one, names, [not args.no_cross_check] * len(names)))
        else:
            docs = [_plan_one(n, not args.no_cross_check) for n in names]
        if args.format == "structured":
            sys.stdout.write(dumps(docs))
        else:
            for d in docs:
                cost = d.get("cost", "-")
                print(f"{d['instance']:<18} {d['status']:<10} {cost}")
        return EXIT_OK
    inst = _load(args.instance)
    result = solve(inst, cross_check=not args.no_cross_check, timing=args.timing)
    doc = result_doc(inst.name or args.instance, result)
    if args.timing and "seconds" in result.stats:
        doc["stats"]["seconds"] = result.stats["seconds"]
    text = format_result_text(inst.name or args.instance, result)
    budget = args.budget if args.budget is not None else inst.budget
    verdict = EXIT_OK if result.feasible else EXIT_INFEASIBLE
    if budget is not None:
        budget = as_cost(budget)
        yes = result.feasible and result.cost <= budget
        doc["decision"] = {"budget": format_cost(budget), "answer": "yes" if yes else "no"}
        text += f"\ndecision (cost <= {format_cost(budget)}): {'yes' if yes else 'no'}"
        if result.feasible and not yes:
            verdict = EXIT_NO
    if args.export_lp or args.stats:
        model = build_model(inst)
        if args.export_lp:
            with open(args.export_lp, "w", encoding="utf-8") as fh:
                fh.write(export_lp(model))
        if args.stats:
            st = model_stats(model)
            doc["model"] = st
            text += "\nmodel: {} variables, {} constraints".format(
                st["total_variables"], st["total_constraints"]
            )
            text += "\n  " + ", ".join(f"{k}={v}" for k, v in st["constraints"].items())
    if args.timing and "seconds" in result.stats:
        text += f"\nseconds: {result.stats['seconds']}"
    _emit(args, doc, text)
    return verdict


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    alteration = parse_alteration(_read(args.alteration), inst.events)
    verdict = is_deceptive(inst, alteration)
    doc = {"instance": inst.name, **verdict.to_dict()}
    if verdict.deceptive:
        text = "deceptive: yes"
    else:
        obs = " ".join("{" + ",".join(x.elements()) + "}" for x in verdict.observed)
        text = f"deceptive: no\nwitness walk: {' '.join(verdict.walk)}\nobserved: {obs}"
    _emit(args, doc, text)
    return EXIT_OK if verdict.deceptive else EXIT_NO


def cmd_certify(args) -> int:
    inst = _load(args.instance)
    verdict = is_certifying(inst.world, inst.itinerary)
    doc = {"instance": inst.name, "certifying": verdict.certifying}
    text = f"certifying: {'yes' if verdict.certifying else 'no'}"
    if not verdict.certifying:
        doc["allowed_walk"] = list(verdict.allowed_walk)
        doc["other_walk"] = list(verdict.other_walk)
        text += f"\nallowed walk: {' '.join(verdict.allowed_walk)}"
        text += f"\nother walk:   {' '.join(verdict.other_walk)}"
    _emit(args, doc, text)
    return EXIT_OK if verdict.certifying else EXIT_NO


def cmd_gen(args) -> int:
    if args.what == "random":
        doc = gen_random(
            n_vertices=args.vertices, n_edges=args.edges, n_events=args.events, m=args.m,
            itinerary_density=args.itinerary_density, deviation_density=args.deviation_density,
            seed=args.seed, dfa_states=args.dfa_states,
        )
    else:
        name = args.what
        if name == "department":
            name = f"department-row{args.row}"
        try:
            doc = builtin_doc(name)
        except KeyError as exc:
            raise InputError(exc.args[0]) from exc
    sys.stdout.write(dumps(doc))
    return EXIT_OK


def cmd_reduce(args) -> int:
    try:
        arcs = parse_arc_list(_read(args.digraph))
        pairs = parse_arc_list(_read(args.pairs))
        g = Digraph.from_arcs(arcs, {x for p in pairs for x in p})
        g, pairs, k = connectify(g, pairs, args.k or 0)
        inst = reduce_to_mcsd(g, pairs, literal=args.literal)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    doc = instance_to_dict(inst)
    if args.k is not None:
        doc["budget"] = k
    sys.stdout.write(dumps(doc))
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args.instance)
    model = build_model(inst)
    try:
        raw = json.loads(_read(args.assignment))
    except json.JSONDecodeError as exc:
        raise InputError(f"assignment file: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(raw, dict):
        raise InputError("assignment file must be a JSON object of variable values")
    values = {}
    for k, v in raw.items():
        try:
            values[k] = Fraction(str(v))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad value for {k}: {v!r}") from exc
    unknown = sorted(set(values) - set(model.variables))
    if unknown:
        raise InputError(f"unknown variables: {', '.join(unknown[:5])}")
    try:
        report = check_assignment(model, values)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc
    doc = {"instance": inst.name, **report.to_dict()}
    text = [f"satisfied: {'yes' if report.satisfied else 'no'}",
            f"objective: {format_cost(report.objective)}",
            f"divergence: {'yes' if report.divergence else 'no'}"]
    for name, lhs, sense, rhs in report.violations[:20]:
        text.append(f"  violated {name}: {lhs} {sense} {rhs}")
    _emit(args, doc, "\n".join(text))
    return EXIT_OK if report.satisfied else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="deceptiplan", description="Plan minimum-cost deceptive sensor alterations."
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "structured"), default="text")

    sp = sub.add_parser("plan", help="compute an optimal alteration or prove infeasibility")
    sp.add_argument("instance", help="instance file or builtin name")
    sp.add_argument("--all", action="store_true", help="plan every builtin ('plan --all builtin')")
    sp.add_argument("--budget", help="decision-mode budget")
    sp.add_argument("--export-lp", metavar="PATH")
    sp.add_argument("--stats", action="store_true", help="report the integer program size")
    sp.add_argument("--timing", action="store_true", help="report wall-clock time")
    sp.add_argument("--no-cross-check", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("verify", help="check whether an alteration is deceptive")
    sp.add_argument("instance")
    sp.add_argument("--alteration", required=True, metavar="FILE")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("certify", help="check that the sensors certify the itinerary")
    sp.add_argument("instance")
    common(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("gen", help="print a builtin or random instance document")
    sp.add_argument("what", help="builtin name, 'department', 'fig4' or 'random'")
    sp.add_argument("--row", type=int, default=1, choices=range(1, 7))
    sp.add_argument("--seed", type=int)
    sp.add_argument("--vertices", type=int, default=4)
    sp.add_argument("--edges", type=int, default=6)
    sp.add_argument("--events", type=int, default=4)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--itinerary-density", type=float, default=0.5)
    sp.add_argument("--deviation-density", type=float, default=0.5)
    sp.add_argument("--dfa-states", type=int, default=3)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("reduce", help="encode a directed multicut instance")
    sp.add_argument("digraph", help="arc list file")
    sp.add_argument("pairs", help="source-target pair file")
    sp.add_argument("--k", type=int, help="cut budget; written as the instance budget")
    sp.add_argument("--literal", action="store_true", help="use the uncorrected encoding")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("check", help="evaluate an assignment against the integer program")
    sp.add_argument("instance")
    sp.add_argument("--assignment", required=True, metavar="FILE")
    common(sp)
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FormatError, InstanceError, AutomatonError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
