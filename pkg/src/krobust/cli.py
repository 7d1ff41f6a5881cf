"""Command-line front end: instance I/O, solvers, oracle, comparison.

Instances travel as JSON documents whose numbers are exact: rationals are
written as "p/q" or decimal strings and floating-point literals are rejected
outright, so a parse -> serialize -> parse round trip is the identity.
Reports go to standard output, diagnostics to standard error.

Exit codes: 0 success, 2 bad input or parameters, 3 trivial instance,
4 instance too large for exhaustive search, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import mincut, setcover, steiner
from .errors import (BadParameters, InstanceFormatError, KRobustError,
                     TooLarge, TrivialInstance)
from .fixtures import gen_lowerbound_allstages, gen_random, gen_subset_krobust_bad
from .graphcore import WeightedGraph
from .model import (CARDINALITY, MINCUT, PROBLEM_KINDS, SETCOVER,
                    STEINERFOREST, STEINERTREE, SUBSET, ProblemInstance,
                    Schedule, UncertaintySpec, evaluate_thrifty,
                    validate_schedule)
from .oracle import (SizeLimits, exhaustive_robcov, minimax_opt, opt_bounds,
                     partwise_minimax)
from .setcover import SetSystem

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TRIVIAL = 3
EXIT_TOOLARGE = 4
EXIT_INVARIANT = 5


# ------------------------------------------------------------- document I/O

def _frac(value, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise InstanceFormatError(path, f"expected an exact rational, got {value!r}")
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(path, f"bad rational {value!r} ({exc})") from None


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceFormatError(path, f"expected an integer, got {value!r}")
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise InstanceFormatError(path, f"expected a list, got {value!r}")
    return value


def load_document(path: str):
    """Read a JSON document, rejecting floating-point literals."""

    def no_floats(text: str):
        raise InstanceFormatError(
            path, f"floating-point literal {text}; write rationals as strings")

    with open(path) as fh:
        try:
            return json.load(fh, parse_float=no_floats)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(path, f"invalid JSON: {exc}") from None


def parse_instance(doc) -> ProblemInstance:
    """Validate a document into a ProblemInstance, naming the bad field."""
    if not isinstance(doc, dict):
        raise InstanceFormatError("$", "instance document must be an object")
    kind = doc.get("problem")
    if kind not in PROBLEM_KINDS:
        raise InstanceFormatError(
            "problem", f"must be one of {', '.join(PROBLEM_KINDS)}, got {kind!r}")
    sched_doc = doc.get("schedule")
    if not isinstance(sched_doc, dict):
        raise InstanceFormatError("schedule", "expected an object")
    T = _int(sched_doc.get("T"), "schedule.T")
    k = [_int(x, f"schedule.k[{i}]")
         for i, x in enumerate(_list(sched_doc.get("k"), "schedule.k"))]
    lams = [_frac(x, f"schedule.lambda[{i}]")
            for i, x in enumerate(_list(sched_doc.get("lambda"), "schedule.lambda"))]
    if len(k) != T + 1:
        raise InstanceFormatError("schedule.k", f"need {T + 1} entries for T={T}")
    if len(lams) != T + 1:
        raise InstanceFormatError("schedule.lambda", f"need {T + 1} entries for T={T}")
    schedule = Schedule(T, tuple(k), tuple(lams))

    unc_doc = doc.get("uncertainty", {"kind": CARDINALITY})
    if not isinstance(unc_doc, dict):
        raise InstanceFormatError("uncertainty", "expected an object")
    unc_kind = unc_doc.get("kind")
    if unc_kind == CARDINALITY:
        uncertainty = UncertaintySpec(CARDINALITY)
    elif unc_kind == SUBSET:
        parts = []
        for i, raw in enumerate(_list(unc_doc.get("parts"), "uncertainty.parts")):
            parts.append(frozenset(
                _int(e, f"uncertainty.parts[{i}][{j}]")
                for j, e in enumerate(_list(raw, f"uncertainty.parts[{i}]"))))
        uncertainty = UncertaintySpec(SUBSET, tuple(parts))
    else:
        raise InstanceFormatError(
            "uncertainty.kind", f"must be cardinality or subset, got {unc_kind!r}")

    if kind == SETCOVER:
        sets = []
        for i, raw in enumerate(_list(doc.get("sets"), "sets")):
            if not isinstance(raw, dict):
                raise InstanceFormatError(f"sets[{i}]", "expected an object")
            members = [_int(e, f"sets[{i}].members[{j}]")
                       for j, e in enumerate(_list(raw.get("members"),
                                                   f"sets[{i}].members"))]
            sets.append((frozenset(members), _frac(raw.get("cost"),
                                                   f"sets[{i}].cost")))
        payload = SetSystem.build(schedule.k[0], sets)
    else:
        gdoc = doc.get("graph")
        if not isinstance(gdoc, dict):
            raise InstanceFormatError("graph", "expected an object")
        n = _int(gdoc.get("n"), "graph.n")
        edges = []
        for i, raw in enumerate(_list(gdoc.get("edges"), "graph.edges")):
            raw = _list(raw, f"graph.edges[{i}]")
            if len(raw) != 3:
                raise InstanceFormatError(f"graph.edges[{i}]",
                                          "expected [u, v, cost]")
            edges.append((_int(raw[0], f"graph.edges[{i}][0]"),
                          _int(raw[1], f"graph.edges[{i}][1]"),
                          _frac(raw[2], f"graph.edges[{i}][2]")))
        root = gdoc.get("root")
        pairs = []
        for i, raw in enumerate(_list(gdoc.get("pairs", []), "graph.pairs")):
            raw = _list(raw, f"graph.pairs[{i}]")
            if len(raw) != 2:
                raise InstanceFormatError(f"graph.pairs[{i}]", "expected [s, t]")
            pairs.append((_int(raw[0], f"graph.pairs[{i}][0]"),
                          _int(raw[1], f"graph.pairs[{i}][1]")))
        if kind == MINCUT:
            root = _int(root, "graph.root")
        elif root is not None:
            raise InstanceFormatError("graph.root", f"{kind} takes no root")
        if kind == STEINERFOREST:
            if not pairs:
                raise InstanceFormatError("graph.pairs",
                                          "steinerforest needs at least one pair")
        elif pairs:
            raise InstanceFormatError("graph.pairs", f"{kind} takes no pairs")
        try:
            payload = WeightedGraph.build(n, edges, root=root, pairs=pairs)
        except ValueError as exc:
            raise InstanceFormatError("graph", str(exc)) from None

    inst = ProblemInstance(kind, payload, schedule, uncertainty)
    validate_schedule(schedule, len(inst.units()))
    uncertainty.validate(schedule, inst.units())
    return inst


def serialize_instance(inst: ProblemInstance) -> dict:
    doc = {
        "problem": inst.kind,
        "schedule": {"T": inst.schedule.horizon,
                     "k": list(inst.schedule.k),
                     "lambda": [str(x) for x in inst.schedule.lam]},
    }
    if inst.uncertainty.kind == SUBSET:
        doc["uncertainty"] = {"kind": SUBSET,
                              "parts": [sorted(p) for p in inst.uncertainty.parts]}
    else:
        doc["uncertainty"] = {"kind": CARDINALITY}
    if inst.kind == SETCOVER:
        doc["sets"] = [{"members": sorted(members), "cost": str(cost)}
                       for members, cost in inst.payload.sets]
    else:
        g = inst.payload
        graph: dict = {"n": g.n,
                       "edges": [[e.u, e.v, str(e.cost)] for e in g.edges]}
        if g.root is not None:
            graph["root"] = g.root
        if g.pairs:
            graph["pairs"] = [[p.s, p.t] for p in g.pairs]
        doc["graph"] = graph
    return doc


# ------------------------------------------------------------------ commands

def _trivial_check(inst: ProblemInstance) -> None:
    kT = inst.schedule.k[inst.schedule.horizon]
    if kT == 0:
        raise TrivialInstance("k_T = 0: nothing is ever required")
    if inst.kind == STEINERTREE and kT <= 1:
        raise TrivialInstance("k_T <= 1: a lone vertex needs no connection")


def _run_solver(inst: ProblemInstance, beta, guess, preprocess: bool,
                merge_r):
    if inst.uncertainty.kind == SUBSET:
        raise BadParameters(
            "thrifty solvers handle the cardinality adversary only; "
            "use the oracle subcommand for part-structured uncertainty")
    _trivial_check(inst)
    validate_schedule(inst.schedule, len(inst.units()))
    kind = inst.kind
    if kind == SETCOVER and preprocess:
        raise BadParameters("cost scaling applies to graph problems only")
    if guess is not None:
        if kind == SETCOVER:
            plan = setcover.thrifty_plan(inst.payload, inst.schedule, guess, beta)
        elif kind == MINCUT:
            plan = mincut.thrifty_plan(inst.payload, inst.schedule, guess, beta)
        elif kind == STEINERTREE:
            plan = steiner.thrifty_tree_plan(inst.payload, inst.schedule,
                                             guess, beta)
        else:
            plan = steiner.thrifty_forest_plan(inst.payload, inst.payload.pairs,
                                               inst.schedule, guess, beta)
        return plan, evaluate_thrifty(plan, inst.schedule, inst.units())
    if kind == SETCOVER:
        return setcover.solve(inst.payload, inst.schedule, beta)
    if kind == MINCUT:
        return mincut.solve(inst.payload, inst.schedule, beta,
                            preprocess=preprocess, merge_r=merge_r)
    if kind == STEINERTREE:
        return steiner.solve_tree(inst.payload, inst.schedule, beta,
                                  preprocess=preprocess, merge_r=merge_r)
    return steiner.solve_forest(inst.payload, inst.payload.pairs,
                                inst.schedule, beta,
                                preprocess=preprocess, merge_r=merge_r)


def _solve_report(plan, report) -> dict:
    doc = {
        "robcov": str(report.robcov),
        "day0_cost": str(plan.day0_cost),
        "jstar": plan.critical_day,
        "tau": str(plan.tau),
        "guess": str(plan.guess),
        "net": sorted(plan.net),
        "day0_purchase": sorted(plan.day0_purchase),
        "conservative": report.conservative,
        "witness": list(report.witness),
    }
    if plan.preprocess_f is not None:
        doc["preprocess_f"] = plan.preprocess_f
    return doc


def _emit(doc) -> None:
    print(json.dumps(doc))


def cmd_generate(args) -> int:
    if args.family == "lowerbound-allstages":
        inst = gen_lowerbound_allstages(args.horizon, Fraction(args.eps))
    elif args.family == "subset-krobust-bad":
        inst, _ = gen_subset_krobust_bad(args.horizon, args.lam)
    else:
        if args.kind is None:
            raise BadParameters("generate needs --kind or --family")
        inst = gen_random(args.kind, args.n, args.actions, args.horizon,
                          args.seed)
    _emit(serialize_instance(inst))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = parse_instance(load_document(args.instance))
    plan, report = _run_solver(inst, args.beta_override, args.guess,
                               args.preprocess == "cost-scaling", args.merge_r)
    _emit(_solve_report(plan, report))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    inst = parse_instance(load_document(args.instance))
    plan, report = _run_solver(inst, args.beta_override, args.guess,
                               args.preprocess == "cost-scaling", args.merge_r)
    doc = {
        "robcov": str(report.robcov),
        "day0_cost": str(report.day0_cost),
        "worst_day_cost": str(report.worst_day_cost),
        "witness": list(report.witness),
        "conservative": report.conservative,
    }
    try:
        doc["exhaustive"] = str(exhaustive_robcov(inst, plan, args.limits))
    except TooLarge:
        pass
    _emit(doc)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = parse_instance(load_document(args.instance))
    try:
        opt, trace = minimax_opt(inst, args.limits,
                                 full_adversary=args.full_adversary,
                                 inactive_days=args.inactive_days)
    except TooLarge:
        # Partitioned single-survivor instances get arbitrarily many ground
        # units but stay exactly evaluable; fall back to the closed evaluator
        # (it yields no purchase trace, so days_with_purchase is omitted).
        # Its work grows with the horizon only, so that cap still applies.
        lims = args.limits if args.limits is not None else SizeLimits()
        if (inst.uncertainty.kind != SUBSET or args.full_adversary
                or inst.schedule.horizon > lims.max_horizon):
            raise
        try:
            opt = partwise_minimax(inst.payload, inst.schedule,
                                   inst.uncertainty.parts,
                                   args.inactive_days)
        except BadParameters:
            raise TooLarge(
                "instance exceeds game-search limits and lacks the "
                "partitioned single-survivor structure") from None
        _emit({"opt": str(opt)})
        return EXIT_OK
    days = set()

    def walk(node):
        if node.purchase:
            days.add(node.day)
        for _, child in node.children:
            walk(child)

    walk(trace)
    _emit({"opt": str(opt), "days_with_purchase": sorted(days)})
    return EXIT_OK


def _compare_one(inst: ProblemInstance, limits) -> tuple[dict, str | None]:
    """One comparison document plus a diagnostic if the invariant chain broke."""
    try:
        _trivial_check(inst)
    except TrivialInstance:
        return ({"opt": "0", "algo": "0", "ratio": "n/a",
                 "exhaustive_algo": "0",
                 "bounds": {"lb": "0", "ub": "0"}}, None)
    plan, report = _run_solver(inst, None, None, False, 2)
    opt, _ = minimax_opt(inst, limits)
    exhaustive = exhaustive_robcov(inst, plan, limits)
    lb, ub = opt_bounds(inst)
    doc = {
        "opt": str(opt),
        "algo": str(report.robcov),
        "ratio": "n/a" if opt == 0 else str(report.robcov / opt),
        "exhaustive_algo": str(exhaustive),
        "bounds": {"lb": str(lb), "ub": str(ub)},
    }
    problem = None
    if not lb <= opt <= exhaustive <= report.robcov:
        problem = (f"invariant chain violated: lb={lb} opt={opt} "
                   f"exhaustive={exhaustive} algo={report.robcov}")
    return doc, problem


def cmd_compare(args) -> int:
    if args.batch is not None:
        if args.instance is not None:
            raise BadParameters("--batch replaces the instance argument")
        if args.kind is None:
            raise BadParameters("--batch needs --kind")
        for i in range(args.batch):
            inst = gen_random(args.kind, args.n, args.actions, args.horizon,
                              args.seed * 1_000_003 + i)
            doc, problem = _compare_one(inst, args.limits)
            _emit(doc)
            if problem:
                print(f"instance {i}: {problem}", file=sys.stderr)
                return EXIT_INVARIANT
        return EXIT_OK
    if args.instance is None:
        raise BadParameters("compare needs an instance file or --batch")
    inst = parse_instance(load_document(args.instance))
    doc, problem = _compare_one(inst, args.limits)
    _emit(doc)
    if problem:
        print(problem, file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


# -------------------------------------------------------------------- parser

def _frac_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}")


def _limits_arg(text: str) -> SizeLimits:
    try:
        units, actions, horizon = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected max_units,max_actions,max_horizon, got {text!r}")
    return SizeLimits(units, actions, horizon)


def _days_arg(text: str) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected day,day,..., got {text!r}")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta-override", type=_frac_arg, default=None,
                   dest="beta_override",
                   help="replace the per-problem threshold constant")
    p.add_argument("--guess", type=_frac_arg, default=None,
                   help="skip the doubling grid and use this single guess")
    p.add_argument("--preprocess", choices=("none", "cost-scaling"),
                   default="none",
                   help="graph problems: scale costs and merge stages first")
    p.add_argument("--merge-r", type=_frac_arg, default=Fraction(2),
                   dest="merge_r",
                   help="inflation ratio kept by stage merging (default 2)")


def _add_sizes(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=5,
                   help="ground size: elements or vertices (default 5)")
    p.add_argument("--actions", type=int, default=8,
                   help="number of sets or edges (default 8)")
    p.add_argument("--horizon", type=int, default=2,
                   help="number of revelation days T (default 2)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krobust",
        description="Thrifty solvers and exact oracles for multistage "
                    "k-robust covering problems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a random or adversarial instance")
    p.add_argument("--kind", choices=PROBLEM_KINDS, default=None,
                   help="random instance of this problem")
    p.add_argument("--family",
                   choices=("lowerbound-allstages", "subset-krobust-bad"),
                   default=None, help="adversarial family instead of random")
    _add_sizes(p)
    p.add_argument("--eps", type=_frac_arg, default=Fraction(2, 5),
                   help="inflation step of the all-stages family (default 2/5)")
    p.add_argument("--lam", type=int, default=4,
                   help="inflation base of the partitioned family (default 4)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run the thrifty solver on an instance")
    p.add_argument("instance", help="instance JSON file")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evaluate",
                       help="solve, then report worst-case cost details")
    p.add_argument("instance", help="instance JSON file")
    _add_solver_flags(p)
    p.add_argument("--limits", type=_limits_arg, default=None,
                   help="exhaustive-search caps as units,actions,horizon")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("oracle", help="exact adaptive optimum by game search")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--limits", type=_limits_arg, default=None,
                   help="exhaustive-search caps as units,actions,horizon")
    p.add_argument("--full-adversary", action="store_true",
                   dest="full_adversary",
                   help="enumerate non-maximal adversary moves too")
    p.add_argument("--inactive-days", type=_days_arg, default=(),
                   dest="inactive_days",
                   help="forbid purchases on these days, e.g. 1,2")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare",
                       help="solver vs exact oracle with invariant checks")
    p.add_argument("instance", nargs="?", default=None,
                   help="instance JSON file (omit with --batch)")
    p.add_argument("--limits", type=_limits_arg, default=None,
                   help="exhaustive-search caps as units,actions,horizon")
    p.add_argument("--batch", type=int, default=None,
                   help="compare this many seeded random instances")
    p.add_argument("--kind", choices=PROBLEM_KINDS, default=None,
                   help="problem kind for --batch")
    _add_sizes(p)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrivialInstance as exc:
        _emit({"robcov": "0"})
        print(f"trivial instance: {exc}", file=sys.stderr)
        return EXIT_TRIVIAL
    except TooLarge as exc:
        print(f"too large for exhaustive search: {exc}", file=sys.stderr)
        return EXIT_TOOLARGE
    except InstanceFormatError as exc:
        print(f"bad instance: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KRobustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
