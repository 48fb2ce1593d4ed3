"""Command-line entry point.

Exit codes: 0 success, 1 usage or malformed input, 2 infeasible instance,
3 enumeration budget or limit exceeded, 4 an acceptance criterion failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import acceptance, makespan, oracle, ptas, seqdp
from .gen import generate
from .instance import (
    Instance,
    InstanceParseError,
    InsufficientCapacity,
    InvalidInstance,
    format_rational,
    instance_to_dict,
    read_instance,
    validate,
    write_instance,
    write_schedule,
)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_FAILED = 0, 1, 2, 3, 4

METHODS = {
    ("sumcj", "exact"),
    ("wsumcj", "seq-dp"),
    ("wsumcj", "ptas"),
    ("makespan", "exact"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunReport:
    digest: str
    method: str
    objective: Fraction
    oracle: Fraction | None = None
    ratio: Fraction | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "instance": self.digest,
            "method": self.method,
            "objective": format_rational(self.objective),
            "oracle": None if self.oracle is None else format_rational(self.oracle),
            "ratio": None if self.ratio is None else format_rational(self.ratio),
            "wall_time": round(self.wall_time, 6),
        }


def instance_digest(instance: Instance) -> str:
    blob = json.dumps(instance_to_dict(instance), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _parse_sequence(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad sequence {text!r}") from exc


def _read(path: str) -> Instance:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return read_instance(text)


def _check_method(args) -> None:
    if (args.objective, args.method) not in METHODS:
        raise UsageError(f"method {args.method!r} does not apply to objective {args.objective!r}")
    if args.method == "ptas" and args.epsilon is None:
        raise UsageError("--method ptas needs --epsilon")
    if args.method == "ptas" and args.epsilon <= 0:
        raise UsageError("--epsilon must be positive")
    if args.method == "seq-dp" and args.sequence is None:
        raise UsageError("--method seq-dp needs --sequence")
    if args.sequence is not None and args.method != "seq-dp":
        raise UsageError("--sequence only applies to --method seq-dp")


def _solve(instance: Instance, args):
    if args.objective == "sumcj":
        return seqdp.solve_unweighted(instance)
    if args.objective == "makespan":
        return makespan.solve(instance)
    if args.method == "seq-dp":
        ids = sorted(j.id for j in instance.jobs)
        if sorted(args.sequence) != ids:
            raise UsageError(f"--sequence must be a permutation of job ids {ids}")
        return seqdp.optimal_reservation(args.sequence, instance)
    return ptas.run(instance, args.epsilon)


def _oracle_value(instance: Instance, args, budget) -> Fraction:
    if args.objective == "sumcj":
        return oracle.opt_unweighted(instance, budget).total
    if args.objective == "makespan":
        return oracle.opt_makespan(instance, budget).total
    if args.method == "seq-dp":
        return oracle.opt_fixed_sequence(instance, args.sequence, budget).total
    return oracle.opt_weighted(instance, budget).total


def cmd_solve(args) -> int:
    _check_method(args)
    instance = _read(args.input)
    sched = _solve(instance, args)
    sys.stdout.write(write_schedule(sched))
    return EXIT_OK


def _report_one(path: str, args) -> RunReport:
    instance = _read(path)
    budget = oracle.EnumerationBudget.from_env()
    if args.budget is not None:
        budget = oracle.EnumerationBudget(args.budget, budget.max_permutations)
    t0 = time.perf_counter()
    value = _solve(instance, args).total_cost
    elapsed = time.perf_counter() - t0
    opt = _oracle_value(instance, args, budget)
    if opt:
        ratio = value / opt
    else:
        ratio = Fraction(1) if value == 0 else None
    method = args.method if args.method != "ptas" else f"ptas(eps={format_rational(args.epsilon)})"
    return RunReport(instance_digest(instance), method, value, opt, ratio, elapsed)


def cmd_oracle(args) -> int:
    _check_method(args)
    if "-" in args.input and len(args.input) > 1:
        raise UsageError("standard input can only be combined with no other inputs")
    if args.jobs > 1 and len(args.input) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_report_one, args.input, [args] * len(args.input)))
    else:
        reports = [_report_one(p, args) for p in args.input]
    lines = [json.dumps(r.to_dict(), sort_keys=True) for r in reports]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.report:
        with open(args.report, "a", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        inst = generate(args.n, args.k, args.dmax, args.emax, args.machines, args.weighted, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    problems = validate(inst)
    if problems:  # pragma: no cover - the generator pads the horizon
        raise InvalidInstance(problems)
    sys.stdout.write(write_instance(inst))
    return EXIT_OK


def cmd_accept(args) -> int:
    numbers = args.criteria or sorted(acceptance.CRITERIA)
    unknown = [k for k in numbers if k not in acceptance.CRITERIA]
    if unknown:
        raise UsageError(f"unknown criteria {unknown}")
    ok = True
    for k in numbers:
        res = acceptance.CRITERIA[k]()
        print(res.line(), flush=True)
        for f in res.failures[:5]:
            print(f"    {f}")
        ok &= res.passed
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tariffsched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_flags(p, multi: bool):
        p.add_argument("--objective", required=True, choices=["sumcj", "wsumcj", "makespan"])
        p.add_argument("--method", required=True, choices=["exact", "seq-dp", "ptas"])
        p.add_argument("--epsilon", type=Fraction, help="accuracy for --method ptas, e.g. 0.2 or 1/5")
        p.add_argument("--sequence", type=_parse_sequence, help="job order for seq-dp, e.g. 2,1,3")
        if multi:
            p.add_argument("--input", required=True, nargs="+", help="instance files, or - for stdin")
        else:
            p.add_argument("--input", required=True, help="instance file, or - for stdin")

    p = sub.add_parser("solve", help="solve one instance and print the schedule JSON")
    solver_flags(p, multi=False)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="compare a method with brute force")
    solver_flags(p, multi=True)
    p.add_argument("--budget", type=int, help="cap on enumerated profiles (or slot subsets)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes across input files")
    p.add_argument("--report", help="append JSON-lines reports to this file")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="print a seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dmax", type=int, default=4, help="longest interval")
    p.add_argument("--emax", type=int, default=5, help="largest tariff")
    p.add_argument("--machines", type=int, default=1)
    p.add_argument("--weighted", type=_parse_bool, default=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("accept", help="run the acceptance suites")
    p.add_argument("--criteria", type=_parse_sequence, help="subset such as 1,2,6")
    p.set_defaults(func=cmd_accept)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tariffsched: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceParseError, OSError) as exc:
        print(f"tariffsched: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidInstance as exc:
        print(f"tariffsched: error: {exc}", file=sys.stderr)
        if all(v.startswith("feasibility violation") for v in exc.violations):
            return EXIT_INFEASIBLE
        return EXIT_USAGE
    except InsufficientCapacity as exc:
        print(f"tariffsched: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (oracle.BudgetExceeded, ptas.EnumerationLimitExceeded) as exc:
        print(f"tariffsched: budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
