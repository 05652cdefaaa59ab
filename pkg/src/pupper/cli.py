"""SAT-competition style front end.

Output: ``c`` comment lines, then ``s SATISFIABLE`` with ``v`` model lines
(exit 10) or ``s UNKNOWN`` (exit 0).  The solver is incomplete, so it never
prints ``s UNSATISFIABLE``.  Usage and input errors exit 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pupper import __version__
from pupper.cnf import DimacsError, evaluate, model_literals, read_dimacs
from pupper.prioritizer import Policy
from pupper.solver import SolveOutcome, SolverConfig, multi_copy_solve

EXIT_SAT = 10
EXIT_UNKNOWN = 0
EXIT_ERROR = 1

STATS_SCHEMA_VERSION = 1
V_LINE_WIDTH = 4096


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def add_solver_arguments(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("solver")
    g.add_argument("--max-iters", type=int, default=1_000_000,
                   help="rebuild budget, shared by all copies unless --budget-per-copy")
    g.add_argument("--reset-freq", type=int, default=5)
    g.add_argument("--rho", type=float, default=0.9, help="EMA decay factor")
    g.add_argument("--copies", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--policy", choices=[p.value for p in Policy], default=Policy.HIGH_TO_LOW.value)
    g.add_argument("--no-reset", action="store_true", help="disable periodic resetting")
    g.add_argument("--best-update-first", action="store_true",
                   help="update the best assignment before a reset instead of after")
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--timeout-secs", type=float, default=None)
    g.add_argument("--budget-per-copy", action="store_true")


def config_from_args(args: argparse.Namespace) -> SolverConfig:
    try:
        return SolverConfig(
            max_iterations=args.max_iters,
            reset_frequency=args.reset_freq,
            rho=args.rho,
            num_copies=args.copies,
            seed=args.seed,
            priority_policy=Policy(args.policy),
            resetting_enabled=not args.no_reset,
            wall_clock_limit=args.timeout_secs,
            budget_per_copy=args.budget_per_copy,
            best_update_first=args.best_update_first,
            threads=args.threads,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pupper", description=__doc__.splitlines()[0])
    parser.add_argument("input", help="DIMACS CNF file")
    add_solver_arguments(parser)
    parser.add_argument("--stats-json", metavar="PATH", help="write run statistics as JSON")
    parser.add_argument("--verify", dest="verify", action="store_true", default=True,
                        help="re-check the model before printing it (default)")
    parser.add_argument("--no-verify", dest="verify", action="store_false")
    parser.add_argument("--lenient", action="store_true",
                        help="accept a clause count that disagrees with the header")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def v_lines(literals: list[int], width: int = V_LINE_WIDTH) -> list[str]:
    """Model lines, each at most ``width`` characters, the last ending in ``0``."""
    lines = []
    current = "v"
    for tok in [str(lit) for lit in literals] + ["0"]:
        if len(current) + 1 + len(tok) > width:
            lines.append(current)
            current = "v"
        current += " " + tok
    lines.append(current)
    return lines


def stats_dict(outcome: SolveOutcome, config: SolverConfig) -> dict:
    return {
        "schema_version": STATS_SCHEMA_VERSION,
        "status": outcome.status.value,
        "iterations_used": outcome.iterations_used,
        "best_count": outcome.best_count,
        "clause_count": outcome.clause_count,
        "elapsed_seconds": outcome.elapsed,
        "winning_copy": outcome.winning_copy,
        "seed": config.seed,
    }


def run_cli(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
    except UsageError as exc:
        print(f"pupper: error: {exc}", file=err)
        return EXIT_ERROR

    try:
        formula = read_dimacs(args.input, strict=not args.lenient)
    except OSError as exc:
        print(f"pupper: cannot read {args.input}: {exc.strerror or exc}", file=err)
        return EXIT_ERROR
    except DimacsError as exc:
        print(f"pupper: {args.input}: {exc}", file=err)
        return EXIT_ERROR

    print(f"c pupper {__version__}", file=out)
    print(f"c instance {args.input}: {formula.num_vars} variables, {formula.num_clauses} clauses",
          file=out)
    print(
        f"c config max_iters={config.max_iterations} reset_freq={config.reset_frequency} "
        f"rho={config.rho} copies={config.num_copies} seed={config.seed} "
        f"policy={config.priority_policy.value} reset={'on' if config.resetting_enabled else 'off'} "
        f"threads={config.threads} budget={'per-copy' if config.budget_per_copy else 'total'}",
        file=out,
    )

    outcome = multi_copy_solve(formula, config)

    print(f"c iterations {outcome.iterations_used}", file=out)
    print(f"c best {outcome.best_count}/{outcome.clause_count} clauses", file=out)
    print(f"c elapsed {outcome.elapsed:.3f} s", file=out)

    if args.stats_json:
        Path(args.stats_json).write_text(json.dumps(stats_dict(outcome, config)) + "\n")

    if not outcome.satisfiable:
        print("s UNKNOWN", file=out)
        return EXIT_UNKNOWN

    if args.verify and not evaluate(formula, outcome.assignment)[0]:
        print("pupper: internal error: model failed verification", file=err)
        return EXIT_ERROR
    if outcome.winning_copy is not None:
        print(f"c solved by copy {outcome.winning_copy}", file=out)
    print("s SATISFIABLE", file=out)
    for line in v_lines(model_literals(outcome.assignment)):
        print(line, file=out)
    return EXIT_SAT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
