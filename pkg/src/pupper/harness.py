"""Benchmark suites: run the solver over a directory of CNF files and report.

A run writes ``report.json``, ``report.csv`` and PNG figures into the output
directory.  Timing aggregates cover solved instances only.

Per-instance seeds are derived from the suite seed and the file name, so the
result for a file does not depend on which other files sit next to it.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from pupper import figures
from pupper.cli import UsageError, _Parser, add_solver_arguments, config_from_args
from pupper.cnf import DimacsError, read_dimacs, write_dimacs
from pupper.generators import generate_planted_ksat, generate_uniform_ksat
from pupper.prioritizer import Policy
from pupper.solver import SolverConfig, multi_copy_solve

CSV_COLUMNS = ["path", "status", "iterations", "elapsed_s", "best_count", "clauses"]
REPORT_SCHEMA_VERSION = 1

ABLATIONS = {
    "full": {},
    "no-priorities": {"priority_policy": Policy.RANDOM},
    "no-reset": {"resetting_enabled": False},
}


@dataclass
class InstanceRecord:
    path: str
    status: str
    iterations_used: int = 0
    elapsed: float = 0.0
    best_count: int = 0
    clause_count: int = 0
    error: Optional[str] = None

    @property
    def solved(self) -> bool:
        return self.status == "SATISFIABLE"


@dataclass
class Aggregates:
    solved_count: int
    average_time: Optional[float]
    median_time: Optional[float]
    maximum_time: Optional[float]

    @classmethod
    def from_records(cls, records) -> "Aggregates":
        times = [r.elapsed for r in records if r.solved]
        if not times:
            return cls(0, None, None, None)
        return cls(len(times), statistics.fmean(times), statistics.median(times), max(times))


@dataclass
class SuiteReport:
    records: list[InstanceRecord] = field(default_factory=list)
    aggregates: Aggregates = field(default_factory=lambda: Aggregates(0, None, None, None))
    config: dict = field(default_factory=dict)

    @classmethod
    def build(cls, records, config: dict | None = None) -> "SuiteReport":
        records = list(records)
        return cls(records, Aggregates.from_records(records), config or {})

    @property
    def solved_count(self) -> int:
        return self.aggregates.solved_count

    def check_aggregates(self) -> bool:
        return Aggregates.from_records(self.records) == self.aggregates

    def to_json(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "config": self.config,
            "aggregates": asdict(self.aggregates),
            "records": [asdict(r) for r in self.records],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SuiteReport":
        return cls(
            [InstanceRecord(**r) for r in data["records"]],
            Aggregates(**data["aggregates"]),
            data.get("config", {}),
        )

    def write(self, out_dir, *, plots: bool = True) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(self.to_json(), indent=2) + "\n")
        with open(out / "report.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in self.records:
                writer.writerow([r.path, r.status, r.iterations_used, f"{r.elapsed:.6f}",
                                 r.best_count, r.clause_count])
        if plots:
            figures.cactus_plot({"pupper": [r.elapsed for r in self.records if r.solved]},
                                out / "cactus.png")
            ok = [r for r in self.records if r.status != "ERROR" and r.clause_count]
            figures.best_fraction_plot([Path(r.path).stem for r in ok],
                                       [r.best_count / r.clause_count for r in ok],
                                       out / "best_fraction.png")
        return out


def instance_seed(suite_seed: int, name: str) -> int:
    digest = hashlib.blake2b(f"{suite_seed}:{name}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def run_instance(path, config: SolverConfig, time_limit: float | None = None) -> InstanceRecord:
    path = Path(path)
    try:
        formula = read_dimacs(path)
    except (OSError, DimacsError, UnicodeDecodeError) as exc:
        return InstanceRecord(str(path), "ERROR", error=str(exc))
    cfg = config.replace(seed=instance_seed(config.seed, path.name),
                         wall_clock_limit=time_limit or config.wall_clock_limit)
    outcome = multi_copy_solve(formula, cfg)
    return InstanceRecord(str(path), outcome.status.value, outcome.iterations_used,
                          outcome.elapsed, outcome.best_count, outcome.clause_count)


def _config_summary(config: SolverConfig, time_limit) -> dict:
    summary = asdict(config)
    summary["priority_policy"] = config.priority_policy.value
    summary["time_limit"] = time_limit
    return summary


def run_suite(directory, config: SolverConfig, time_limit: float | None = None,
              out_dir=None, *, jobs: int = 1, plots: bool = True) -> SuiteReport:
    paths = sorted(Path(directory).glob("*.cnf"))
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run_instance, paths, [config] * len(paths),
                                    [time_limit] * len(paths)))
    else:
        records = [run_instance(p, config, time_limit) for p in paths]
    report = SuiteReport.build(records, _config_summary(config, time_limit))
    if out_dir is not None:
        report.write(out_dir, plots=plots)
    return report


def run_ablation(directory, config: SolverConfig, time_limit: float | None = None,
                 out_dir=None, *, jobs: int = 1) -> dict[str, SuiteReport]:
    """Full solver against the no-priorities and no-reset variants on one suite."""
    reports = {}
    for name, changes in ABLATIONS.items():
        sub = None if out_dir is None else Path(out_dir) / name
        reports[name] = run_suite(directory, config.replace(**changes), time_limit, sub,
                                  jobs=jobs, plots=False)
    if out_dir is not None:
        out = Path(out_dir)
        total = len(next(iter(reports.values())).records)
        figures.ablation_bars({k: r.solved_count for k, r in reports.items()}, total,
                              out / "ablation.png")
        figures.cactus_plot({k: [x.elapsed for x in r.records if x.solved]
                             for k, r in reports.items()}, out / "cactus.png")
        with open(out / "ablation.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mode", "solved", "instances", "avg_s", "median_s", "max_s"])
            for k, r in reports.items():
                a = r.aggregates
                writer.writerow([k, a.solved_count, len(r.records), a.average_time,
                                 a.median_time, a.maximum_time])
    return reports


def read_config_file(path) -> dict[str, str]:
    """``key = value`` lines; keys are the long flag names without dashes."""
    parser = configparser.ConfigParser()
    parser.read_string("[suite]\n" + Path(path).read_text())
    return {k.replace("-", "_"): v for k, v in parser["suite"].items()}


def config_flags(values: dict[str, str]) -> list[str]:
    """Turn config-file entries into flags; explicit command-line flags come later and win."""
    flags = []
    for key, value in values.items():
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            flags.append(flag)
        elif value.lower() not in ("false", "no", "off"):
            flags += [flag, value]
    return flags


def generate_suite(out_dir, count: int, n: int, m: int, k: int = 3, seed: int = 0,
                   planted: bool = True) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    kind = "planted" if planted else "uniform"
    paths = []
    for i in range(count):
        rng = instance_seed(seed, f"{kind}-{i}")
        if planted:
            formula, _ = generate_planted_ksat(n, m, k, rng)
        else:
            formula = generate_uniform_ksat(n, m, k, rng)
        path = out / f"{kind}-{k}sat-n{n}-m{m}-{i:03d}.cnf"
        with open(path, "w") as fh:
            fh.write(f"c {kind} {k}-SAT, seed {seed}, index {i}\n")
            write_dimacs(formula, fh)
        paths.append(path)
    return paths


def _print_report(name: str, report: SuiteReport, out=None) -> None:
    out = out or sys.stdout
    a = report.aggregates
    fmt = lambda x: "-" if x is None else f"{x:.3f}"  # noqa: E731
    print(f"{name}: solved {a.solved_count}/{len(report.records)}  "
          f"avg/median/max {fmt(a.average_time)} / {fmt(a.median_time)} / {fmt(a.maximum_time)} s",
          file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pupper-bench", description="benchmark suites for pupper")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write random k-SAT instances")
    gen.add_argument("out_dir")
    gen.add_argument("--count", type=int, default=10)
    gen.add_argument("--vars", type=int, default=100)
    gen.add_argument("--clauses", type=int, default=400)
    gen.add_argument("-k", type=int, default=3)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--uniform", action="store_true", help="no planted solution")

    for name, help_ in (("run", "solve every *.cnf in a directory"),
                        ("ablate", "compare full solver with ablated variants")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("directory")
        p.add_argument("--out", default="bench-out")
        p.add_argument("--config", help="key=value file supplying defaults for the flags")
        p.add_argument("--time-limit", type=float, default=None, help="seconds per instance")
        p.add_argument("--jobs", type=int, default=1)
        add_solver_arguments(p)
    return parser


def run_bench(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            argv = list(sys.argv[1:] if argv is None else argv)
            argv[1:1] = config_flags(read_config_file(args.config))
            args = parser.parse_args(argv)
        if args.command == "generate":
            paths = generate_suite(args.out_dir, args.count, args.vars, args.clauses, args.k,
                                   args.seed, planted=not args.uniform)
            print(f"wrote {len(paths)} instances to {args.out_dir}")
            return 0
        config = config_from_args(args)
    except (UsageError, ValueError, OSError, configparser.Error) as exc:
        print(f"pupper-bench: error: {exc}", file=sys.stderr)
        return 1

    started = time.perf_counter()
    if args.command == "run":
        report = run_suite(args.directory, config, args.time_limit, args.out, jobs=args.jobs)
        _print_report("pupper", report)
    else:
        for name, report in run_ablation(args.directory, config, args.time_limit, args.out,
                                         jobs=args.jobs).items():
            _print_report(name, report)
    print(f"reports in {args.out} ({time.perf_counter() - started:.1f} s)")
    return 0


def main() -> None:
    sys.exit(run_bench())
