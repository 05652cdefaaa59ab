"""Prioritized unit propagation with periodic resetting, single and multi-copy.

Randomness: every copy owns a ``numpy.random.Generator`` backed by PCG64 and
seeded with ``SeedSequence(config.seed, spawn_key=(copy_index,))``.  Both the
bit generator and the seed split are fixed; changing either changes every
trajectory.
"""

from __future__ import annotations

import dataclasses
import enum
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from pupper import _kernels
from pupper.cnf import CnfFormula, as_assignment, evaluate
from pupper.prioritizer import Policy, init_ema, rank_variables, update_ema


class Status(str, enum.Enum):
    SATISFIABLE = "SATISFIABLE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for one solve.

    ``max_iterations`` counts rebuilds.  By default it is a total shared by
    all copies; ``budget_per_copy`` makes it a per-copy allowance instead.
    ``rho`` defaults to 0.9, which is our choice rather than a published
    setting.
    """

    max_iterations: int = 1_000_000
    reset_frequency: int = 5
    rho: float = 0.9
    num_copies: int = 1
    seed: int = 0
    priority_policy: Policy = Policy.HIGH_TO_LOW
    resetting_enabled: bool = True
    wall_clock_limit: Optional[float] = None
    budget_per_copy: bool = False
    best_update_first: bool = False
    threads: int = 1
    debug: bool = False

    def __post_init__(self):
        object.__setattr__(self, "priority_policy", Policy(self.priority_policy))
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.reset_frequency < 1:
            raise ValueError("reset_frequency must be >= 1")
        if self.num_copies < 1:
            raise ValueError("num_copies must be >= 1")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if self.threads < 1 or self.threads > self.num_copies:
            raise ValueError("threads must be between 1 and num_copies")
        if self.wall_clock_limit is not None and self.wall_clock_limit <= 0:
            raise ValueError("wall_clock_limit must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class SolveOutcome:
    status: Status
    assignment: np.ndarray
    best_count: int
    iterations_used: int
    winning_copy: Optional[int]
    elapsed: float
    clause_count: int = 0
    per_copy_iterations: list[int] = field(default_factory=list)

    @property
    def satisfiable(self) -> bool:
        return self.status is Status.SATISFIABLE

    def fingerprint(self) -> tuple:
        """Everything except wall time, for reproducibility comparisons."""
        return (
            self.status.value,
            np.asarray(self.assignment, dtype=bool).tobytes(),
            self.best_count,
            self.iterations_used,
            self.winning_copy,
            tuple(self.per_copy_iterations),
        )


def copy_rng(seed: int, copy_index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(copy_index,)))
    )


def random_init(num_vars: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=num_vars, dtype=np.uint8).astype(bool)


def _rebuild(formula: CnfFormula, alpha: np.ndarray, order: np.ndarray, debug: bool = False):
    a = formula.arrays
    new_alpha, count, forced, ok = _kernels.rebuild_assignment(
        a.lits, a.starts, a.occ, a.occ_starts, order.astype(np.int32, copy=False), alpha, debug
    )
    if not ok:
        raise AssertionError("occurrence counters diverged from a full rescan")
    return new_alpha, count, forced


def prioritized_unit_prop(
    formula: CnfFormula,
    alpha,
    ema,
    policy: Policy | str = Policy.HIGH_TO_LOW,
    *,
    rho: float = 0.9,
    rng: np.random.Generator | None = None,
    order: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One rebuild: update the EMA, rank variables, reseed them in order with propagation.

    Passing ``order`` bypasses the ranking (the EMA is still updated).
    """
    alpha = as_assignment(alpha, formula.num_vars)
    ema = update_ema(ema, alpha, rho)
    if order is None:
        order = rank_variables(ema, policy, rng)
    new_alpha, _, _ = _rebuild(formula, alpha, np.asarray(order))
    return new_alpha, ema


class CopyState:
    """One independent search trajectory.

    ``step`` runs exactly one body of the outer loop: rebuild, optional reset
    to the best assignment, best tracking.
    """

    def __init__(self, formula: CnfFormula, config: SolverConfig, index: int = 0):
        self.formula = formula
        self.config = config
        self.index = index
        self.rng = copy_rng(config.seed, index)
        self.alpha = random_init(formula.num_vars, self.rng)
        self.ema = init_ema(self.alpha)
        self.alpha_best = self.alpha.copy()
        _, self.count = evaluate(formula, self.alpha)
        self.best_count = self.count
        self.iteration = 0

    @property
    def solved(self) -> bool:
        return self.best_count == self.formula.num_clauses

    def step(self) -> None:
        cfg = self.config
        self.iteration += 1
        prev_best = self.best_count

        self.ema = update_ema(self.ema, self.alpha, cfg.rho)
        order = rank_variables(self.ema, cfg.priority_policy, self.rng)
        alpha, count, forced = _rebuild(self.formula, self.alpha, order, cfg.debug)
        if cfg.debug:
            self._check_rebuild(alpha, count, forced)
        self.alpha, self.count = alpha, count

        reset_now = cfg.resetting_enabled and self.iteration % cfg.reset_frequency == 0
        if cfg.best_update_first:
            self._update_best()
            if reset_now:
                self._reset()
        else:
            if reset_now:
                self._reset()
            self._update_best()

        if cfg.debug:
            self._check_invariants(prev_best)

    def _reset(self) -> None:
        self.alpha = self.alpha_best.copy()
        self.count = self.best_count

    def _update_best(self) -> None:
        if self.count > self.best_count:
            self.alpha_best = self.alpha.copy()
            self.best_count = self.count

    def _check_rebuild(self, alpha, count, forced) -> None:
        previous = self.alpha
        if alpha.shape != previous.shape:
            raise AssertionError("rebuild lost variables")
        direct = ~forced
        if np.any(alpha[direct] != previous[direct]):
            raise AssertionError("a seeded variable did not keep its previous value")
        if count != evaluate(self.formula, alpha)[1]:
            raise AssertionError("rebuild reported a wrong satisfied count")

    def _check_invariants(self, prev_best: int) -> None:
        if self.best_count < prev_best:
            raise AssertionError("best_count decreased")
        if evaluate(self.formula, self.alpha_best)[1] != self.best_count:
            raise AssertionError("best_count out of sync with alpha_best")
        if np.any(self.ema < 0.0) or np.any(self.ema > 1.0):
            raise AssertionError("ema left [0, 1]")


def copy_budgets(config: SolverConfig) -> list[int]:
    k = config.num_copies
    if config.budget_per_copy:
        return [config.max_iterations] * k
    base, extra = divmod(config.max_iterations, k)
    return [base + (i < extra) for i in range(k)]


def _outcome(formula, copies, winner, started) -> SolveOutcome:
    if winner is None:
        best = max(copies, key=lambda c: (c.best_count, -c.index))
    else:
        best = winner
    satisfied, count = evaluate(formula, best.alpha_best)
    if winner is not None and not satisfied:
        raise RuntimeError("internal error: claimed model does not satisfy the formula")
    return SolveOutcome(
        status=Status.SATISFIABLE if satisfied else Status.UNKNOWN,
        assignment=best.alpha_best.copy(),
        best_count=count,
        iterations_used=sum(c.iteration for c in copies),
        winning_copy=best.index if satisfied else None,
        elapsed=time.perf_counter() - started,
        clause_count=formula.num_clauses,
        per_copy_iterations=[c.iteration for c in copies],
    )


def pupper_solve(formula: CnfFormula, config: SolverConfig | None = None) -> SolveOutcome:
    """Single trajectory (copy 0 of ``config.seed``); ``num_copies`` is ignored."""
    config = (config or SolverConfig()).replace(num_copies=1, threads=1)
    started = time.perf_counter()
    deadline = None if config.wall_clock_limit is None else started + config.wall_clock_limit
    copy = CopyState(formula, config, 0)
    while copy.iteration < config.max_iterations and not copy.solved:
        copy.step()
        if deadline is not None and time.perf_counter() >= deadline:
            break
    return _outcome(formula, [copy], copy if copy.solved else None, started)


def multi_copy_solve(formula: CnfFormula, config: SolverConfig | None = None) -> SolveOutcome:
    """Run ``num_copies`` independent copies.

    With ``threads == 1`` copies take turns, one iteration each per round, in
    copy-index order; the first copy to satisfy the formula wins, so within a
    round the lowest index wins.  With more threads, copy ``i`` runs on
    worker ``i % threads`` and a shared stop flag ends the others.
    """
    config = config or SolverConfig()
    started = time.perf_counter()
    deadline = None if config.wall_clock_limit is None else started + config.wall_clock_limit
    copies = [CopyState(formula, config, i) for i in range(config.num_copies)]
    budgets = copy_budgets(config)

    for c in copies:
        if c.solved:
            return _outcome(formula, copies, c, started)

    if config.threads == 1:
        winner = _round_robin(copies, budgets, deadline)
    else:
        winner = _threaded(copies, budgets, deadline, config.threads)
    return _outcome(formula, copies, winner, started)


def _round_robin(copies, budgets, deadline, stop: threading.Event | None = None):
    while True:
        progressed = False
        for c in copies:
            if c.iteration >= budgets[c.index]:
                continue
            if stop is not None and stop.is_set():
                return None
            c.step()
            progressed = True
            if c.solved:
                return c
        if not progressed:
            return None
        if deadline is not None and time.perf_counter() >= deadline:
            return None


def _threaded(copies, budgets, deadline, threads):
    stop = threading.Event()
    lock = threading.Lock()
    winners = []

    def work(group):
        found = _round_robin(group, budgets, deadline, stop)
        if found is not None:
            with lock:
                winners.append(found)
            stop.set()

    workers = [
        threading.Thread(target=work, args=(copies[w::threads],), daemon=True)
        for w in range(threads)
    ]
    for t in workers:
        t.start()
    for t in workers:
        t.join()
    return winners[0] if winners else None
