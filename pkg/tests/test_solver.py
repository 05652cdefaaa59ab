import numpy as np
import pytest

import pupper.prioritizer as prioritizer
from pupper.cnf import CnfFormula, evaluate
from pupper.generators import generate_planted_ksat, generate_uniform_ksat
from pupper.prioritizer import Policy
from pupper.propagation import naive_unit_propagate
from pupper.solver import (
    CopyState,
    SolverConfig,
    Status,
    _rebuild,
    copy_budgets,
    copy_rng,
    multi_copy_solve,
    prioritized_unit_prop,
    pupper_solve,
    random_init,
)

from conftest import random_formula

UNSAT_PAIR = CnfFormula(1, ((1,), (-1,)))


def naive_rebuild(f, alpha, order):
    partial = np.full(f.num_vars, -1, dtype=np.int8)
    for i in order:
        if partial[i] == -1:
            partial[i] = 1 if alpha[i] else 0
            partial = naive_unit_propagate(f, partial)
    assert np.all(partial != -1)
    return partial == 1


def naive_count(f, alpha):
    return sum(any(alpha[abs(l) - 1] == (l > 0) for l in c) for c in f.clauses)


def reference_solve(f, cfg):
    """Straight transcription of the outer loop using the naive propagator."""
    rng = copy_rng(cfg.seed, 0)
    alpha = rng.integers(0, 2, size=f.num_vars, dtype=np.uint8).astype(bool)
    best = alpha.copy()
    ema = alpha.astype(float)
    n = 0
    trace = []
    while n < cfg.max_iterations and naive_count(f, alpha) < f.num_clauses:
        n += 1
        ema = ema * cfg.rho + alpha * (1 - cfg.rho)
        var = ema * (1 - ema)
        if cfg.priority_policy is Policy.RANDOM:
            order = rng.permutation(f.num_vars)
        else:
            sign = -1 if cfg.priority_policy is Policy.HIGH_TO_LOW else 1
            order = sorted(range(f.num_vars), key=lambda i: (sign * var[i], i))
        alpha = naive_rebuild(f, alpha, order)
        if cfg.resetting_enabled and n % cfg.reset_frequency == 0:
            alpha = best.copy()
        if naive_count(f, alpha) > naive_count(f, best):
            best = alpha.copy()
        trace.append(naive_count(f, best))
        if naive_count(f, best) == f.num_clauses:
            break
    return best, n, trace


def test_random_init():
    assert random_init(0, copy_rng(1, 0)).shape == (0,)
    a = random_init(50, copy_rng(5, 0))
    assert np.array_equal(a, random_init(50, copy_rng(5, 0)))
    for seed in (0, 1, 2, 123456789):
        frac = random_init(10_000, copy_rng(seed, 0)).mean()
        assert 0.45 <= frac <= 0.55


def test_copy_seeds_differ():
    assert not np.array_equal(random_init(64, copy_rng(3, 0)), random_init(64, copy_rng(3, 1)))


def test_pup_examples():
    f = CnfFormula(2, ((-1, 2),))
    ema = np.array([1.0, 0.0])
    alpha, _ = prioritized_unit_prop(f, [True, False], ema, order=np.array([0, 1]))
    assert alpha.tolist() == [True, True]
    alpha, _ = prioritized_unit_prop(f, [True, False], ema, order=np.array([1, 0]))
    assert alpha.tolist() == [False, False]
    empty = CnfFormula(3, ())
    alpha, new_ema = prioritized_unit_prop(empty, [True, False, True], np.array([0.5, 0.5, 0.5]))
    assert alpha.tolist() == [True, False, True]
    assert np.allclose(new_ema, [0.55, 0.45, 0.55])


def test_pup_first_call_uses_index_order():
    # ema == alpha at start, so all variances are 0 and order is 0..n-1
    f = CnfFormula(2, ((-1, 2),))
    alpha = np.array([True, False])
    out, _ = prioritized_unit_prop(f, alpha, alpha.astype(float))
    assert out.tolist() == [True, True]


def test_pup_length_mismatch():
    with pytest.raises(ValueError):
        prioritized_unit_prop(CnfFormula(2, ()), [True], np.zeros(2))


def test_rebuild_matches_naive_and_is_total():
    rng = np.random.default_rng(11)
    for _ in range(300):
        f = random_formula(rng)
        alpha = rng.integers(0, 2, size=f.num_vars).astype(bool)
        order = rng.permutation(f.num_vars)
        out, count, forced = _rebuild(f, alpha, order, debug=True)
        assert out.tolist() == naive_rebuild(f, alpha, order).tolist()
        assert count == naive_count(f, out)
        assert np.array_equal(out[~forced], alpha[~forced])


@pytest.mark.parametrize("policy", [Policy.HIGH_TO_LOW, Policy.LOW_TO_HIGH, Policy.RANDOM])
@pytest.mark.parametrize("reset", [True, False])
def test_solve_matches_reference_loop(policy, reset):
    for seed in range(4):
        f = generate_uniform_ksat(12, 55, 3, seed)
        cfg = SolverConfig(max_iterations=60, seed=seed, priority_policy=policy,
                           resetting_enabled=reset, reset_frequency=3, debug=True)
        best, n, _ = reference_solve(f, cfg)
        out = pupper_solve(f, cfg)
        assert out.assignment.tolist() == best.tolist()
        assert out.iterations_used == n
        assert out.best_count == naive_count(f, best)


def test_zero_clause_formula():
    out = pupper_solve(CnfFormula(4, ()), SolverConfig(seed=3))
    assert out.status is Status.SATISFIABLE
    assert out.iterations_used == 0
    assert out.assignment.tolist() == random_init(4, copy_rng(3, 0)).tolist()


def test_unsat_pair_exhausts_budget():
    out = pupper_solve(UNSAT_PAIR, SolverConfig(max_iterations=100))
    assert out.status is Status.UNKNOWN
    assert out.best_count == 1
    assert out.iterations_used == 100
    assert out.winning_copy is None


def test_planted_small_instance():
    f, hidden = generate_planted_ksat(20, 80, 3, 42)
    assert evaluate(f, hidden) == (True, 80)
    out = pupper_solve(f, SolverConfig(seed=42))
    assert out.status is Status.SATISFIABLE
    assert evaluate(f, out.assignment)[0]


def test_reset_every_iteration_discards_improvements():
    f = generate_uniform_ksat(30, 120, 3, 1)
    cfg = SolverConfig(max_iterations=50, reset_frequency=1, seed=9)
    initial = CopyState(f, cfg).best_count
    out = pupper_solve(f, cfg)
    assert out.best_count == initial
    better = pupper_solve(f, cfg.replace(best_update_first=True))
    assert better.best_count > initial


def test_no_reset_never_resets(monkeypatch):
    calls = []
    monkeypatch.setattr(CopyState, "_reset", lambda self: calls.append(self.iteration))
    f = generate_uniform_ksat(30, 140, 3, 2)
    pupper_solve(f, SolverConfig(max_iterations=40, resetting_enabled=False))
    assert calls == []
    pupper_solve(f, SolverConfig(max_iterations=40, reset_frequency=5))
    assert calls == [5, 10, 15, 20, 25, 30, 35, 40]


def test_random_order_updates_but_ignores_ema(monkeypatch):
    def boom(*a, **k):
        raise AssertionError("variance ranking consulted")

    monkeypatch.setattr(prioritizer, "variance_ranking", boom)
    f = generate_uniform_ksat(20, 90, 3, 3)
    cfg = SolverConfig(priority_policy="random", max_iterations=10)
    copy = CopyState(f, cfg)
    start = copy.ema.copy()
    copy.step()
    copy.step()
    assert not np.array_equal(copy.ema, start)


def test_wall_clock_limit():
    f = generate_uniform_ksat(60, 400, 3, 0)  # ratio ~6.7, almost surely unsat
    out = multi_copy_solve(f, SolverConfig(max_iterations=10**9, num_copies=2, wall_clock_limit=0.2))
    assert out.status is Status.UNKNOWN
    assert out.elapsed < 5


def test_config_validation():
    for bad in (dict(max_iterations=0), dict(reset_frequency=0), dict(num_copies=0),
                dict(rho=1.5), dict(threads=3, num_copies=2), dict(seed=-1)):
        with pytest.raises(ValueError):
            SolverConfig(**bad)


def test_budget_split():
    assert copy_budgets(SolverConfig(max_iterations=10, num_copies=4)) == [3, 3, 2, 2]
    assert copy_budgets(SolverConfig(max_iterations=10, num_copies=4, budget_per_copy=True)) == [10] * 4


def test_single_copy_scheduler_equals_pupper_solve():
    for seed in range(5):
        f, _ = generate_planted_ksat(40, 170, 3, seed)
        cfg = SolverConfig(max_iterations=2000, seed=seed)
        assert multi_copy_solve(f, cfg).fingerprint() == pupper_solve(f, cfg).fingerprint()
    cfg = SolverConfig(max_iterations=77, seed=1)
    assert multi_copy_solve(UNSAT_PAIR, cfg).fingerprint() == pupper_solve(UNSAT_PAIR, cfg).fingerprint()


def test_unsat_budget_split_round_robin():
    out = multi_copy_solve(UNSAT_PAIR, SolverConfig(max_iterations=100, num_copies=4))
    assert out.status is Status.UNKNOWN
    assert out.per_copy_iterations == [25, 25, 25, 25]
    assert out.iterations_used == 100
    out = multi_copy_solve(UNSAT_PAIR, SolverConfig(max_iterations=100, num_copies=4, budget_per_copy=True))
    assert out.per_copy_iterations == [100] * 4


def solve_iteration(f, seed, index, budget=500):
    """Iteration at which copy ``index`` would solve if run alone (None if never)."""
    copy = CopyState(f, SolverConfig(seed=seed), index)
    if copy.solved:
        return 0
    while copy.iteration < budget:
        copy.step()
        if copy.solved:
            return copy.iteration
    return None


def predicted(f, seed, k, budget=500):
    its = [solve_iteration(f, seed, i, budget) for i in range(k)]
    done = [(s, i) for i, s in enumerate(its) if s is not None]
    if not done:
        return None
    s, w = min(done)
    used = sum(min(s, budget) if i <= w else min(s - 1, budget) for i in range(k))
    return w, used


def test_round_robin_equals_independent_runs():
    for inst in range(6):
        f, _ = generate_planted_ksat(50, 215, 3, 100 + inst)
        for seed in range(3):
            expect = predicted(f, seed, 3)
            out = multi_copy_solve(f, SolverConfig(max_iterations=1500, num_copies=3, seed=seed))
            if expect is None:
                continue
            assert (out.winning_copy, out.iterations_used) == expect


def test_two_copy_scenario():
    # pinned by scanning: copy 0 solves alone at iteration 3, copy 1 at 11
    f, _ = generate_planted_ksat(30, 126, 3, 1)
    assert solve_iteration(f, 6, 0) == 3
    assert solve_iteration(f, 6, 1) == 11
    out = multi_copy_solve(f, SolverConfig(num_copies=2, seed=6))
    assert out.winning_copy == 0
    assert out.per_copy_iterations == [3, 2]
    assert out.iterations_used == 5


def test_no_solution_lands_on_reset_iteration():
    # the reset precedes the best update, so a model found on a reset
    # iteration is thrown away
    for inst in range(3):
        f, _ = generate_planted_ksat(30, 126, 3, inst)
        for seed in range(15):
            it = solve_iteration(f, seed, 0)
            assert it is None or it == 0 or it % 5 != 0


def test_unknown_returns_best_copy():
    f = generate_uniform_ksat(40, 300, 3, 5)
    out = multi_copy_solve(f, SolverConfig(max_iterations=40, num_copies=4, seed=2))
    assert out.status is Status.UNKNOWN
    copies = []
    for i in range(4):
        c = CopyState(f, SolverConfig(max_iterations=40, num_copies=4, seed=2), i)
        for _ in range(10):
            c.step()
        copies.append(c)
    top = max(c.best_count for c in copies)
    first = next(c for c in copies if c.best_count == top)
    assert out.best_count == top
    assert out.assignment.tolist() == first.alpha_best.tolist()


def test_threaded_mode_returns_valid_model():
    f, _ = generate_planted_ksat(80, 320, 3, 4)
    out = multi_copy_solve(f, SolverConfig(num_copies=4, threads=4, seed=1, max_iterations=50_000))
    assert out.status is Status.SATISFIABLE
    assert evaluate(f, out.assignment)[0]
    assert 0 <= out.winning_copy < 4
    out = multi_copy_solve(UNSAT_PAIR, SolverConfig(num_copies=4, threads=2, max_iterations=100))
    assert out.per_copy_iterations == [25] * 4


def test_determinism():
    f, _ = generate_planted_ksat(60, 250, 3, 6)
    cfg = SolverConfig(num_copies=8, seed=77, max_iterations=20_000)
    prints = {multi_copy_solve(f, cfg).fingerprint() for _ in range(3)}
    assert len(prints) == 1
