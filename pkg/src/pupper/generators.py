"""Random k-SAT instances, uniform and with a planted solution."""

from __future__ import annotations

import numpy as np

from pupper.cnf import CnfFormula


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _check(n: int, m: int, k: int) -> None:
    if k < 1 or n < 0 or m < 0:
        raise ValueError("n, m must be non-negative and k positive")
    if k > n and m > 0:
        raise ValueError(f"clause width {k} exceeds variable count {n}")


def _random_clause(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    variables = rng.choice(n, size=k, replace=False) + 1
    signs = np.where(rng.integers(0, 2, size=k) == 1, 1, -1)
    return variables * signs


def generate_uniform_ksat(n: int, m: int, k: int = 3, rng=None) -> CnfFormula:
    """``m`` clauses over ``k`` distinct variables each, polarities fair coin flips."""
    _check(n, m, k)
    rng = _as_rng(rng)
    clauses = tuple(tuple(int(x) for x in _random_clause(n, k, rng)) for _ in range(m))
    return CnfFormula(n, clauses)


def generate_planted_ksat(n: int, m: int, k: int = 3, rng=None) -> tuple[CnfFormula, np.ndarray]:
    """Uniform k-SAT conditioned on a hidden assignment.

    The hidden assignment is drawn first; candidate clauses it falsifies are
    rejected.  This skews literal statistics towards the hidden solution, so
    these instances are easier than uniform ones at the same ratio.
    """
    _check(n, m, k)
    rng = _as_rng(rng)
    hidden = rng.integers(0, 2, size=n, dtype=np.uint8).astype(bool)
    clauses = []
    while len(clauses) < m:
        clause = _random_clause(n, k, rng)
        values = hidden[np.abs(clause) - 1] == (clause > 0)
        if values.any():
            clauses.append(tuple(int(x) for x in clause))
    return CnfFormula(n, tuple(clauses)), hidden
