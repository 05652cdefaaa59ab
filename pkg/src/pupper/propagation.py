"""Unit propagation over tri-state partial assignments.

Two implementations with identical semantics:

* :func:`naive_unit_propagate` rescans every clause on every pass.  It is
  slow and obviously correct, and serves as the oracle in tests.
* :func:`unit_propagate` uses per-literal occurrence lists with incremental
  unassigned/satisfied counters (see :mod:`pupper._kernels`).

Semantics shared by both: passes visit clauses in ascending index order and
apply any unit clause on the spot; passes repeat until one makes no change.
Assigned variables are never changed, so when two clauses force opposite
values the lower-indexed one wins and the other is left falsified.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from pupper import _kernels
from pupper.cnf import UNASSIGNED, CnfFormula, as_partial


class PropagationResult(NamedTuple):
    values: np.ndarray
    reasons: np.ndarray
    trail: np.ndarray


def _clause_status(clause, vals):
    """Return (satisfied, distinct unassigned literals) of one clause."""
    free = []
    for lit in clause:
        v = vals[abs(lit) - 1]
        if v == UNASSIGNED:
            if lit not in free:
                free.append(lit)
        elif (v == 1) == (lit > 0):
            return True, free
    return False, free


def naive_unit_propagate(formula: CnfFormula, partial) -> np.ndarray:
    vals = [int(v) for v in as_partial(partial, formula.num_vars)]
    changed = True
    while changed:
        changed = False
        for clause in formula.clauses:
            satisfied, free = _clause_status(clause, vals)
            if not satisfied and len(free) == 1:
                lit = free[0]
                vals[abs(lit) - 1] = 1 if lit > 0 else 0
                changed = True
    return np.array(vals, dtype=np.int8)


def unit_propagate_traced(formula: CnfFormula, partial, *, debug: bool = False) -> PropagationResult:
    """Indexed propagation that also reports why and in what order variables were forced.

    ``reasons[i]`` is the index of the clause that forced variable ``i`` (-1
    if it was assigned in the input or left unassigned); ``trail`` lists the
    forced variables (0-based) in assignment order.  With ``debug`` the
    incremental counters are checked against a full rescan after every step.
    """
    start = as_partial(partial, formula.num_vars)
    a = formula.arrays
    vals, reasons, trail, ok = _kernels.unit_propagate(
        a.lits, a.starts, a.occ, a.occ_starts, start, debug
    )
    if not ok:
        raise AssertionError("occurrence counters diverged from a full rescan")
    return PropagationResult(vals, reasons, trail)


def unit_propagate(formula: CnfFormula, partial, *, debug: bool = False) -> np.ndarray:
    """Propagate unit clauses to a fixpoint and return the extended partial assignment.

    ``partial`` may be an int8 vector (1/0/-1), a sequence of
    ``True``/``False``/``None``, or a ``{dimacs_var: bool}`` mapping.
    Conflicts are not errors: falsified clauses are simply left alone.
    """
    return unit_propagate_traced(formula, partial, debug=debug).values
