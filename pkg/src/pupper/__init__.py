"""Incomplete SAT solving by prioritized unit propagation with periodic resetting."""

from pupper.cnf import (
    CnfFormula,
    DimacsError,
    Literal,
    evaluate,
    parse_dimacs,
    read_dimacs,
    write_dimacs,
)
from pupper.prioritizer import Policy, update_ema, variance_ranking
from pupper.propagation import naive_unit_propagate, unit_propagate
from pupper.solver import (
    SolveOutcome,
    SolverConfig,
    Status,
    multi_copy_solve,
    prioritized_unit_prop,
    pupper_solve,
    random_init,
)

__version__ = "0.1.0"
