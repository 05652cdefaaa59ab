"""CNF formulas, DIMACS I/O and assignment evaluation.

Clauses are stored as tuples of signed DIMACS integers (``3`` is x3, ``-3``
is its negation).  Assignments are numpy arrays indexed from 0, so the value
of DIMACS variable ``v`` lives at position ``v - 1``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence, TextIO

import numpy as np

from pupper import _kernels

TRUE = np.int8(1)
FALSE = np.int8(0)
UNASSIGNED = np.int8(-1)


class DimacsError(ValueError):
    """Malformed DIMACS input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Literal(NamedTuple):
    var: int
    polarity: bool

    @classmethod
    def from_dimacs(cls, lit: int) -> "Literal":
        return cls(abs(lit), lit > 0)

    def to_dimacs(self) -> int:
        return self.var if self.polarity else -self.var


@dataclass(frozen=True)
class CnfFormula:
    """Immutable clause database.

    Clause order is significant: it is the order used for every
    deterministic tie-break during propagation.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        clauses = tuple(tuple(int(lit) for lit in c) for c in self.clauses)
        for i, clause in enumerate(clauses):
            if not clause:
                raise ValueError(f"clause {i} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(
                        f"clause {i}: literal {lit} out of range for {self.num_vars} variables"
                    )
        object.__setattr__(self, "clauses", clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def literals(self, index: int) -> list[Literal]:
        return [Literal.from_dimacs(lit) for lit in self.clauses[index]]

    @cached_property
    def arrays(self) -> "FormulaArrays":
        return FormulaArrays.build(self)


class FormulaArrays(NamedTuple):
    """Flat int32 encoding of a formula consumed by the compiled kernels.

    Literal codes are ``2 * (var - 1) + negated``.  Duplicate literals inside
    a clause are dropped here (the formula itself keeps them verbatim); this
    changes neither satisfaction nor which clauses are unit.
    """

    num_vars: int
    lits: np.ndarray
    starts: np.ndarray
    occ: np.ndarray
    occ_starts: np.ndarray

    @classmethod
    def build(cls, formula: CnfFormula) -> "FormulaArrays":
        lits: list[int] = []
        starts = [0]
        for clause in formula.clauses:
            seen = set()
            for lit in clause:
                code = 2 * (abs(lit) - 1) + (lit < 0)
                if code not in seen:
                    seen.add(code)
                    lits.append(code)
            starts.append(len(lits))
        lits_arr = np.asarray(lits, dtype=np.int32)
        starts_arr = np.asarray(starts, dtype=np.int32)

        num_codes = 2 * formula.num_vars
        clause_of = np.repeat(
            np.arange(formula.num_clauses, dtype=np.int32), np.diff(starts_arr)
        )
        # stable sort keeps clause indices ascending inside each occurrence list
        perm = np.argsort(lits_arr, kind="stable")
        occ = clause_of[perm].astype(np.int32)
        counts = np.bincount(lits_arr, minlength=num_codes)
        occ_starts = np.zeros(num_codes + 1, dtype=np.int32)
        np.cumsum(counts, out=occ_starts[1:])
        return cls(formula.num_vars, lits_arr, starts_arr, occ, occ_starts)


def parse_dimacs(source: str | TextIO, *, strict: bool = True) -> CnfFormula:
    """Parse DIMACS CNF text (a string or an open text stream).

    With ``strict=False`` a clause count that disagrees with the ``p`` header
    and a final clause missing its terminating ``0`` are accepted.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    num_vars = declared = None
    header_line = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    clause_line = None
    lineno = 0

    for lineno, line in enumerate(stream, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            break
        if stripped.startswith("p"):
            if num_vars is not None:
                raise DimacsError(f"duplicate header (first at line {header_line})", lineno)
            parts = stripped.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"bad header {stripped!r}", lineno)
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"bad header {stripped!r}", lineno) from None
            if num_vars < 0 or declared < 0:
                raise DimacsError("negative count in header", lineno)
            header_line = lineno
            continue
        if num_vars is None:
            raise DimacsError("clause data before 'p cnf' header", lineno)
        for tok in stripped.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"non-integer token {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise DimacsError("empty clause", lineno)
                clauses.append(tuple(current))
                current = []
                continue
            if abs(lit) > num_vars:
                raise DimacsError(
                    f"literal {lit} out of range for {num_vars} variables", lineno
                )
            if not current:
                clause_line = lineno
            current.append(lit)

    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        if strict:
            raise DimacsError("clause not terminated by 0", clause_line)
        clauses.append(tuple(current))
    if strict and len(clauses) != declared:
        raise DimacsError(
            f"header declares {declared} clauses but {len(clauses)} were read", lineno
        )
    return CnfFormula(num_vars, tuple(clauses))


def read_dimacs(path, *, strict: bool = True) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh, strict=strict)


def write_dimacs(formula: CnfFormula, stream: TextIO | None = None) -> str:
    """Serialize ``formula``; also writes to ``stream`` when one is given."""
    out = [f"p cnf {formula.num_vars} {formula.num_clauses}\n"]
    out.extend(" ".join(map(str, clause)) + " 0\n" for clause in formula.clauses)
    text = "".join(out)
    if stream is not None:
        stream.write(text)
    return text


def as_assignment(values: Iterable[bool] | np.ndarray, num_vars: int) -> np.ndarray:
    alpha = np.asarray(values, dtype=bool)
    if alpha.shape != (num_vars,):
        raise ValueError(f"assignment has length {alpha.size}, expected {num_vars}")
    return alpha


def empty_partial(num_vars: int) -> np.ndarray:
    return np.full(num_vars, UNASSIGNED, dtype=np.int8)


def as_partial(values, num_vars: int) -> np.ndarray:
    """Build a tri-state vector from a sequence or a ``{var: bool}`` mapping.

    Mapping keys are DIMACS (1-based) variable numbers.  Sequence entries may
    be ``True``/``False``/``None`` or the int8 codes 1/0/-1.
    """
    if isinstance(values, dict):
        partial = empty_partial(num_vars)
        for var, val in values.items():
            if not 1 <= var <= num_vars:
                raise ValueError(f"variable {var} out of range")
            partial[var - 1] = TRUE if val else FALSE
        return partial
    if isinstance(values, np.ndarray) and values.dtype == np.int8:
        partial = values.copy()
    else:
        partial = np.array([-1 if v is None else int(v) for v in values], dtype=np.int8)
    if partial.shape != (num_vars,):
        raise ValueError(f"partial assignment has length {partial.size}, expected {num_vars}")
    if np.any((partial < -1) | (partial > 1)):
        raise ValueError("partial assignment entries must be -1, 0 or 1")
    return partial


def evaluate(formula: CnfFormula, assignment: Sequence[bool] | np.ndarray) -> tuple[bool, int]:
    """Return ``(satisfied, satisfied_clause_count)`` for a full assignment."""
    alpha = as_assignment(assignment, formula.num_vars)
    arrs = formula.arrays
    count = int(_kernels.count_satisfied(arrs.lits, arrs.starts, alpha))
    return count == formula.num_clauses, count


def model_literals(assignment: np.ndarray) -> list[int]:
    """DIMACS literals for a full assignment, in variable order."""
    return [i + 1 if v else -(i + 1) for i, v in enumerate(np.asarray(assignment, dtype=bool))]
