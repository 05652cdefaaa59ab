import numpy as np
import pytest
from hypothesis import strategies as st

from pupper.cnf import CnfFormula, parse_dimacs

RUNNING_EXAMPLE = "c comment\np cnf 4 2\n1 2 -3 0\n3 -1 4 0\n"


@pytest.fixture
def running_example():
    return parse_dimacs(RUNNING_EXAMPLE)


@st.composite
def formulas(draw, max_vars=12, max_clauses=40, max_width=3, min_vars=1):
    n = draw(st.integers(min_vars, max_vars))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=max_width), max_size=max_clauses))
    return CnfFormula(n, tuple(tuple(c) for c in clauses))


@st.composite
def formula_and_partial(draw, **kw):
    f = draw(formulas(**kw))
    partial = draw(st.lists(st.sampled_from([-1, 0, 1]), min_size=f.num_vars, max_size=f.num_vars))
    return f, np.array(partial, dtype=np.int8)


def random_formula(rng, n_max=12, m_max=40, widths=(1, 2, 3)):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    clauses = []
    for _ in range(m):
        k = int(rng.choice(widths))
        vars_ = rng.integers(1, n + 1, size=k)
        signs = rng.choice([-1, 1], size=k)
        clauses.append(tuple(int(x) for x in vars_ * signs))
    return CnfFormula(n, tuple(clauses))


def random_partial(rng, n):
    return rng.integers(-1, 2, size=n).astype(np.int8)


ACCEPTANCE_LINES = []


def record_criterion(name, passed, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {name}" + (f"  ({detail})" if detail else ""))
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
