import sys

import pytest

from core import Alphabet, Sample, parse_sample
from dfa import Dfa


@pytest.fixture
def ab() -> Alphabet:
    return Alphabet.of("a", "b")


@pytest.fixture
def a_only() -> Alphabet:
    return Alphabet.of("a")


@pytest.fixture
def a0a1() -> Alphabet:
    return Alphabet.of("a0", "a1")


@pytest.fixture
def a_plus_sample() -> Sample:
    return parse_sample("alphabet: a\na\naa\naaa\n")


@pytest.fixture
def a_plus_dfa(a_only) -> Dfa:
    return Dfa(alphabet=a_only, num_states=2, delta=((2,), (2,)), finals=frozenset({2}))


@pytest.fixture
def g_a0_sample() -> Sample:
    return parse_sample("alphabet: a0,a1\na0\na0,a0\na0,a0,a0\n")


EXTERNAL_SOLVER = """
import sys

from pysat.formula import CNF
from pysat.solvers import Solver

cnf = CNF(from_file=sys.argv[1])
with Solver(name="glucose4", bootstrap_with=cnf.clauses) as solver:
    if solver.solve():
        print("c found a model")
        print("s SATISFIABLE")
        print("v " + " ".join(str(lit) for lit in solver.get_model() or []) + " 0")
    else:
        print("s UNSATISFIABLE")
"""


@pytest.fixture
def make_script(tmp_path):
    """Write an executable Python script into tmp_path."""
    def make(name: str, body: str):
        path = tmp_path / name
        path.write_text(f"#!{sys.executable}\n{body}")
        path.chmod(0o755)
        return path
    return make


@pytest.fixture
def external_solver(make_script):
    """A DIMACS solver binary speaking the competition output format."""
    return make_script("ext-solver", EXTERNAL_SOLVER)
