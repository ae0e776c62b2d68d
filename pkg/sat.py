"""CNF construction and the solver boundary.

Every encoding in this package is emitted directly as clauses. Variables are
allocated through pysat's ``IDPool`` keyed by tuples such as ``("d", p, a, q)``
so each index tuple maps to exactly one variable per problem.
"""

import io
import logging
import random
import subprocess
import tempfile
import threading
import time
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Literal

from pydantic import BaseModel
from pysat.card import CardEnc, EncType
from pysat.formula import CNF, IDPool
from pysat.solvers import Solver

from config import settings
from errors import SolverError

logger = logging.getLogger(__name__)

_AMO_ENCODINGS = {"pairwise": EncType.pairwise, "seqcounter": EncType.seqcounter}


class CnfProblem:
    """Variable pool plus clause store."""

    def __init__(self, amo_encoding: str | None = None):
        self.pool = IDPool(start_from=1)
        self.cnf = CNF()
        self.amo_encoding = amo_encoding or settings.amo_encoding

    def var(self, *key) -> int:
        return self.pool.id(key)

    def tag(self, var: int) -> str:
        key = self.pool.obj(var)
        if key is None:
            return f"v{var}"
        if isinstance(key, tuple) and key and isinstance(key[0], str):
            return f"{key[0]}[{','.join(map(str, key[1:]))}]"
        return str(key)

    @property
    def num_vars(self) -> int:
        return self.pool.top

    @property
    def num_clauses(self) -> int:
        return len(self.cnf.clauses)

    @property
    def clauses(self) -> list[list[int]]:
        return self.cnf.clauses

    def add(self, clause: Iterable[int]) -> None:
        clause = list(clause)
        if not clause:
            raise ValueError("empty clause")
        if any(lit == 0 or abs(lit) > self.pool.top for lit in clause):
            raise ValueError(f"clause {clause} uses an unallocated variable")
        self.cnf.append(clause)

    def add_implies(self, premises: Sequence[int], conclusion: Sequence[int]) -> None:
        """premises[0] ∧ … → conclusion[0] ∨ …"""
        self.add([-p for p in premises] + list(conclusion))

    def add_contradiction(self) -> None:
        v = self.var("false")
        self.add([v])
        self.add([-v])

    def at_least_one(self, lits: Sequence[int]) -> None:
        self.add(lits)

    def at_most_one(self, lits: Sequence[int]) -> None:
        if len(lits) < 2:
            return
        enc = CardEnc.atmost(
            lits=list(lits),
            bound=1,
            vpool=self.pool,
            encoding=_AMO_ENCODINGS[self.amo_encoding],
        )
        for clause in enc.clauses:
            self.add(clause)

    def exactly_one(self, lits: Sequence[int]) -> None:
        if not lits:
            raise ValueError("exactly_one needs at least one variable")
        self.at_least_one(lits)
        self.at_most_one(lits)

    def to_dimacs(self) -> str:
        self.cnf.nv = max(self.cnf.nv, self.pool.top)
        buf = io.StringIO()
        self.cnf.to_fp(buf)
        return buf.getvalue()

    def write_dimacs(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_dimacs())


class Model(BaseModel):
    assignment: dict[int, bool]

    def value(self, var: int) -> bool:
        return self.assignment[var]

    def true_vars(self) -> set[int]:
        return {v for v, b in self.assignment.items() if b}


class SolveOutcome(BaseModel):
    status: Literal["sat", "unsat", "timeout"]
    model: Model | None = None
    elapsed: float = 0.0


def _total_model(lits: Iterable[int], top: int) -> Model:
    assignment = {v: False for v in range(1, top + 1)}
    for lit in lits:
        if abs(lit) <= top:
            assignment[abs(lit)] = lit > 0
    return Model(assignment=assignment)


def _seed_phases(solver: Solver, num_vars: int, seed: int, name: str) -> None:
    """Start the search from a seeded random polarity for every variable."""
    rng = random.Random(seed)
    phases = [v if rng.random() < 0.5 else -v for v in range(1, num_vars + 1)]
    try:
        solver.set_phases(phases)
    except NotImplementedError:
        logger.debug("solver %s has no phase control; seed %d ignored", name, seed)


def _solve_inprocess(problem: CnfProblem, budget: float | None, name: str,
                     seed: int | None) -> SolveOutcome:
    start = time.monotonic()
    try:
        with Solver(name=name, bootstrap_with=problem.clauses, use_timer=True) as solver:
            if seed is not None:
                _seed_phases(solver, problem.num_vars, seed, name)
            if budget is None:
                result = solver.solve()
            else:
                timer = threading.Timer(budget, solver.interrupt)
                timer.start()
                try:
                    result = solver.solve_limited(expect_interrupt=True)
                finally:
                    timer.cancel()
            elapsed = time.monotonic() - start
            if result is None:
                return SolveOutcome(status="timeout", elapsed=elapsed)
            if not result:
                return SolveOutcome(status="unsat", elapsed=elapsed)
            return SolveOutcome(
                status="sat",
                model=_total_model(solver.get_model() or [], problem.num_vars),
                elapsed=elapsed,
            )
    except (NotImplementedError, RuntimeError, ValueError, MemoryError) as exc:
        raise SolverError(f"solver {name!r} failed: {exc}") from exc


def _solve_external(problem: CnfProblem, budget: float | None, path: str) -> SolveOutcome:
    start = time.monotonic()
    with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fp:
        fp.write(problem.to_dimacs())
        cnf_path = Path(fp.name)
    try:
        proc = subprocess.run(
            [path, str(cnf_path)], capture_output=True, text=True, timeout=budget
        )
    except subprocess.TimeoutExpired:
        return SolveOutcome(status="timeout", elapsed=time.monotonic() - start)
    except OSError as exc:
        raise SolverError(f"cannot run external solver {path!r}: {exc}") from exc
    finally:
        cnf_path.unlink(missing_ok=True)
    elapsed = time.monotonic() - start

    status = None
    lits: list[int] = []
    for line in proc.stdout.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            lits.extend(int(tok) for tok in line[2:].split() if tok != "0")
    if status == "UNSATISFIABLE":
        return SolveOutcome(status="unsat", elapsed=elapsed)
    if status == "SATISFIABLE":
        return SolveOutcome(
            status="sat", model=_total_model(lits, problem.num_vars), elapsed=elapsed
        )
    raise SolverError(
        f"external solver {path!r} exited with code {proc.returncode} and no verdict"
    )


def solve(
    problem: CnfProblem,
    budget: float | None = None,
    solver: str | None = None,
    solver_path: str | None = None,
    seed: int | None = None,
) -> SolveOutcome:
    """Sat carries a total model; Unsat is definitive; a blown budget is TimedOut.

    ``seed`` fixes the initial polarities of the in-process solver. External
    solvers are run as given.
    """
    name = solver or settings.solver
    if budget is not None and budget <= 0:
        return SolveOutcome(status="timeout")
    if name == "external":
        path = solver_path or settings.solver_path
        if not path:
            raise SolverError("solver=external requires solver_path")
        outcome = _solve_external(problem, budget, path)
    else:
        outcome = _solve_inprocess(problem, budget, name, seed)
    logger.debug(
        "solve vars=%d clauses=%d status=%s elapsed=%.3f",
        problem.num_vars, problem.num_clauses, outcome.status, outcome.elapsed,
    )
    return outcome
