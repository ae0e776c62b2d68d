"""Bookkeeping shared by the learning loops: budgets, solver calls, stats, dumps."""

import logging
import time
from pathlib import Path

from errors import IterationLimitExceeded
from models import IterationRecord, LearnConfig, RunStats, Termination
from sat import CnfProblem, SolveOutcome, solve

logger = logging.getLogger(__name__)


class LearnRun:
    def __init__(self, name: str, config: LearnConfig):
        self.name = name
        self.config = config
        self.started = time.monotonic()
        self.deadline = (
            self.started + config.total_timeout if config.total_timeout is not None else None
        )
        self.stats = RunStats(algorithm=name)
        self._dumped_hypotheses = 0

    def budget(self) -> float | None:
        remaining = None if self.deadline is None else self.deadline - time.monotonic()
        per_call = self.config.solver_timeout
        if remaining is None:
            return per_call
        if per_call is None:
            return remaining
        return min(per_call, remaining)

    def solve(self, problem: CnfProblem, size: int) -> SolveOutcome:
        if self.stats.iterations >= self.config.max_iterations:
            raise IterationLimitExceeded(
                f"{self.name}: more than {self.config.max_iterations} iterations"
            )
        self.stats.iterations += 1
        self.stats.solver_calls += 1
        if self.config.dump_dir is not None:
            problem.write_dimacs(
                Path(self.config.dump_dir) / f"{self.name}-{self.stats.iterations:04d}.cnf"
            )
        outcome = solve(
            problem,
            budget=self.budget(),
            solver=self.config.solver,
            solver_path=self.config.solver_path,
            seed=self.config.seed,
        )
        logger.debug(
            "%s iteration=%d size=%d vars=%d clauses=%d status=%s elapsed=%.3f",
            self.name, self.stats.iterations, size, problem.num_vars,
            problem.num_clauses, outcome.status, outcome.elapsed,
        )
        self._last = (size, outcome)
        self.stats.iteration_times.append(outcome.elapsed)
        return outcome

    def record(self, event: str, words: int = 0) -> None:
        """Log the last solver call; ``words`` counts new counterexample words."""
        size, outcome = self._last
        self.stats.history.append(
            IterationRecord(
                iteration=self.stats.iterations,
                size=size,
                status=outcome.status,
                event=event,
                elapsed=outcome.elapsed,
            )
        )
        self.stats.counterexamples += words

    def hypothesis(self, text: str, dot: str) -> None:
        self.stats.hypothesis_updates += 1
        logger.info("%s hypothesis #%d: %s", self.name, self.stats.hypothesis_updates, text)
        if self.config.dump_dir is not None:
            self._dumped_hypotheses += 1
            path = Path(self.config.dump_dir) / f"{self.name}-hyp-{self._dumped_hypotheses:03d}.dot"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(dot)

    def finish(self, model_size: int, termination: Termination) -> RunStats:
        self.stats.wall_time = time.monotonic() - self.started
        self.stats.model_size = model_size
        self.stats.termination = termination
        logger.info(
            "%s finished: %s size=%d iterations=%d wall=%.3fs",
            self.name, termination, model_size, self.stats.iterations, self.stats.wall_time,
        )
        return self.stats
