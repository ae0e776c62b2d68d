"""SAT encodings and learning loops for language-minimal DFAs.

Variables (one per index tuple, allocated through the problem's pool):

    d[p,a,q]     transition p --a--> q of the candidate
    f[q]         q is final in the candidate
    x[u,q]       the candidate's run on prefix u ends in q
    y[p,q]       (p in A, q in candidate) is jointly reachable
    z[i,p,q]     after i steps the chosen word leads to (p, q)
    g[i,p,q]     the chosen word separates at step i

All three loops start from the universal DFA and only replace the hypothesis
by a candidate with a strictly smaller language, so the hypothesis is always
an n-description.
"""

import logging
from collections.abc import Iterable

from core import Sample, Word, prefixes, shortest_not_covered, word_key
from dfa import (
    Dfa,
    emit_dot,
    is_subset,
    reachable_states,
    shortest_separating_word,
    trim,
    universal_dfa,
)
from errors import InvariantViolation
from models import LearnConfig, RunStats
from sat import CnfProblem, Model
from services.runs import LearnRun

logger = logging.getLogger(__name__)

# Transitions (p, a, q) and finality (q, final) of the states reachable from 1.
Structure = tuple[tuple[tuple[int, int, int], ...], tuple[tuple[int, bool], ...]]


class DfaEncoding:
    """Clauses describing an m-state candidate DFA over a fixed alphabet."""

    def __init__(self, m: int, num_symbols: int, amo_encoding: str | None = None):
        self.m = m
        self.k = num_symbols
        self.problem = CnfProblem(amo_encoding)
        self._runs: set[Word] = set()

    def d(self, p: int, a: int, q: int) -> int:
        return self.problem.var("d", p, a, q)

    def f(self, q: int) -> int:
        return self.problem.var("f", q)

    def x(self, u: Word, q: int) -> int:
        return self.problem.var("x", u, q)

    @property
    def states(self) -> range:
        return range(1, self.m + 1)

    def encode_structure(self) -> None:
        for q in self.states:
            self.f(q)
        for p in self.states:
            for a in range(self.k):
                self.problem.exactly_one([self.d(p, a, q) for q in self.states])

    def _encode_runs(self, words: Iterable[Word]) -> None:
        new = sorted(prefixes(words) - self._runs, key=word_key)
        for u in new:
            if not u:
                self.problem.add([self.x((), 1)])
                for q in range(2, self.m + 1):
                    self.problem.add([-self.x((), q)])
                continue
            parent, a = u[:-1], u[-1]
            for p in self.states:
                for q in self.states:
                    self.problem.add_implies([self.x(parent, p), self.d(p, a, q)], [self.x(u, q)])
        self._runs.update(new)

    def encode_positive(self, words: Iterable[Word]) -> None:
        words = list(words)
        self._encode_runs(words)
        for w in words:
            for q in self.states:
                self.problem.add_implies([self.x(w, q)], [self.f(q)])

    def encode_negative(self, words: Iterable[Word]) -> None:
        words = list(words)
        self._encode_runs(words)
        for w in words:
            for q in self.states:
                self.problem.add_implies([self.x(w, q)], [-self.f(q)])

    def encode_subset(self, target: Dfa) -> None:
        """L(candidate) ⊆ L(target)."""
        y = lambda p, q: self.problem.var("y", p, q)  # noqa: E731
        self.problem.add([y(target.initial, 1)])
        for p in target.states:
            for q in self.states:
                for a in range(self.k):
                    for q2 in self.states:
                        self.problem.add_implies(
                            [y(p, q), self.d(q, a, q2)], [y(target.step(p, a), q2)]
                        )
                if p not in target.finals:
                    self.problem.add_implies([y(p, q)], [-self.f(q)])

    def encode_strictness(self, target: Dfa) -> None:
        """Some word of length ≤ m² is accepted by target and rejected by the candidate."""
        horizon = self.m * self.m
        z = lambda i, p, q: self.problem.var("z", i, p, q)  # noqa: E731
        pairs = [(p, q) for p in target.states for q in self.states]
        self.problem.add([z(0, target.initial, 1)])
        for i in range(horizon + 1):
            self.problem.exactly_one([z(i, p, q) for p, q in pairs])
        for i in range(horizon):
            for p, p2 in pairs:
                for q, q2 in pairs:
                    symbols = [a for a in range(self.k) if target.step(p, a) == q]
                    self.problem.add_implies(
                        [z(i, p, p2), z(i + 1, q, q2)], [self.d(p2, a, q2) for a in symbols]
                    )
        if not target.finals:
            self.problem.add_contradiction()
            return
        separations = []
        for i in range(horizon + 1):
            for p in sorted(target.finals):
                for q in self.states:
                    g = self.problem.var("g", i, p, q)
                    self.problem.add_implies([g], [z(i, p, q)])
                    self.problem.add_implies([g], [-self.f(q)])
                    separations.append(g)
        self.problem.add(separations)

    def encode_blocking(self, discarded: Iterable[Structure]) -> None:
        """Forbid each discarded reachable structure (one clause per member)."""
        for transitions, finality in discarded:
            if any(max(p, q) > self.m for p, _, q in transitions):
                continue
            clause = [-self.d(p, a, q) for p, a, q in transitions]
            clause += [-self.f(q) if final else self.f(q) for q, final in finality]
            self.problem.add(clause)

    def decode_raw(self, model: Model, alphabet) -> Dfa:
        delta = []
        for p in self.states:
            row = []
            for a in range(self.k):
                targets = [q for q in self.states if model.value(self.d(p, a, q))]
                row.append(targets[0])
            delta.append(tuple(row))
        finals = frozenset(q for q in self.states if model.value(self.f(q)))
        return Dfa(alphabet=alphabet, num_states=self.m, delta=tuple(delta), finals=finals)

    def decode(self, model: Model, alphabet) -> Dfa:
        return trim(self.decode_raw(model, alphabet))


def reachable_structure(dfa: Dfa) -> Structure:
    reachable = sorted(reachable_states(dfa))
    transitions = tuple(
        (p, a, dfa.step(p, a)) for p in reachable for a in range(len(dfa.alphabet))
    )
    return transitions, tuple((q, q in dfa.finals) for q in reachable)


def _audit(ok: bool, message: str) -> None:
    if not ok:
        raise InvariantViolation(message)


def _audit_candidate(
    candidate: Dfa,
    m: int,
    required: Iterable[Word],
    rejected: Iterable[Word] = (),
    subset_of: Dfa | None = None,
    strictly_below: Dfa | None = None,
) -> None:
    for w in required:
        _audit(candidate.accepts(w), f"candidate rejects required word {w}")
    for w in rejected:
        _audit(not candidate.accepts(w), f"candidate accepts excluded word {w}")
    if subset_of is not None:
        _audit(is_subset(candidate, subset_of), "candidate language is not a subset of the hypothesis")
    if strictly_below is not None:
        sep = shortest_separating_word(strictly_below, candidate)
        _audit(sep is not None and len(sep) <= m * m,
               "no separating word of length at most m^2 against the hypothesis")


class _DfaLoop:
    """Shared state of the three DFA loops."""

    def __init__(self, name: str, sample: Sample, config: LearnConfig):
        self.sample = sample
        self.config = config
        self.run = LearnRun(name, config)
        self.alphabet = sample.alphabet
        self.hypothesis = universal_dfa(self.alphabet)
        self.n = config.size_bound
        self.m = 1 if config.incremental else self.n
        self.required: set[Word] = set() if config.sample_subset else set(sample.positives)

    def encoding(self) -> DfaEncoding:
        enc = DfaEncoding(self.m, len(self.alphabet))
        enc.encode_structure()
        enc.encode_positive(self.required)
        return enc

    def missing_positive(self, candidate: Dfa) -> Word | None:
        return shortest_not_covered(self.sample.positives, candidate.accepts)

    def accept(self, candidate: Dfa) -> None:
        self.hypothesis = candidate
        self.run.hypothesis(f"{candidate.num_states} states", emit_dot(candidate))

    def grow(self) -> bool:
        """Move to the next size; False once the bound is exhausted."""
        if self.m >= self.n:
            self.run.record("done")
            return False
        self.run.record("grow")
        self.m += 1
        logger.debug("%s size -> %d", self.run.name, self.m)
        return True

    def finish(self, termination) -> tuple[Dfa, RunStats]:
        return self.hypothesis, self.run.finish(self.hypothesis.num_states, termination)


def learn_sym_dfa(sample: Sample, config: LearnConfig | None = None) -> tuple[Dfa, RunStats]:
    """Symbolic loop: every candidate is forced strictly inside the hypothesis."""
    config = config or LearnConfig(algorithm="sym")
    loop = _DfaLoop("sym_dfa", sample, config)
    while True:
        enc = loop.encoding()
        enc.encode_subset(loop.hypothesis)
        enc.encode_strictness(loop.hypothesis)
        outcome = loop.run.solve(enc.problem, loop.m)
        if outcome.status == "timeout":
            loop.run.record("timeout")
            return loop.finish("timeout")
        if outcome.status == "unsat":
            if not loop.grow():
                return loop.finish("minimal")
            continue
        candidate = enc.decode(outcome.model, loop.alphabet)
        if config.debug:
            _audit_candidate(candidate, loop.m, loop.required,
                             subset_of=loop.hypothesis, strictly_below=loop.hypothesis)
        missing = loop.missing_positive(candidate)
        if missing is not None:
            loop.required.add(missing)
            loop.run.record("positive", words=1)
            continue
        loop.run.record("update")
        loop.accept(candidate)


def learn_ssym_dfa(sample: Sample, config: LearnConfig | None = None) -> tuple[Dfa, RunStats]:
    """Semi-symbolic loop: strictness is symbolic, inclusion is learned through negatives."""
    config = config or LearnConfig(algorithm="ssym")
    loop = _DfaLoop("ssym_dfa", sample, config)
    negatives: set[Word] = set()
    while True:
        enc = loop.encoding()
        enc.encode_negative(negatives)
        enc.encode_strictness(loop.hypothesis)
        outcome = loop.run.solve(enc.problem, loop.m)
        if outcome.status == "timeout":
            loop.run.record("timeout")
            return loop.finish("timeout")
        if outcome.status == "unsat":
            if not loop.grow():
                return loop.finish("minimal")
            continue
        candidate = enc.decode(outcome.model, loop.alphabet)
        if config.debug:
            _audit_candidate(candidate, loop.m, loop.required, negatives,
                             strictly_below=loop.hypothesis)
        missing = loop.missing_positive(candidate)
        if missing is not None:
            loop.required.add(missing)
            loop.run.record("positive", words=1)
            continue
        outside = shortest_separating_word(candidate, loop.hypothesis)
        if outside is not None:
            negatives.add(outside)
            loop.run.record("negative", words=1)
            continue
        negatives.add(shortest_separating_word(loop.hypothesis, candidate))
        loop.run.record("update", words=1)
        loop.accept(candidate)


def learn_ceg_dfa(sample: Sample, config: LearnConfig | None = None) -> tuple[Dfa, RunStats]:
    """Counterexample-guided baseline: candidates only see explicit words and
    the structures discarded so far.

    A candidate equivalent to the hypothesis is discarded by blocking its
    reachable structure; negatives are never guessed, so every smaller
    n-description stays available and Unsat at the bound means minimal.
    """
    config = config or LearnConfig(algorithm="ceg")
    loop = _DfaLoop("ceg_dfa", sample, config)
    negatives: set[Word] = set()
    discarded: list[Structure] = []
    while True:
        enc = loop.encoding()
        enc.encode_negative(negatives)
        enc.encode_blocking(discarded)
        outcome = loop.run.solve(enc.problem, loop.m)
        if outcome.status == "timeout":
            loop.run.record("timeout")
            return loop.finish("timeout")
        if outcome.status == "unsat":
            if not loop.grow():
                return loop.finish("minimal")
            continue

        raw = enc.decode_raw(outcome.model, loop.alphabet)
        candidate = trim(raw)
        if config.debug:
            _audit_candidate(candidate, loop.m, loop.required, negatives)
        missing = loop.missing_positive(candidate)
        if missing is not None:
            loop.required.add(missing)
            loop.run.record("positive", words=1)
            continue

        below = is_subset(candidate, loop.hypothesis)
        above = is_subset(loop.hypothesis, candidate)
        if below and above:
            discarded.append(reachable_structure(raw))
            loop.run.record("discarded")
        elif below:
            negatives.add(shortest_separating_word(loop.hypothesis, candidate))
            loop.run.record("update", words=1)
            loop.accept(candidate)
        else:
            negatives.add(shortest_separating_word(candidate, loop.hypothesis))
            loop.run.record("negative", words=1)


def learn_dfa(sample: Sample, config: LearnConfig) -> tuple[Dfa, RunStats]:
    learners = {"sym": learn_sym_dfa, "ceg": learn_ceg_dfa, "ssym": learn_ssym_dfa}
    return learners[config.algorithm](sample, config)

