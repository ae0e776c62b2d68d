"""SAT encodings and learning loops for language-minimal LTLf formulas.

A candidate is a syntax DAG of m nodes; node m is the root and node 1 is an
atom. Variables:

    x[i,op]      node i carries label op (an operator or an atom)
    l[i,j]       left child of node i is j < i
    r[i,j]       right child of node i is j < i
    y[w,i,t]     candidate node i holds on word w at position t
    p[t,a]       the symbolic word has symbol a (or "eps") at position t
    zc[i,t]      candidate node i holds on the symbolic word at t
    zh[i,t]      hypothesis node i holds on the symbolic word at t

Temporal operators are written through their one-step recurrences, e.g.
``U_t <-> right_t | (left_t & U_{t+1})``; X is false at the last position.
"""

import logging
from collections.abc import Callable, Iterable

from core import Sample, Word, shortest_not_covered
from errors import InvariantViolation, LearnerError
from ltlf import (
    BINARY,
    OPERATORS,
    UNARY,
    LtlfFormula,
    build_from_dag,
    equivalent,
    evaluate,
    formula_dot,
    implies,
    print_formula,
    require_formula_atoms,
    true_formula,
    witness,
)
from models import LearnConfig, RunStats
from sat import CnfProblem, Model
from services.runs import LearnRun

logger = logging.getLogger(__name__)

EPS = "eps"

# (size of the DAG it was read from, var keys of its root-reachable part)
DagShape = tuple[int, tuple[tuple, ...]]

# A value at one position: a literal, or a constant.
Value = int | bool


class LtlfEncoding:
    def __init__(self, m: int, sample_alphabet, operators: Iterable[str] = OPERATORS,
                 amo_encoding: str | None = None):
        unknown = set(operators) - set(OPERATORS)
        if unknown:
            raise LearnerError(f"unknown operators {sorted(unknown)}")
        self.m = m
        self.alphabet = sample_alphabet
        self.atoms = list(sample_alphabet.symbols)
        self.operators = [op for op in OPERATORS if op in operators]
        self.problem = CnfProblem(amo_encoding)

    def x(self, i: int, label: str) -> int:
        return self.problem.var("x", i, label)

    def l(self, i: int, j: int) -> int:  # noqa: E743
        return self.problem.var("l", i, j)

    def r(self, i: int, j: int) -> int:
        return self.problem.var("r", i, j)

    def p(self, t: int, a: str) -> int:
        return self.problem.var("p", t, a)

    def labels(self, i: int) -> list[str]:
        return self.atoms if i == 1 else self.operators + self.atoms

    @property
    def nodes(self) -> range:
        return range(1, self.m + 1)

    # -- syntax --------------------------------------------------------------

    def encode_syntax(self) -> None:
        for i in self.nodes:
            self.problem.exactly_one([self.x(i, label) for label in self.labels(i)])
            if i > 1:
                self.problem.exactly_one([self.l(i, j) for j in range(1, i)])
                self.problem.exactly_one([self.r(i, j) for j in range(1, i)])

    def _candidate_nodes(self):
        """(node, label, premises, left, right) for every label/child choice."""
        for i in self.nodes:
            for label in self.labels(i):
                if label in UNARY:
                    for j in range(1, i):
                        yield i, label, [self.x(i, label), self.l(i, j)], j, 0
                elif label in BINARY:
                    for j in range(1, i):
                        for j2 in range(1, i):
                            yield i, label, [self.x(i, label), self.l(i, j), self.r(i, j2)], j, j2
                else:
                    yield i, label, [self.x(i, label)], 0, 0

    # -- semantics -----------------------------------------------------------

    def _iff(self, guard: list[int], a: int, b: int) -> None:
        self.problem.add_implies(guard + [a], [b])
        self.problem.add_implies(guard + [b], [a])

    def _iff_or(self, guard: list[int], out: int, lits: list[int]) -> None:
        self.problem.add_implies(guard + [out], lits)
        for lit in lits:
            self.problem.add_implies(guard + [lit], [out])

    def _iff_and(self, guard: list[int], out: int, lits: list[int]) -> None:
        for lit in lits:
            self.problem.add_implies(guard + [out], [lit])
        self.problem.add_implies(guard + lits, [out])

    def _node_clauses(
        self,
        premises: list[int],
        label: str,
        val: Callable[[int, int], int],
        i: int,
        j: int,
        j2: int,
        t: int,
        length: int,
        symbol: Callable[[int, str], Value],
        live: Callable[[int], int] | None,
        end: Callable[[int], int] | None,
    ) -> None:
        out = val(i, t)
        last = t == length
        if label not in OPERATORS:
            s = symbol(t, label)
            if isinstance(s, bool):
                self.problem.add_implies(premises, [out if s else -out])
            else:
                self._iff(premises, out, s)
            return
        guard = premises + ([live(t)] if live is not None else [])
        left = val(j, t)
        match label:
            case "!":
                self._iff(guard, out, -left)
            case "|":
                self._iff_or(guard, out, [left, val(j2, t)])
            case "&":
                self._iff_and(guard, out, [left, val(j2, t)])
            case "->":
                self._iff_or(guard, out, [-left, val(j2, t)])
            case "X":
                if last:
                    self.problem.add_implies(guard, [-out])
                else:
                    self._iff(guard, out, val(j, t + 1))
            case "U":
                right = val(j2, t)
                if last:
                    self._iff(guard, out, right)
                else:
                    nxt = val(i, t + 1)
                    self.problem.add_implies(guard + [out], [right, left])
                    self.problem.add_implies(guard + [out], [right, nxt])
                    self.problem.add_implies(guard + [right], [out])
                    self.problem.add_implies(guard + [left, nxt], [out])
            case "F":
                if last:
                    self._iff(guard, out, left)
                else:
                    self._iff_or(guard, out, [left, val(i, t + 1)])
            case "G":
                if last:
                    self._iff(guard, out, left)
                elif end is None:
                    self._iff_and(guard, out, [left, val(i, t + 1)])
                else:
                    nxt, stop = val(i, t + 1), end(t)
                    self.problem.add_implies(guard + [out], [left])
                    self.problem.add_implies(guard + [out], [stop, nxt])
                    self.problem.add_implies(guard + [left, stop], [out])
                    self.problem.add_implies(guard + [left, nxt], [out])

    def _candidate_semantics(self, val, length, symbol, live=None, end=None) -> None:
        for i, label, premises, j, j2 in self._candidate_nodes():
            for t in range(1, length + 1):
                self._node_clauses(premises, label, val, i, j, j2, t, length, symbol, live, end)

    def encode_word(self, word: Word, accept: bool) -> None:
        if not word:
            raise LearnerError("LTLf satisfaction is undefined on the empty word")
        val = lambda i, t: self.problem.var("y", word, i, t)  # noqa: E731
        symbol = lambda t, a: word[t - 1] == self.alphabet.index[a]  # noqa: E731
        self._candidate_semantics(val, len(word), symbol)
        root = val(self.m, 1)
        self.problem.add([root if accept else -root])

    def encode_positive(self, words: Iterable[Word]) -> None:
        for w in words:
            self.encode_word(w, True)

    def encode_negative(self, words: Iterable[Word]) -> None:
        for w in words:
            self.encode_word(w, False)

    # -- symbolic word and separation ---------------------------------------

    def encode_symbolic_word(self, horizon: int) -> None:
        for t in range(1, horizon + 1):
            self.problem.exactly_one([self.p(t, a) for a in self.atoms + [EPS]])
        for t in range(1, horizon):
            self.problem.add_implies([self.p(t, EPS)], [self.p(t + 1, EPS)])

    def _symbolic_semantics(self, prefix: str, nodes: int, horizon: int, writer) -> Callable:
        val = lambda i, t: self.problem.var(prefix, i, t)  # noqa: E731
        for i in range(1, nodes + 1):
            for t in range(1, horizon + 1):
                self.problem.add_implies([self.p(t, EPS)], [-val(i, t)])
        writer(
            val,
            horizon,
            lambda t, a: self.p(t, a),
            lambda t: -self.p(t, EPS),
            lambda t: self.p(t + 1, EPS),
        )
        return val

    def encode_separation(self, hypothesis: LtlfFormula, horizon: int) -> None:
        """Some nonempty word of length ≤ horizon satisfies the hypothesis and
        falsifies the candidate."""
        self.encode_symbolic_word(horizon)
        self.problem.add([-self.p(1, EPS)])

        def fixed(val, length, symbol, live, end):
            for i, (label, j, j2) in enumerate(hypothesis.nodes, start=1):
                for t in range(1, length + 1):
                    self._node_clauses([], label, val, i, j, j2, t, length, symbol, live, end)

        zh = self._symbolic_semantics("zh", hypothesis.size, horizon, fixed)
        zc = self._symbolic_semantics("zc", self.m, horizon, self._candidate_semantics)
        self.problem.add([zh(hypothesis.root, 1)])
        self.problem.add([-zc(self.m, 1)])

    def decode_word(self, model: Model, horizon: int) -> Word:
        word = []
        for t in range(1, horizon + 1):
            if model.value(self.p(t, EPS)):
                break
            word.append(next(self.alphabet.index[a] for a in self.atoms
                             if model.value(self.p(t, a))))
        return tuple(word)

    # -- blocking and decoding -----------------------------------------------

    def encode_blocking(self, discarded: Iterable[DagShape]) -> None:
        """One clause per discarded DAG, embedded with its root at node m."""
        for size, keys in discarded:
            if size > self.m:
                continue
            shift = self.m - size
            clause = []
            for key in keys:
                kind, i, arg = key
                if kind == "x":
                    if arg not in self.labels(i + shift):
                        break
                    clause.append(-self.x(i + shift, arg))
                elif kind == "l":
                    clause.append(-self.l(i + shift, arg + shift))
                else:
                    clause.append(-self.r(i + shift, arg + shift))
            else:
                self.problem.add(clause)

    def _raw_dag(self, model: Model):
        labels, lefts, rights = {}, {}, {}
        for i in self.nodes:
            labels[i] = next(lab for lab in self.labels(i) if model.value(self.x(i, lab)))
            if i > 1:
                lefts[i] = next(j for j in range(1, i) if model.value(self.l(i, j)))
                rights[i] = next(j for j in range(1, i) if model.value(self.r(i, j)))
        return labels, lefts, rights

    def decode(self, model: Model) -> tuple[LtlfFormula, DagShape]:
        labels, lefts, rights = self._raw_dag(model)
        keys: list[tuple] = []
        seen: set[int] = set()
        stack = [self.m]
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            keys.append(("x", i, labels[i]))
            if labels[i] in OPERATORS:
                keys.append(("l", i, lefts[i]))
                stack.append(lefts[i])
            if labels[i] in BINARY:
                keys.append(("r", i, rights[i]))
                stack.append(rights[i])
        formula = build_from_dag(self.alphabet, labels, lefts, rights, self.m)
        return formula, (self.m, tuple(sorted(keys)))


def formula_shape(phi: LtlfFormula) -> DagShape:
    keys = []
    for i, (label, left, right) in enumerate(phi.nodes, start=1):
        keys.append(("x", i, label))
        if left:
            keys.append(("l", i, left))
        if right:
            keys.append(("r", i, right))
    return phi.size, tuple(sorted(keys))


def _audit(ok: bool, message: str) -> None:
    if not ok:
        raise InvariantViolation(message)


class _LtlfLoop:
    def __init__(self, name: str, sample: Sample, config: LearnConfig):
        sample.require_nonempty_words()
        self.sample = sample
        self.config = config
        self.run = LearnRun(name, config)
        self.n = config.size_bound
        self.m = 1 if config.incremental else self.n
        self.required: set[Word] = set() if config.sample_subset else set(sample.positives)
        self.negatives: set[Word] = set()
        self.hypothesis: LtlfFormula | None = None

    def encoding(self) -> LtlfEncoding:
        enc = LtlfEncoding(self.m, self.sample.alphabet, self.config.operators)
        enc.encode_syntax()
        enc.encode_positive(self.required)
        enc.encode_negative(self.negatives)
        return enc

    def missing_positive(self, candidate: LtlfFormula) -> Word | None:
        return shortest_not_covered(self.sample.positives, lambda w: evaluate(candidate, w))

    def audit(self, candidate: LtlfFormula) -> None:
        for w in self.required:
            _audit(evaluate(candidate, w), f"candidate fails required word {w}")
        for w in self.negatives:
            _audit(not evaluate(candidate, w), f"candidate holds on negative word {w}")

    def accept(self, candidate: LtlfFormula) -> None:
        if self.config.debug and self.hypothesis is not None:
            _audit(implies(candidate, self.hypothesis) and not implies(self.hypothesis, candidate),
                   "accepted hypothesis does not strictly strengthen the previous one")
        self.hypothesis = candidate
        self.run.hypothesis(print_formula(candidate), formula_dot(candidate))

    def grow(self) -> bool:
        if self.m >= self.n:
            self.run.record("done")
            return False
        self.run.record("grow")
        self.m += 1
        return True

    def finish(self, termination) -> tuple[LtlfFormula, RunStats]:
        if self.hypothesis is None:
            trivial = true_formula(self.sample.alphabet)
            if termination == "minimal":
                termination = "size-exhausted"
            return trivial, self.run.finish(trivial.size, termination)
        return self.hypothesis, self.run.finish(self.hypothesis.size, termination)


def learn_ssym_ltlf(sample: Sample, config: LearnConfig | None = None) -> tuple[LtlfFormula, RunStats]:
    """Semi-symbolic loop: candidates must miss a word of length ≤ K that the
    hypothesis accepts; candidates not implying the hypothesis yield negatives."""
    config = config or LearnConfig(algorithm="ssym")
    loop = _LtlfLoop("ssym_ltlf", sample, config)
    horizon = config.horizon
    while True:
        enc = loop.encoding()
        if loop.hypothesis is not None:
            enc.encode_separation(loop.hypothesis, horizon)
        outcome = loop.run.solve(enc.problem, loop.m)
        if outcome.status == "timeout":
            loop.run.record("timeout")
            return loop.finish("timeout")
        if outcome.status == "unsat":
            if not loop.grow():
                return loop.finish("minimal")
            continue

        candidate, _ = enc.decode(outcome.model)
        if config.debug:
            loop.audit(candidate)
            if loop.hypothesis is not None:
                u = enc.decode_word(outcome.model, horizon)
                _audit(evaluate(loop.hypothesis, u) and not evaluate(candidate, u),
                       f"symbolic word {u} does not separate hypothesis and candidate")
        missing = loop.missing_positive(candidate)
        if missing is not None:
            loop.required.add(missing)
            loop.run.record("positive", words=1)
            continue
        if loop.hypothesis is None or implies(candidate, loop.hypothesis):
            loop.run.record("update")
            loop.accept(candidate)
            continue
        loop.negatives.add(witness(candidate, loop.hypothesis))
        loop.run.record("negative", words=1)


def learn_ceg_ltlf(sample: Sample, config: LearnConfig | None = None) -> tuple[LtlfFormula, RunStats]:
    """Counterexample-guided loop over negative words and discarded DAGs."""
    config = config or LearnConfig(algorithm="ceg")
    loop = _LtlfLoop("ceg_ltlf", sample, config)
    discarded: list[DagShape] = []
    top = true_formula(sample.alphabet)
    while True:
        enc = loop.encoding()
        enc.encode_blocking(discarded)
        outcome = loop.run.solve(enc.problem, loop.m)
        if outcome.status == "timeout":
            loop.run.record("timeout")
            return loop.finish("timeout")
        if outcome.status == "unsat":
            if not loop.grow():
                return loop.finish("minimal")
            continue

        candidate, shape = enc.decode(outcome.model)
        if config.debug:
            loop.audit(candidate)
        missing = loop.missing_positive(candidate)
        if missing is not None:
            loop.required.add(missing)
            loop.run.record("positive", words=1)
            continue
        current = loop.hypothesis or top
        if equivalent(candidate, current):
            discarded.append(shape)
            if loop.hypothesis is None:
                loop.hypothesis = candidate
            loop.run.record("discarded")
        elif implies(candidate, current):
            loop.negatives.add(witness(current, candidate))
            loop.run.record("update", words=1)
            loop.accept(candidate)
        else:
            loop.negatives.add(witness(candidate, current))
            loop.run.record("negative", words=1)


def learn_ltlf(sample: Sample, config: LearnConfig) -> tuple[LtlfFormula, RunStats]:
    if config.algorithm == "sym":
        raise LearnerError(
            "the fully symbolic LTLf learner is not provided; use --algo ssym or --algo ceg"
        )
    require_formula_atoms(sample.alphabet)
    learners = {"ssym": learn_ssym_ltlf, "ceg": learn_ceg_ltlf}
    return learners[config.algorithm](sample, config)
