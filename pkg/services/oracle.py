"""Brute-force minimality checks by exhaustive enumeration of small models."""

import itertools
import logging
from collections.abc import Iterator

from core import Sample, format_word
from errors import AlphabetMismatchError
from dfa import Dfa, canonical_form, is_subset, shortest_separating_word
from ltlf import BINARY, OPERATORS, UNARY, LtlfFormula, build_from_dag, evaluate, implies, witness
from models import OracleVerdict

logger = logging.getLogger(__name__)

# Largest enumeration bound accepted per mode; anything above is skipped.
DFA_ORACLE_LIMIT = 3
LTLF_ORACLE_LIMIT = 4


def enumerate_dfas(max_states: int, alphabet) -> Iterator[Dfa]:
    """Every complete DFA with 1..max_states states (initial state 1)."""
    k = len(alphabet)
    for n in range(1, max_states + 1):
        states = range(1, n + 1)
        for flat in itertools.product(states, repeat=n * k):
            delta = tuple(tuple(flat[p * k:(p + 1) * k]) for p in range(n))
            for bits in itertools.product((False, True), repeat=n):
                finals = frozenset(q for q, b in zip(states, bits) if b)
                yield Dfa(alphabet=alphabet, num_states=n, delta=delta, finals=finals)


def enumerate_formulas(max_size: int, alphabet, operators=OPERATORS) -> list[LtlfFormula]:
    """Every distinct formula whose DAG has at most max_size nodes."""
    atoms = list(alphabet.symbols)
    ops = [op for op in OPERATORS if op in operators]
    found: dict[tuple, LtlfFormula] = {}
    for size in range(1, max_size + 1):
        choices = []
        for i in range(1, size + 1):
            node_choices = [(a, 0, 0) for a in atoms]
            if i > 1:
                for op in ops:
                    if op in UNARY:
                        node_choices += [(op, j, 0) for j in range(1, i)]
                    elif op in BINARY:
                        node_choices += [(op, j, j2) for j in range(1, i) for j2 in range(1, i)]
            choices.append(node_choices)
        for raw in itertools.product(*choices):
            labels = {i: node[0] for i, node in enumerate(raw, start=1)}
            lefts = {i: node[1] for i, node in enumerate(raw, start=1)}
            rights = {i: node[2] for i, node in enumerate(raw, start=1)}
            phi = build_from_dag(alphabet, labels, lefts, rights, size)
            found.setdefault(phi.nodes, phi)
    return list(found.values())


def _bounded(mode_limit: int, size_bound: int, oracle_max_size: int) -> tuple[int | None, str]:
    if oracle_max_size < 1:
        return None, "oracle disabled"
    if oracle_max_size > mode_limit:
        return None, f"oracle bound {oracle_max_size} exceeds the enumeration limit {mode_limit}"
    effective = min(size_bound, oracle_max_size)
    scope = "complete" if effective == size_bound else f"checked up to size {effective}"
    return effective, scope


def check_dfa(dfa: Dfa, sample: Sample, size_bound: int, oracle_max_size: int) -> OracleVerdict:
    """Is ``dfa`` an n-description, and is no smaller-language one enumerable?"""
    if dfa.alphabet != sample.alphabet:
        raise AlphabetMismatchError("model and sample use different alphabets")
    trimmed = canonical_form(dfa)
    described = trimmed.num_states <= size_bound and all(dfa.accepts(w) for w in sample.positives)
    if not described:
        return OracleVerdict(is_description=False, verdict="fail",
                             detail="model is not an n-description of the sample")
    bound, scope = _bounded(DFA_ORACLE_LIMIT, size_bound, oracle_max_size)
    if bound is None:
        return OracleVerdict(is_description=True, verdict="skipped", detail=scope)
    seen: set[Dfa] = set()
    for other in enumerate_dfas(bound, dfa.alphabet):
        canon = canonical_form(other)
        if canon in seen:
            continue
        seen.add(canon)
        if not all(other.accepts(w) for w in sample.positives):
            continue
        if is_subset(other, dfa) and not is_subset(dfa, other):
            word = shortest_separating_word(dfa, other)
            return OracleVerdict(
                is_description=True,
                verdict="fail",
                detail=f"a {canon.num_states}-state description has a strictly smaller language; "
                       f"it rejects {format_word(word, dfa.alphabet)!r}",
                witness=canon.model_dump_json(),
            )
    return OracleVerdict(is_description=True, verdict="pass", detail=scope)


def check_formula(
    phi: LtlfFormula,
    sample: Sample,
    size_bound: int,
    oracle_max_size: int,
    horizon: int | None = None,
    operators=OPERATORS,
) -> OracleVerdict:
    """As check_dfa for formulas; with ``horizon`` set, only strictly stronger
    descriptions separated by a word of length ≤ horizon count."""
    if phi.alphabet != sample.alphabet:
        raise AlphabetMismatchError("formula and sample use different alphabets")
    described = phi.size <= size_bound and all(evaluate(phi, w) for w in sample.positives)
    if not described:
        return OracleVerdict(is_description=False, verdict="fail",
                             detail="formula is not an n-description of the sample")
    bound, scope = _bounded(LTLF_ORACLE_LIMIT, size_bound, oracle_max_size)
    if bound is None:
        return OracleVerdict(is_description=True, verdict="skipped", detail=scope)
    for psi in enumerate_formulas(bound, phi.alphabet, operators):
        if not all(evaluate(psi, w) for w in sample.positives):
            continue
        if not implies(psi, phi):
            continue
        word = witness(phi, psi)
        if word is None:
            continue
        if horizon is not None and len(word) > horizon:
            continue
        return OracleVerdict(
            is_description=True,
            verdict="fail",
            detail=f"a size-{psi.size} description is strictly stronger; "
                   f"it fails on {format_word(word, phi.alphabet)!r}",
            witness=str(psi),
        )
    if horizon is not None:
        scope += f", modulo words longer than {horizon}"
    return OracleVerdict(is_description=True, verdict="pass", detail=scope)
