"""Positive-sample generators: random target DFAs, LTLf formulas, synthetic UAV logs."""

import logging
import random

from core import Alphabet, Sample, Word, word_key
from dfa import Dfa, count_accepted, random_dfa, sample_positive_words
from errors import SamplingError
from ltlf import LtlfFormula, evaluate, parse_formula, to_dfa
from patterns import compile_pattern, get_pattern_by_name

logger = logging.getLogger(__name__)

# Event symbols of the synthetic UAV traces.
UAV_ALPHABET = Alphabet.of("x0", "x1", "x2", "x3")
UAV_EVENTS = {"x0": "low battery", "x1": "glide", "x2": "change yaw", "x3": "change roll"}


def sample_from_dfa(
    n: int, alphabet: Alphabet, count: int, min_len: int, max_len: int, seed: int
) -> tuple[Sample, Dfa]:
    target = random_dfa(n, alphabet, seed)
    words = sample_positive_words(target, count, min_len, max_len, seed)
    if len(words) < count:
        logger.warning("target DFA accepts only %d words in range, %d requested", len(words), count)
    return Sample(alphabet=alphabet, positives=frozenset(words)), target


def sample_from_formula(
    phi: LtlfFormula, count: int, min_len: int, max_len: int, seed: int
) -> Sample:
    """Uniform words filtered by the formula, topped up from its compiled DFA."""
    min_len = max(min_len, 1)
    if max_len < min_len:
        raise SamplingError(f"invalid length range {min_len}..{max_len}")
    compiled = to_dfa(phi)
    total = count_accepted(compiled, min_len, max_len)
    if total == 0:
        raise SamplingError(f"{phi} holds on no word of length {min_len}..{max_len}")
    if total < count:
        logger.warning("only %d words satisfy %s, %d requested", total, phi, count)

    rng = random.Random(seed)
    k = len(phi.alphabet)
    words: set[Word] = set()
    for _ in range(100 * count):
        if len(words) >= min(count, total):
            break
        word = tuple(rng.randrange(k) for _ in range(rng.randint(min_len, max_len)))
        if evaluate(phi, word):
            words.add(word)
    if len(words) < min(count, total):
        extra = sample_positive_words(compiled, count, min_len, max_len, seed + 1)
        for word in sorted(extra - words, key=word_key)[: count - len(words)]:
            words.add(word)
    return Sample(alphabet=phi.alphabet, positives=frozenset(words))


def sample_from_text(formula: str, alphabet: Alphabet, count: int, min_len: int,
                     max_len: int, seed: int) -> Sample:
    return sample_from_formula(parse_formula(formula, alphabet), count, min_len, max_len, seed)


def sample_from_pattern(name: str, count: int, min_len: int, max_len: int, seed: int) -> Sample:
    pattern = get_pattern_by_name(name)
    if pattern is None:
        raise SamplingError(f"unknown pattern {name!r}")
    return sample_from_formula(compile_pattern(pattern), count, min_len, max_len, seed)


def sample_uav(count: int, min_len: int, max_len: int, seed: int) -> Sample:
    """Synthetic flight logs, one event per step.

    A flight either glides throughout, or logs roll changes until the battery
    runs low and low-battery events from then on. A yaw change is only logged
    as part of a roll change, so x2 never appears on its own step. Every trace
    satisfies (F x1) -> (G x1) and G(x2 -> x3).
    """
    min_len = max(min_len, 1)
    rng = random.Random(seed)
    glide, low, roll = (UAV_ALPHABET.index[s] for s in ("x1", "x0", "x3"))
    words: set[Word] = set()
    for _ in range(100 * count):
        if len(words) >= count:
            break
        length = rng.randint(min_len, max_len)
        if rng.random() < 0.3:
            words.add((glide,) * length)
            continue
        drained = rng.randint(1, length + 1)
        words.add(tuple(roll if t < drained else low for t in range(1, length + 1)))
    return Sample(alphabet=UAV_ALPHABET, positives=frozenset(words))
