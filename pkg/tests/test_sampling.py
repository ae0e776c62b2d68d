import pytest

from core import Alphabet
from errors import SamplingError
from ltlf import evaluate, parse_formula
from services.sampling import (
    UAV_ALPHABET,
    sample_from_dfa,
    sample_from_pattern,
    sample_from_text,
    sample_uav,
)


def test_dfa_sample_is_accepted_by_target(ab):
    sample, target = sample_from_dfa(3, ab, 20, 1, 8, seed=5)
    assert sample.positives
    assert all(target.accepts(w) for w in sample.positives)
    assert all(1 <= len(w) <= 8 for w in sample.positives)


def test_dfa_sample_is_deterministic(ab):
    first, _ = sample_from_dfa(3, ab, 20, 1, 8, seed=5)
    second, _ = sample_from_dfa(3, ab, 20, 1, 8, seed=5)
    assert first == second


def test_formula_with_a_single_model(a0a1):
    sample = sample_from_text("G !a0", a0a1, 5, 10, 10, seed=0)
    assert sample.positives == frozenset({(1,) * 10})


def test_empty_word_is_never_sampled(a0a1):
    sample = sample_from_text("F a0 | !a0", a0a1, 10, 0, 3, seed=1)
    assert () not in sample.positives
    assert len(sample.positives) == 10


def test_invalid_length_range(a0a1):
    with pytest.raises(SamplingError):
        sample_from_text("a0", a0a1, 5, 4, 2, seed=0)


def test_pattern_sample_satisfies_pattern():
    sample = sample_from_pattern("existence-1", 30, 1, 6, seed=2)
    assert sample.alphabet == Alphabet.of("a0", "a1")
    assert all(0 in w for w in sample.positives)


@pytest.mark.parametrize("name", ["no-such-pattern", "existence-3"])
def test_unusable_patterns(name):
    with pytest.raises(SamplingError):
        sample_from_pattern(name, 10, 1, 6, seed=0)


def test_uav_traces_respect_flight_rules():
    sample = sample_uav(40, 1, 8, seed=3)
    assert sample.alphabet == UAV_ALPHABET
    glide = parse_formula("(F x1) -> (G x1)", UAV_ALPHABET)
    yaw = parse_formula("G (x2 -> x3)", UAV_ALPHABET)
    for word in sample.positives:
        assert evaluate(glide, word)
        assert evaluate(yaw, word)


def test_uav_sample_is_deterministic():
    assert sample_uav(20, 1, 8, seed=9) == sample_uav(20, 1, 8, seed=9)
