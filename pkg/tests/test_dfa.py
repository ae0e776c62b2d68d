import random
import re

import pytest

from core import Alphabet, all_words
from dfa import (
    Dfa,
    count_accepted,
    emit_dot,
    empty_dfa,
    format_table,
    is_equivalent,
    is_strict_subset,
    is_subset,
    iter_accepted,
    parse_dot,
    random_dfa,
    reachable_states,
    run,
    sample_positive_words,
    shortest_separating_word,
    trim,
    universal_dfa,
)
from errors import AlphabetMismatchError, SamplingError


def chain(alphabet: Alphabet, accepted_lengths: set[int], n: int) -> Dfa:
    """Unary-style chain 1 -> 2 -> ... -> n with n absorbing."""
    k = len(alphabet)
    delta = tuple((min(p + 1, n),) * k for p in range(1, n + 1))
    return Dfa(alphabet=alphabet, num_states=n, delta=delta,
               finals=frozenset(q + 1 for q in accepted_lengths))


def test_universal_dfa_accepts_everything(ab):
    u = universal_dfa(ab)
    assert len(u) == 1
    assert all(u.accepts(w) for w in all_words(2, 5))
    assert all(run(u, w) == 1 for w in all_words(2, 3))


def test_run_follows_transitions(a_only):
    flip = Dfa(alphabet=a_only, num_states=2, delta=((2,), (1,)))
    assert run(flip, (0, 0)) == 1
    assert run(flip, (0,)) == 2


def test_incomplete_dfa_is_rejected(ab):
    with pytest.raises(ValueError):
        Dfa(alphabet=ab, num_states=2, delta=((1, 2), (1,)))
    with pytest.raises(ValueError):
        Dfa(alphabet=ab, num_states=1, delta=((1, 2),))


def test_run_agrees_with_accepts(ab):
    d = random_dfa(4, ab, seed=3)
    for w in all_words(2, 4):
        assert (run(d, w) in d.finals) == d.accepts(w)


def test_subset_examples(a_only):
    only_a = chain(a_only, {1}, 3)
    a_or_aa = chain(a_only, {1, 2}, 4)
    assert is_subset(only_a, a_or_aa)
    assert not is_subset(a_or_aa, only_a)
    assert is_subset(only_a, only_a)
    assert is_subset(a_or_aa, universal_dfa(a_only))
    assert is_strict_subset(only_a, a_or_aa)


def test_separating_word_is_shortest_lex(ab):
    eps_only = Dfa(alphabet=ab, num_states=2, delta=((2, 2), (2, 2)), finals=frozenset({1}))
    assert shortest_separating_word(universal_dfa(ab), eps_only) == (0,)
    assert shortest_separating_word(eps_only, eps_only) is None
    assert shortest_separating_word(eps_only, empty_dfa(ab)) == ()


def test_alphabet_mismatch(ab, a_only):
    with pytest.raises(AlphabetMismatchError):
        is_subset(universal_dfa(ab), universal_dfa(a_only))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("seed", range(15))
def test_separating_word_matches_brute_force(n, seed, ab):
    a1 = random_dfa(n, ab, seed)
    a2 = random_dfa(n, ab, seed + 100)
    expected = next((w for w in all_words(2, n * n) if a1.accepts(w) and not a2.accepts(w)), None)
    assert shortest_separating_word(a1, a2) == expected


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("seed", range(20))
def test_subset_agrees_with_membership(n, seed, ab):
    a1 = random_dfa(n, ab, seed)
    a2 = random_dfa(n, ab, seed + 500)
    brute = all(a2.accepts(w) for w in all_words(2, n * n) if a1.accepts(w))
    assert is_subset(a1, a2) == brute


@pytest.mark.parametrize("seed", range(200))
def test_strict_inclusion_has_short_separating_word(seed, ab):
    n = 2 + seed % 4
    small = random_dfa(n, ab, seed)
    rejecting = sorted(set(small.states) - small.finals)
    extra = random.Random(seed).choice(rejecting)
    big = Dfa(alphabet=ab, num_states=n, delta=small.delta, finals=small.finals | {extra})
    assert is_strict_subset(small, big)
    word = shortest_separating_word(big, small)
    assert big.accepts(word) and not small.accepts(word)
    assert len(word) <= n * n


def test_trim_drops_unreachable_states(ab):
    d = Dfa(alphabet=ab, num_states=3, delta=((1, 1), (3, 3), (2, 2)), finals=frozenset({1, 2}))
    t = trim(d)
    assert t.num_states == 1
    assert is_equivalent(t, universal_dfa(ab))


def test_trim_renumbers_in_bfs_order(ab):
    d = Dfa(alphabet=ab, num_states=3, delta=((3, 2), (2, 2), (3, 3)), finals=frozenset({3}))
    t = trim(d)
    assert t.delta == ((2, 3), (2, 2), (3, 3))
    assert t.finals == frozenset({2})


def test_random_dfa_contract(ab):
    assert random_dfa(4, ab, seed=7) == random_dfa(4, ab, seed=7)
    for seed in range(30):
        d = random_dfa(5, ab, seed)
        assert reachable_states(d) == set(d.states)
        assert d.finals and len(d.finals) < d.num_states
        assert count_accepted(d, 1, 5) > 0


def test_random_one_state_dfa(ab):
    d = random_dfa(1, ab, seed=0)
    assert is_equivalent(d, universal_dfa(ab)) or is_equivalent(d, empty_dfa(ab))


def test_iter_and_count_accepted(a_only):
    even = Dfa(alphabet=a_only, num_states=2, delta=((2,), (1,)), finals=frozenset({1}))
    assert list(iter_accepted(even, 4)) == [(), (0, 0), (0, 0, 0, 0)]
    assert count_accepted(even, 1, 4) == 2
    assert count_accepted(universal_dfa(Alphabet.of("a", "b")), 0, 2) == 7


def test_sample_positive_words(ab):
    words = sample_positive_words(universal_dfa(ab), 3, 1, 2, seed=0)
    assert len(words) == 3
    assert all(1 <= len(w) <= 2 for w in words)


def test_sample_positive_words_are_accepted(ab):
    d = random_dfa(4, ab, seed=11)
    words = sample_positive_words(d, 50, 1, 8, seed=2)
    assert words
    assert all(d.accepts(w) and 1 <= len(w) <= 8 for w in words)
    assert sample_positive_words(d, 50, 1, 8, seed=2) == words


def test_sample_returns_all_when_range_is_small(a_only):
    words = sample_positive_words(universal_dfa(a_only), 10, 1, 3, seed=0)
    assert words == {(0,), (0, 0), (0, 0, 0)}


def test_sample_from_empty_range_fails(a_only):
    even = Dfa(alphabet=a_only, num_states=2, delta=((2,), (1,)), finals=frozenset({1}))
    with pytest.raises(SamplingError):
        sample_positive_words(even, 5, 1, 1, seed=0)


def test_emit_dot(ab):
    text = emit_dot(universal_dfa(ab))
    nodes = [line for line in text.splitlines() if re.match(r"^\s*\d+\s*\[", line)]
    assert len(nodes) == 1
    assert "bold" in nodes[0]
    assert "doublecircle" in nodes[0]


@pytest.mark.parametrize("seed", range(5))
def test_dot_round_trip(seed, ab):
    d = random_dfa(4, ab, seed)
    assert parse_dot(emit_dot(d)) == d


def test_json_round_trip(ab):
    d = random_dfa(3, ab, seed=4)
    assert Dfa.model_validate_json(d.model_dump_json()) == d


def test_format_table(a_plus_dfa):
    lines = format_table(a_plus_dfa).splitlines()
    assert lines[0].split() == ["a"]
    assert lines[1].split() == [">1", "2"]
    assert lines[2].split() == ["*2", "2"]
