import pytest

from core import Alphabet
from dfa import Dfa, empty_dfa, universal_dfa
from errors import AlphabetMismatchError
from ltlf import parse_formula
from services.oracle import check_dfa, check_formula, enumerate_dfas, enumerate_formulas


def test_enumerate_dfas_counts(a_only):
    assert len(list(enumerate_dfas(1, a_only))) == 2
    # 2 + (2^2 transitions * 2^2 final sets)
    assert len(list(enumerate_dfas(2, a_only))) == 18


def test_enumerate_formulas_of_size_one(a0a1):
    assert sorted(str(phi) for phi in enumerate_formulas(1, a0a1)) == ["a0", "a1"]


def test_enumerate_formulas_respects_operators(a0a1):
    formulas = enumerate_formulas(2, a0a1, operators=("X",))
    assert {str(phi) for phi in formulas} == {"a0", "a1", "X a0", "X a1"}


def test_minimal_dfa_passes(a_plus_dfa, a_plus_sample):
    verdict = check_dfa(a_plus_dfa, a_plus_sample, 2, 2)
    assert verdict.is_description
    assert verdict.verdict == "pass"
    assert verdict.detail == "complete"


def test_partial_scope_is_reported(a_plus_dfa, a_plus_sample):
    verdict = check_dfa(a_plus_dfa, a_plus_sample, 3, 2)
    assert verdict.verdict == "pass"
    assert verdict.detail == "checked up to size 2"


def test_universal_dfa_fails_with_witness(a_only, a_plus_sample):
    verdict = check_dfa(universal_dfa(a_only), a_plus_sample, 2, 2)
    assert verdict.is_description
    assert verdict.verdict == "fail"
    assert "''" in verdict.detail
    stronger = Dfa.model_validate_json(verdict.witness)
    assert not stronger.accepts(())
    assert all(stronger.accepts(w) for w in a_plus_sample.positives)


def test_non_description_fails(a_only, a_plus_sample):
    verdict = check_dfa(empty_dfa(a_only), a_plus_sample, 2, 2)
    assert not verdict.is_description
    assert verdict.verdict == "fail"


def test_too_many_states_is_not_a_description(a_only, a_plus_sample):
    exact = Dfa(alphabet=a_only, num_states=5, delta=((2,), (3,), (4,), (5,), (5,)),
                finals=frozenset({2, 3, 4}))
    assert not check_dfa(exact, a_plus_sample, 2, 2).is_description


@pytest.mark.parametrize("oracle_max_size, detail", [(0, "oracle disabled"), (10, "limit")])
def test_dfa_oracle_skipped(a_plus_dfa, a_plus_sample, oracle_max_size, detail):
    verdict = check_dfa(a_plus_dfa, a_plus_sample, 2, oracle_max_size)
    assert verdict.verdict == "skipped"
    assert verdict.is_description
    assert detail in verdict.detail


def test_alphabet_mismatch(a_plus_dfa, g_a0_sample):
    with pytest.raises(AlphabetMismatchError):
        check_dfa(a_plus_dfa, g_a0_sample, 2, 2)
    with pytest.raises(AlphabetMismatchError):
        check_formula(parse_formula("G a", Alphabet.of("a")), g_a0_sample, 2, 2)


def test_globally_passes(a0a1, g_a0_sample):
    verdict = check_formula(parse_formula("G a0", a0a1), g_a0_sample, 2, 2)
    assert verdict.verdict == "pass"
    assert verdict.detail == "complete"


def test_weaker_formula_fails(a0a1, g_a0_sample):
    verdict = check_formula(parse_formula("a0", a0a1), g_a0_sample, 2, 2)
    assert verdict.is_description
    assert verdict.verdict == "fail"
    assert verdict.witness is not None


def test_formula_not_holding_on_sample(a0a1, g_a0_sample):
    verdict = check_formula(parse_formula("a1", a0a1), g_a0_sample, 2, 2)
    assert not verdict.is_description


def test_horizon_hides_long_separations(a0a1, g_a0_sample):
    verdict = check_formula(parse_formula("a0", a0a1), g_a0_sample, 2, 2, horizon=1)
    assert verdict.verdict == "pass"
    assert verdict.detail == "complete, modulo words longer than 1"
