import pytest
from pydantic import ValidationError

from core import Alphabet, all_words
from errors import FormulaParseError, LearnerError
from ltlf import (
    FormulaBuilder,
    LtlfFormula,
    build_from_dag,
    equivalent,
    evaluate,
    formula_dot,
    implies,
    parse_formula,
    print_formula,
    require_formula_atoms,
    subformulas,
    to_dfa,
    true_formula,
    witness,
)
from services.oracle import enumerate_formulas

AB = Alphabet.of("a", "b")


def f(text: str, alphabet: Alphabet = AB) -> LtlfFormula:
    return parse_formula(text, alphabet)


def w(text: str) -> tuple[int, ...]:
    return tuple(AB.index[c] for c in text)


def holds(phi: LtlfFormula, i: int, word, t: int) -> bool:
    """Direct reading of the finite-trace semantics, one position at a time."""
    label, left, right = phi.node(i)
    n = len(word)
    match label:
        case "!":
            return not holds(phi, left, word, t)
        case "|":
            return holds(phi, left, word, t) or holds(phi, right, word, t)
        case "&":
            return holds(phi, left, word, t) and holds(phi, right, word, t)
        case "->":
            return not holds(phi, left, word, t) or holds(phi, right, word, t)
        case "X":
            return t < n and holds(phi, left, word, t + 1)
        case "U":
            return any(
                holds(phi, right, word, j) and all(holds(phi, left, word, k) for k in range(t, j))
                for j in range(t, n + 1)
            )
        case "F":
            return any(holds(phi, left, word, j) for j in range(t, n + 1))
        case "G":
            return all(holds(phi, left, word, j) for j in range(t, n + 1))
    return word[t - 1] == phi.alphabet.index[label]


def test_atom_holds_at_its_position():
    assert evaluate(f("a"), w("ab"), 1)
    assert not evaluate(f("a"), w("ab"), 2)


def test_next_is_strong():
    assert evaluate(f("X b"), w("ab"))
    assert not evaluate(f("X b"), w("a"))


def test_until_and_globally():
    assert evaluate(f("a U b"), w("aab"))
    assert not evaluate(f("a U b"), w("aaa"))
    assert evaluate(f("G a"), w("aa"))
    assert not evaluate(f("G a"), w("ab"))


def test_empty_word_is_rejected():
    with pytest.raises(LearnerError):
        evaluate(f("a"), ())


def test_shared_subformulas_count_once():
    phi = f("(a U X b) | X b")
    assert phi.size == 5
    assert phi.root == 5


@pytest.mark.parametrize("text", ["X", "a &", "a U", "(a", "c", "a & X"])
def test_malformed_formulas(text):
    with pytest.raises(FormulaParseError):
        f(text)


def test_precedence():
    assert f("!a & b") == f("(!a) & b")
    assert f("a | b & a") == f("a | (b & a)")
    assert f("a -> b -> a") == f("a -> (b -> a)")
    assert f("a U b U a") == f("a U (b U a)")
    assert f("X a U b") == f("(X a) U b")


@pytest.mark.parametrize(
    "text",
    [
        "G !a",
        "F b -> (!a U b)",
        "(G !a) | F (a & F b)",
        "G (a -> X (b | X b))",
        "!(a U b) & !X a",
        "X !X a",
    ],
)
def test_print_then_parse(text):
    phi = f(text)
    assert f(print_formula(phi)) == phi
    assert str(phi) == print_formula(phi)


def test_true_is_sugar():
    phi = f("true")
    assert phi.size == 3
    assert print_formula(phi) == "a | !a"
    assert phi == true_formula(AB)
    assert all(evaluate(f("false"), word) is False for word in all_words(2, 3, 1))


def test_dag_validator_rejects_bad_children():
    with pytest.raises(ValidationError):
        LtlfFormula(alphabet=AB, nodes=(("a", 0, 0), ("X", 2, 0)))
    with pytest.raises(ValidationError):
        LtlfFormula(alphabet=AB, nodes=(("a", 0, 0), ("a", 0, 0)))
    with pytest.raises(ValidationError):
        LtlfFormula(alphabet=AB, nodes=(("c", 0, 0),))


def test_children_precede_parents():
    for phi in [f("G (a -> X (b | X b))"), f("(a U X b) | X b")]:
        for i, (_, left, right) in enumerate(phi.nodes, start=1):
            assert left < i and right < i


def test_build_from_dag_drops_dead_and_duplicate_nodes():
    labels = {1: "a", 2: "a", 3: "b", 4: "&"}
    phi = build_from_dag(AB, labels, {2: 1, 3: 1, 4: 1}, {2: 1, 3: 1, 4: 2}, 4)
    assert phi == f("a & a")
    assert phi.size == 2


def test_builder_hash_conses():
    b = FormulaBuilder(AB)
    x = b.unary("X", b.atom("a"))
    assert b.unary("X", b.atom("a")) == x
    assert len(b.nodes) == 2


def test_subformulas():
    subs = [print_formula(s) for s in subformulas(f("a U X b"))]
    assert subs == ["a", "b", "X b", "a U X b"]


def test_formula_dot_lists_every_node():
    dot = formula_dot(f("(a U X b) | X b"))
    assert dot.count("label=") >= 5
    assert "alphabet: a,b" in dot


@pytest.mark.parametrize("phi", enumerate_formulas(3, AB), ids=str)
def test_semantics_and_compilation_agree(phi):
    compiled = to_dfa(phi)
    assert not compiled.accepts(())
    for word in all_words(2, 4, min_len=1):
        expected = holds(phi, phi.root, word, 1)
        assert evaluate(phi, word) == expected
        assert compiled.accepts(word) == expected


@pytest.mark.parametrize(
    "text",
    ["G (a -> X (b | X b))", "F b -> (!a U b)", "(G !a) | F (a & F b)", "X (a U (b & X a))"],
)
def test_compilation_of_larger_formulas(text):
    phi = f(text)
    compiled = to_dfa(phi)
    for word in all_words(2, 5, min_len=1):
        assert compiled.accepts(word) == holds(phi, phi.root, word, 1)


def test_to_dfa_examples():
    first_a = to_dfa(f("a"))
    assert first_a.accepts(w("ab")) and not first_a.accepts(w("ba"))
    top = to_dfa(true_formula(AB))
    assert all(top.accepts(word) for word in all_words(2, 4, min_len=1))
    assert not top.accepts(())
    ga = to_dfa(f("G a"))
    assert ga.accepts(w("a")) and ga.accepts(w("aa")) and ga.accepts(w("aaa"))
    assert not ga.accepts(w("ab"))


def test_implication_and_equivalence():
    assert implies(f("G a"), f("F a"))
    assert not implies(f("F a"), f("G a"))
    assert equivalent(f("F a"), f("true U a"))
    assert equivalent(f("G a"), f("!F !a"))


def test_witness_is_shortest():
    assert witness(f("F a"), f("G a")) == w("ab")
    assert witness(f("G a"), f("F a")) is None


@pytest.mark.parametrize("text", ["a U b", "X a", "G (a | X b)"])
def test_negation_is_pointwise(text):
    phi = f(text)
    neg = f(f"!({text})")
    for word in all_words(2, 4, min_len=1):
        assert evaluate(neg, word) == (not evaluate(phi, word))


def test_atoms_may_start_with_digits():
    alphabet = Alphabet.of("0", "1", "sensor_ok")
    phi = parse_formula("0 | X (1 & F sensor_ok)", alphabet)
    assert evaluate(phi, (0,))
    assert evaluate(phi, (2, 1, 2))
    assert not evaluate(phi, (1, 2))
    assert parse_formula(print_formula(phi), alphabet) == phi


@pytest.mark.parametrize(
    "names", [("low-battery", "glide"), ("X", "a"), ("true", "b"), ("a+b", "c"), ("F.x", "c")]
)
def test_unwritable_atom_names(names):
    with pytest.raises(FormulaParseError):
        require_formula_atoms(Alphabet.of(*names))
