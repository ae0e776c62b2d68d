"""LTLf formulas as syntax DAGs over an alphabet of atoms.

A formula is a tuple of nodes ``(label, left, right)`` with identifiers
1..k; children always have smaller identifiers than their parent, child id 0
means "no child", and the root is node k. Structurally identical subformulas
are shared, so the size of a formula is its number of distinct subformulas.

Satisfaction is defined on nonempty words only and evaluated at position 1.
"""

import functools
from collections.abc import Mapping

import graphviz
import pyparsing as pp
from pydantic import BaseModel, ConfigDict, model_validator

from core import Alphabet, Word
from dfa import Dfa, is_equivalent, is_subset, shortest_separating_word
from errors import FormulaParseError, LearnerError

UNARY = ("!", "X", "F", "G")
BINARY = ("|", "&", "->", "U")
OPERATORS = UNARY + BINARY
TEMPORAL = ("X", "U", "F", "G")

Node = tuple[str, int, int]


class LtlfFormula(BaseModel):
    model_config = ConfigDict(frozen=True)

    alphabet: Alphabet
    nodes: tuple[Node, ...]

    @model_validator(mode="after")
    def _check_dag(self) -> "LtlfFormula":
        if not self.nodes:
            raise ValueError("a formula has at least one node")
        seen: set[Node] = set()
        for i, node in enumerate(self.nodes, start=1):
            label, left, right = node
            if label in UNARY:
                ok = 1 <= left < i and right == 0
            elif label in BINARY:
                ok = 1 <= left < i and 1 <= right < i
            elif label in self.alphabet.index:
                ok = left == 0 and right == 0
            else:
                raise ValueError(f"node {i} has unknown label {label!r}")
            if not ok:
                raise ValueError(f"node {i} ({label}) has invalid children {left},{right}")
            if node in seen:
                raise ValueError(f"node {i} duplicates an earlier subformula")
            seen.add(node)
        return self

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> int:
        return len(self.nodes)

    def node(self, i: int) -> Node:
        return self.nodes[i - 1]

    def __str__(self) -> str:
        return print_formula(self)


class FormulaBuilder:
    """Hash-consing constructor; ids are handed out in creation order."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.nodes: list[Node] = []
        self._ids: dict[Node, int] = {}

    def _make(self, node: Node) -> int:
        if node not in self._ids:
            self.nodes.append(node)
            self._ids[node] = len(self.nodes)
        return self._ids[node]

    def atom(self, name: str) -> int:
        if name not in self.alphabet.index:
            raise FormulaParseError(f"unknown atom {name!r}")
        return self._make((name, 0, 0))

    def unary(self, op: str, child: int) -> int:
        return self._make((op, child, 0))

    def binary(self, op: str, left: int, right: int) -> int:
        return self._make((op, left, right))

    def true(self) -> int:
        a = self.atom(self.alphabet.symbols[0])
        return self.binary("|", a, self.unary("!", a))

    def false(self) -> int:
        a = self.atom(self.alphabet.symbols[0])
        return self.binary("&", a, self.unary("!", a))

    def build(self, root: int) -> LtlfFormula:
        """The formula rooted at ``root``, renumbered left-first post-order."""
        return _compact(self.alphabet, self.nodes, root)


def _compact(alphabet: Alphabet, nodes: list[Node] | tuple[Node, ...], root: int) -> LtlfFormula:
    out: list[Node] = []
    ids: dict[Node, int] = {}
    memo: dict[int, int] = {}

    def visit(i: int) -> int:
        if i in memo:
            return memo[i]
        label, left, right = nodes[i - 1]
        new = (label, visit(left) if left else 0, visit(right) if right else 0)
        if new not in ids:
            out.append(new)
            ids[new] = len(out)
        memo[i] = ids[new]
        return memo[i]

    visit(root)
    return LtlfFormula(alphabet=alphabet, nodes=tuple(out))


def build_from_dag(
    alphabet: Alphabet,
    labels: Mapping[int, str],
    lefts: Mapping[int, int],
    rights: Mapping[int, int],
    root: int,
) -> LtlfFormula:
    """Decode a raw labelled DAG (possibly with duplicates and dead nodes)."""
    builder = FormulaBuilder(alphabet)
    memo: dict[int, int] = {}

    def visit(i: int) -> int:
        if i not in memo:
            label = labels[i]
            if label in UNARY:
                memo[i] = builder.unary(label, visit(lefts[i]))
            elif label in BINARY:
                memo[i] = builder.binary(label, visit(lefts[i]), visit(rights[i]))
            else:
                memo[i] = builder.atom(label)
        return memo[i]

    return builder.build(visit(root))


def true_formula(alphabet: Alphabet) -> LtlfFormula:
    builder = FormulaBuilder(alphabet)
    return builder.build(builder.true())


def subformula(phi: LtlfFormula, i: int) -> LtlfFormula:
    return _compact(phi.alphabet, phi.nodes, i)


def subformulas(phi: LtlfFormula) -> list[LtlfFormula]:
    return [subformula(phi, i) for i in range(1, phi.size + 1)]


# -- text syntax --------------------------------------------------------------

_KEYWORDS = {"X", "U", "F", "G", "true", "false"}

# Characters allowed in atom names inside formula text.
ATOM_CHARS = pp.alphanums + "_"


def _grammar(builder: FormulaBuilder) -> pp.ParserElement:
    name = pp.Word(ATOM_CHARS)

    def on_name(tokens):
        text = tokens[0]
        if text == "true":
            return builder.true()
        if text == "false":
            return builder.false()
        if text in _KEYWORDS:
            raise pp.ParseException(f"operator {text!r} used as an atom")
        return builder.atom(text)

    operand = name.copy().set_parse_action(on_name)

    def on_unary(tokens):
        group = list(tokens[0])
        child = group[-1]
        for op in reversed(group[:-1]):
            child = builder.unary(op, child)
        return child

    def fold_left(tokens):
        group = list(tokens[0])
        acc = group[0]
        for op, rhs in zip(group[1::2], group[2::2]):
            acc = builder.binary(op, acc, rhs)
        return acc

    def fold_right(tokens):
        group = list(tokens[0])
        acc = group[-1]
        for lhs, op in zip(reversed(group[0:-1:2]), reversed(group[1::2])):
            acc = builder.binary(op, lhs, acc)
        return acc

    unary_op = pp.Literal("!") | pp.Keyword("X") | pp.Keyword("F") | pp.Keyword("G")
    return pp.infix_notation(
        operand,
        [
            (unary_op, 1, pp.OpAssoc.RIGHT, on_unary),
            (pp.Keyword("U"), 2, pp.OpAssoc.RIGHT, fold_right),
            (pp.Literal("&"), 2, pp.OpAssoc.LEFT, fold_left),
            (pp.Literal("|"), 2, pp.OpAssoc.LEFT, fold_left),
            (pp.Literal("->"), 2, pp.OpAssoc.RIGHT, fold_right),
        ],
    )


def parse_formula(text: str, alphabet: Alphabet) -> LtlfFormula:
    """Parse ``! X F G U & | ->`` (tightest first); ``true``/``false`` are sugar."""
    builder = FormulaBuilder(alphabet)
    try:
        result = _grammar(builder).parse_string(text, parse_all=True)
    except pp.ParseException as exc:
        raise FormulaParseError(f"cannot parse {text!r}: {exc}") from exc
    return builder.build(result[0])


def require_formula_atoms(alphabet: Alphabet) -> None:
    """Every symbol must be writable as an atom in formula text."""
    bad = [name for name in alphabet.symbols
           if name in _KEYWORDS or any(c not in ATOM_CHARS for c in name)]
    if bad:
        raise FormulaParseError(
            f"symbol names {bad} cannot appear in formulas; use letters, digits and '_', "
            "and avoid X, U, F, G, true, false"
        )


def print_formula(phi: LtlfFormula, i: int | None = None) -> str:
    i = phi.root if i is None else i
    label, left, right = phi.node(i)
    if label in UNARY:
        inner = print_formula(phi, left)
        if phi.node(left)[0] in BINARY:
            inner = f"({inner})"
        return f"!{inner}" if label == "!" else f"{label} {inner}"
    if label in BINARY:
        parts = []
        for child in (left, right):
            text = print_formula(phi, child)
            parts.append(f"({text})" if phi.node(child)[0] in BINARY else text)
        return f"{parts[0]} {label} {parts[1]}"
    return label


def formula_dot(phi: LtlfFormula) -> str:
    dot = graphviz.Digraph(name="ltlf", comment="alphabet: " + ",".join(phi.alphabet.symbols))
    for i, (label, left, right) in enumerate(phi.nodes, start=1):
        dot.node(str(i), label=f"{i}: {label}", shape="box" if label in OPERATORS else "ellipse")
        if left:
            dot.edge(str(i), str(left), label="L" if right else "")
        if right:
            dot.edge(str(i), str(right), label="R")
    return dot.source


# -- semantics ----------------------------------------------------------------

def valuation(phi: LtlfFormula, word: Word) -> list[list[bool]]:
    """table[i - 1][t - 1] is whether node i holds on ``word`` at position t."""
    if not word:
        raise LearnerError("LTLf satisfaction is undefined on the empty word")
    n = len(word)
    table = [[False] * n for _ in phi.nodes]
    index = phi.alphabet.index
    for t in range(n - 1, -1, -1):
        last = t == n - 1
        for i, (label, left, right) in enumerate(phi.nodes):
            l = table[left - 1][t] if left else False
            r = table[right - 1][t] if right else False
            match label:
                case "!":
                    v = not l
                case "|":
                    v = l or r
                case "&":
                    v = l and r
                case "->":
                    v = (not l) or r
                case "X":
                    v = not last and table[left - 1][t + 1]
                case "U":
                    v = r or (l and not last and table[i][t + 1])
                case "F":
                    v = l or (not last and table[i][t + 1])
                case "G":
                    v = l and (last or table[i][t + 1])
                case _:
                    v = word[t] == index[label]
            table[i][t] = v
    return table


def evaluate(phi: LtlfFormula, word: Word, t: int = 1) -> bool:
    if not 1 <= t <= max(len(word), 1):
        raise ValueError(f"position {t} outside 1..{len(word)}")
    return valuation(phi, word)[phi.root - 1][t - 1]


def _node_values(phi: LtlfFormula, symbol: int, nxt: tuple[bool, ...] | None,
                 slot: dict[int, int]) -> list[bool]:
    """Node values at one position given the tracked values at the next one
    (``nxt is None`` at the last position)."""
    index = phi.alphabet.index
    vals = [False] * phi.size
    for i, (label, left, right) in enumerate(phi.nodes, start=1):
        l = vals[left - 1] if left else False
        r = vals[right - 1] if right else False
        match label:
            case "!":
                v = not l
            case "|":
                v = l or r
            case "&":
                v = l and r
            case "->":
                v = (not l) or r
            case "X":
                v = nxt is not None and nxt[slot[left]]
            case "U":
                v = r or (l and nxt is not None and nxt[slot[i]])
            case "F":
                v = l or (nxt is not None and nxt[slot[i]])
            case "G":
                v = l and (nxt is None or nxt[slot[i]])
            case _:
                v = symbol == index[label]
        vals[i - 1] = v
    return vals


@functools.lru_cache(maxsize=512)
def to_dfa(phi: LtlfFormula) -> Dfa:
    """Compile to a complete DFA accepting exactly the nonempty words satisfying phi.

    A state after reading u records whether u itself satisfies phi, together
    with a table that maps (next symbol, tracked values one step later or
    end-of-word) to the truth of phi on the whole word. Tracked nodes are the
    X-children and the U/F/G nodes, whose values at t+1 are all a position
    needs besides its own symbol.
    """
    tracked = sorted(
        {left for label, left, _ in phi.nodes if label == "X"}
        | {i for i, (label, _, _) in enumerate(phi.nodes, start=1) if label in ("U", "F", "G")}
    )
    slot = {node: j for j, node in enumerate(tracked)}
    k = len(phi.alphabet)
    contexts: list[tuple[bool, ...] | None] = [None]
    for mask in range(2 ** len(tracked)):
        contexts.append(tuple(bool(mask >> j & 1) for j in range(len(tracked))))
    width = len(contexts)
    position = {ctx: c for c, ctx in enumerate(contexts)}

    # succ[s*width + c]: index of the tracked-value context this position hands
    # to the previous one; root[...] is phi's value when the word starts here.
    succ: list[int] = []
    root: list[bool] = []
    for s in range(k):
        for ctx in contexts:
            vals = _node_values(phi, s, ctx, slot)
            succ.append(position[tuple(vals[n - 1] for n in tracked)])
            root.append(vals[phi.root - 1])

    start = (False, tuple(root))
    states = {start: 1}
    order = [start]
    delta: list[tuple[int, ...]] = []
    i = 0
    while i < len(order):
        _, table = order[i]
        i += 1
        row = []
        for s in range(k):
            base = s * width
            end = table[base]
            new = tuple(table[base + succ[j]] for j in range(k * width))
            state = (end, new)
            if state not in states:
                states[state] = len(order) + 1
                order.append(state)
            row.append(states[state])
        delta.append(tuple(row))
    finals = frozenset(q for q, (end, _) in enumerate(order, start=1) if end)
    return Dfa(alphabet=phi.alphabet, num_states=len(order), delta=tuple(delta), finals=finals)


def implies(phi: LtlfFormula, psi: LtlfFormula) -> bool:
    return is_subset(to_dfa(phi), to_dfa(psi))


def equivalent(phi: LtlfFormula, psi: LtlfFormula) -> bool:
    return is_equivalent(to_dfa(phi), to_dfa(psi))


def witness(phi: LtlfFormula, psi: LtlfFormula) -> Word | None:
    """A shortest word satisfying phi ∧ ¬psi, if any."""
    return shortest_separating_word(to_dfa(phi), to_dfa(psi))
