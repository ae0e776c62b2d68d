"""Complete DFAs and the automaton primitives the learners rely on.

States are numbered 1..n and state 1 is always initial. Every product search
explores symbols in ascending id order, so separating words are shortest and
then lexicographically least.
"""

import random
import re
from collections import deque
from collections.abc import Callable, Iterator

import graphviz
from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from core import Alphabet, Word
from errors import AlphabetMismatchError, SamplingError


class Dfa(BaseModel):
    model_config = ConfigDict(frozen=True)

    alphabet: Alphabet
    num_states: int = Field(..., ge=1)
    delta: tuple[tuple[int, ...], ...]  # delta[p - 1][a] = q
    finals: frozenset[int] = frozenset()

    @model_validator(mode="after")
    def _check_complete(self) -> "Dfa":
        n, k = self.num_states, len(self.alphabet)
        if len(self.delta) != n:
            raise ValueError(f"delta has {len(self.delta)} rows, expected {n}")
        for p, row in enumerate(self.delta, start=1):
            if len(row) != k:
                raise ValueError(f"state {p} has {len(row)} transitions, expected {k}")
            if any(q < 1 or q > n for q in row):
                raise ValueError(f"state {p} has a transition outside 1..{n}")
        if any(q < 1 or q > n for q in self.finals):
            raise ValueError("final states must lie in 1..num_states")
        return self

    @field_serializer("finals")
    def _serialize_finals(self, finals: frozenset[int]) -> list[int]:
        return sorted(finals)

    @property
    def initial(self) -> int:
        return 1

    @property
    def states(self) -> range:
        return range(1, self.num_states + 1)

    def step(self, p: int, a: int) -> int:
        return self.delta[p - 1][a]

    def accepts(self, word: Word) -> bool:
        return run(self, word) in self.finals

    def __len__(self) -> int:
        return self.num_states


def run(dfa: Dfa, word: Word) -> int:
    q = dfa.initial
    for a in word:
        q = dfa.delta[q - 1][a]
    return q


def universal_dfa(alphabet: Alphabet) -> Dfa:
    return Dfa(
        alphabet=alphabet,
        num_states=1,
        delta=((1,) * len(alphabet),),
        finals=frozenset({1}),
    )


def empty_dfa(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet=alphabet, num_states=1, delta=((1,) * len(alphabet),))


def _check_alphabets(a1: Dfa, a2: Dfa) -> None:
    if a1.alphabet != a2.alphabet:
        raise AlphabetMismatchError(
            f"alphabets differ: {a1.alphabet.symbols} vs {a2.alphabet.symbols}"
        )


def _product_search(a1: Dfa, a2: Dfa, target: Callable[[int, int], bool]) -> Word | None:
    """BFS over the synchronized product; first hit is shortest-lex."""
    _check_alphabets(a1, a2)
    start = (a1.initial, a2.initial)
    if target(*start):
        return ()
    parent: dict[tuple[int, int], tuple[tuple[int, int], int]] = {}
    seen = {start}
    queue = deque([start])
    k = len(a1.alphabet)
    while queue:
        p1, p2 = queue.popleft()
        for a in range(k):
            nxt = (a1.step(p1, a), a2.step(p2, a))
            if nxt in seen:
                continue
            seen.add(nxt)
            parent[nxt] = ((p1, p2), a)
            if target(*nxt):
                word = []
                node = nxt
                while node != start:
                    node, sym = parent[node]
                    word.append(sym)
                return tuple(reversed(word))
            queue.append(nxt)
    return None


def shortest_separating_word(a1: Dfa, a2: Dfa) -> Word | None:
    """A shortest word in L(a1) \\ L(a2), or None when L(a1) ⊆ L(a2)."""
    return _product_search(a1, a2, lambda q1, q2: q1 in a1.finals and q2 not in a2.finals)


def is_subset(a1: Dfa, a2: Dfa) -> bool:
    return shortest_separating_word(a1, a2) is None


def is_equivalent(a1: Dfa, a2: Dfa) -> bool:
    return is_subset(a1, a2) and is_subset(a2, a1)


def is_strict_subset(a1: Dfa, a2: Dfa) -> bool:
    return is_subset(a1, a2) and not is_subset(a2, a1)


def trim(dfa: Dfa) -> Dfa:
    """Drop unreachable states, renumbering in BFS order (symbol-id order)."""
    order = [dfa.initial]
    number = {dfa.initial: 1}
    i = 0
    while i < len(order):
        p = order[i]
        i += 1
        for a in range(len(dfa.alphabet)):
            q = dfa.step(p, a)
            if q not in number:
                number[q] = len(order) + 1
                order.append(q)
    delta = tuple(
        tuple(number[dfa.step(p, a)] for a in range(len(dfa.alphabet))) for p in order
    )
    finals = frozenset(number[q] for q in order if q in dfa.finals)
    return Dfa(alphabet=dfa.alphabet, num_states=len(order), delta=delta, finals=finals)


def canonical_form(dfa: Dfa) -> Dfa:
    """Two complete DFAs have isomorphic reachable parts iff their canonical forms are equal."""
    return trim(dfa)


def reachable_states(dfa: Dfa) -> set[int]:
    seen = {dfa.initial}
    queue = deque([dfa.initial])
    while queue:
        p = queue.popleft()
        for q in dfa.delta[p - 1]:
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return seen


def _live_table(dfa: Dfa, max_len: int) -> list[set[int]]:
    """live[r]: states from which some accepted word of length exactly r exists."""
    live = [set(dfa.finals)]
    for _ in range(max_len):
        prev = live[-1]
        live.append({p for p in dfa.states if any(q in prev for q in dfa.delta[p - 1])})
    return live


def iter_accepted(dfa: Dfa, max_len: int, min_len: int = 0) -> Iterator[Word]:
    """Accepted words with length in [min_len, max_len], in length-lex order."""
    live = _live_table(dfa, max_len)
    k = len(dfa.alphabet)

    def extend(q: int, remaining: int, prefix: list[int]) -> Iterator[Word]:
        if remaining == 0:
            yield tuple(prefix)
            return
        for a in range(k):
            nxt = dfa.step(q, a)
            if nxt in live[remaining - 1]:
                prefix.append(a)
                yield from extend(nxt, remaining - 1, prefix)
                prefix.pop()

    for length in range(min_len, max_len + 1):
        if dfa.initial in live[length]:
            yield from extend(dfa.initial, length, [])


def count_accepted(dfa: Dfa, min_len: int, max_len: int) -> int:
    counts = {q: int(q in dfa.finals) for q in dfa.states}
    total = counts[dfa.initial] if min_len == 0 else 0
    for length in range(1, max_len + 1):
        counts = {p: sum(counts[q] for q in dfa.delta[p - 1]) for p in dfa.states}
        if length >= min_len:
            total += counts[dfa.initial]
    return total


def random_dfa(n: int, alphabet: Alphabet, seed: int) -> Dfa:
    """Uniform transitions and coin-flip finals, redrawn until every state is
    reachable and (for n ≥ 2) both final and non-final states exist and some
    nonempty word is accepted."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    k = len(alphabet)
    while True:
        delta = tuple(tuple(rng.randint(1, n) for _ in range(k)) for _ in range(n))
        finals = frozenset(q for q in range(1, n + 1) if rng.random() < 0.5)
        dfa = Dfa(alphabet=alphabet, num_states=n, delta=delta, finals=finals)
        if len(reachable_states(dfa)) != n:
            continue
        if n >= 2 and (not finals or len(finals) == n):
            continue
        if n >= 2 and count_accepted(dfa, 1, n) == 0:
            continue
        return dfa


def sample_positive_words(
    dfa: Dfa, count: int, min_len: int, max_len: int, seed: int
) -> set[Word]:
    """Up to ``count`` distinct accepted words with lengths in range.

    Uniform random walks are tried first (rejection sampling, 100·count
    attempts); the remainder is completed by walks that only take symbols
    from which a final state is still reachable in the remaining steps.
    """
    if min_len < 0 or max_len < min_len:
        raise SamplingError(f"invalid length range {min_len}..{max_len}")
    total = count_accepted(dfa, min_len, max_len)
    if total == 0:
        raise SamplingError(f"no accepted word has length in {min_len}..{max_len}")
    if total <= count:
        return set(iter_accepted(dfa, max_len, min_len))

    rng = random.Random(seed)
    k = len(dfa.alphabet)
    words: set[Word] = set()
    budget = 100 * count
    for _ in range(budget):
        if len(words) >= count:
            return words
        length = rng.randint(min_len, max_len)
        word = tuple(rng.randrange(k) for _ in range(length))
        if dfa.accepts(word):
            words.add(word)

    live = _live_table(dfa, max_len)
    feasible = [n for n in range(min_len, max_len + 1) if dfa.initial in live[n]]
    for _ in range(budget):
        if len(words) >= count:
            break
        remaining = rng.choice(feasible)
        q, word = dfa.initial, []
        while remaining:
            choices = [a for a in range(k) if dfa.step(q, a) in live[remaining - 1]]
            a = rng.choice(choices)
            word.append(a)
            q = dfa.step(q, a)
            remaining -= 1
        words.add(tuple(word))
    return words


def emit_dot(dfa: Dfa) -> str:
    """GraphViz digraph; node 1 is drawn bold as the initial state."""
    dot = graphviz.Digraph(name="dfa", comment="alphabet: " + ",".join(dfa.alphabet.symbols))
    dot.attr(rankdir="LR")
    for q in dfa.states:
        attrs = {"shape": "doublecircle" if q in dfa.finals else "circle"}
        if q == dfa.initial:
            attrs["style"] = "bold"
        dot.node(str(q), **attrs)
    for p in dfa.states:
        targets: dict[int, list[str]] = {}
        for a, name in enumerate(dfa.alphabet.symbols):
            targets.setdefault(dfa.step(p, a), []).append(name)
        for q, names in targets.items():
            dot.edge(str(p), str(q), label=",".join(names))
    return dot.source


def format_table(dfa: Dfa) -> str:
    """Transition table, one row per state; ``>`` marks the initial state, ``*`` finals."""
    header = ["", *dfa.alphabet.symbols]
    rows = [header]
    for q in dfa.states:
        mark = (">" if q == dfa.initial else "") + ("*" if q in dfa.finals else "")
        rows.append([f"{mark}{q}", *(str(dfa.step(q, a)) for a in range(len(dfa.alphabet)))])
    widths = [max(len(row[c]) for row in rows) for c in range(len(header))]
    return "\n".join(
        "  ".join(cell.rjust(w) for cell, w in zip(row, widths)).rstrip() for row in rows
    ) + "\n"


_NODE_RE = re.compile(r"^\s*(\d+)\s*\[(.*)\]\s*$")
_EDGE_RE = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*\[(.*)\]\s*$")
_ATTR_RE = re.compile(r'(\w+)=("([^"]*)"|[^\s\]]+)')


def _attrs(text: str) -> dict[str, str]:
    return {m.group(1): m.group(3) if m.group(3) is not None else m.group(2)
            for m in _ATTR_RE.finditer(text)}


def parse_dot(text: str) -> Dfa:
    """Read back the DOT produced by emit_dot."""
    alphabet = None
    finals: set[int] = set()
    nodes: set[int] = set()
    edges: dict[tuple[int, int], int] = {}
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("// alphabet:"):
            alphabet = Alphabet.of(stripped[len("// alphabet:"):].strip())
        elif m := _EDGE_RE.match(line):
            if alphabet is None:
                raise ValueError("DOT text lacks the alphabet comment")
            p, q = int(m.group(1)), int(m.group(2))
            for name in _attrs(m.group(3)).get("label", "").split(","):
                edges[(p, alphabet.index[name])] = q
        elif m := _NODE_RE.match(line):
            q = int(m.group(1))
            nodes.add(q)
            if _attrs(m.group(2)).get("shape") == "doublecircle":
                finals.add(q)
    if alphabet is None:
        raise ValueError("DOT text lacks the alphabet comment")
    n = max(nodes) if nodes else 0
    try:
        delta = tuple(tuple(edges[(p, a)] for a in range(len(alphabet))) for p in range(1, n + 1))
    except KeyError as exc:
        raise ValueError(f"DOT text has no transition for {exc.args[0]}") from exc
    return Dfa(alphabet=alphabet, num_states=n, delta=delta, finals=frozenset(finals))
