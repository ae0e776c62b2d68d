"""Alphabets, words and samples shared by every learner."""

import itertools
from collections.abc import Callable, Iterable, Iterator

from pydantic import BaseModel, ConfigDict, PrivateAttr, field_validator, model_validator

from errors import LearnerError, SampleParseError

# A word is a sequence of symbol ids; () is the empty word.
Word = tuple[int, ...]


def word_key(word: Word) -> tuple[int, Word]:
    """Length-then-lexicographic order used for every tie-break."""
    return len(word), word


class Alphabet(BaseModel):
    model_config = ConfigDict(frozen=True)

    symbols: tuple[str, ...]

    _index: dict[str, int] = PrivateAttr(default_factory=dict)

    @field_validator("symbols")
    @classmethod
    def _check_symbols(cls, symbols: tuple[str, ...]) -> tuple[str, ...]:
        if not symbols:
            raise ValueError("alphabet must be nonempty")
        seen: set[str] = set()
        for name in symbols:
            if not name or any(c in name for c in ",# \t"):
                raise ValueError(f"invalid symbol name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate symbol {name!r}")
            seen.add(name)
        return symbols

    def model_post_init(self, __context) -> None:
        self._index = {name: i for i, name in enumerate(self.symbols)}

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def index(self) -> dict[str, int]:
        return self._index

    @property
    def compact(self) -> bool:
        """True when words may be written without separators."""
        return all(len(name) == 1 for name in self.symbols)

    @classmethod
    def of(cls, *names: str) -> "Alphabet":
        if len(names) == 1 and "," in names[0]:
            names = tuple(n.strip() for n in names[0].split(","))
        return cls(symbols=tuple(names))


class Sample(BaseModel):
    model_config = ConfigDict(frozen=True)

    alphabet: Alphabet
    positives: frozenset[Word] = frozenset()

    @model_validator(mode="after")
    def _check_words(self) -> "Sample":
        k = len(self.alphabet)
        for word in self.positives:
            if any(s < 0 or s >= k for s in word):
                raise ValueError(f"word {word} is not over the alphabet")
        return self

    def sorted_words(self) -> list[Word]:
        return sorted(self.positives, key=word_key)

    def require_nonempty_words(self) -> "Sample":
        """LTLf satisfaction is undefined on the empty word."""
        if () in self.positives:
            raise LearnerError("the empty word is not allowed in ltlf mode")
        return self


def format_word(word: Word, alphabet: Alphabet) -> str:
    names = [alphabet.symbols[s] for s in word]
    return "".join(names) if alphabet.compact else ",".join(names)


def parse_word(text: str, alphabet: Alphabet, line: int = 0) -> Word:
    text = text.strip()
    if not text:
        return ()
    if "," in text:
        names = [n.strip() for n in text.split(",")]
    elif alphabet.compact:
        names = list(text)
    else:
        names = [text]
    word = []
    for name in names:
        if name not in alphabet.index:
            raise SampleParseError(line, f"unknown symbol {name!r}")
        word.append(alphabet.index[name])
    return tuple(word)


def parse_alphabet(header: str, line: int = 1) -> Alphabet:
    if not header.startswith("alphabet:"):
        raise SampleParseError(line, "expected header 'alphabet: <name>(,<name>)*'")
    names = [n.strip() for n in header[len("alphabet:"):].split(",")]
    seen: set[str] = set()
    for name in names:
        if not name:
            raise SampleParseError(line, "empty symbol name")
        if name in seen:
            raise SampleParseError(line, f"duplicate symbol {name!r}")
        seen.add(name)
    try:
        return Alphabet(symbols=tuple(names))
    except ValueError as exc:
        raise SampleParseError(line, str(exc)) from exc


def parse_sample(text: str | bytes) -> Sample:
    """Read the sample file format: an alphabet header, then one word per line."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.splitlines()
    if not lines:
        raise SampleParseError(1, "missing alphabet header")
    alphabet = parse_alphabet(lines[0].strip())
    words: set[Word] = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        if raw.lstrip().startswith("#"):
            continue
        words.add(parse_word(raw, alphabet, lineno))
    return Sample(alphabet=alphabet, positives=frozenset(words))


def serialize_sample(sample: Sample) -> str:
    header = "alphabet: " + ",".join(sample.alphabet.symbols)
    words = sample.sorted_words()
    if not words:
        return header + "\n"
    body = "\n".join(format_word(w, sample.alphabet) for w in words)
    return header + "\n" + body + "\n"


def prefixes(words: Iterable[Word]) -> set[Word]:
    """Pref(P): every prefix of every word, the word itself and ε included."""
    result: set[Word] = set()
    for word in words:
        for i in range(len(word) + 1):
            result.add(word[:i])
    return result


def shortest_not_covered(words: Iterable[Word], accepts: Callable[[Word], bool]) -> Word | None:
    """Shortest (then lexicographically least) word not accepted, if any."""
    uncovered = [w for w in words if not accepts(w)]
    if not uncovered:
        return None
    return min(uncovered, key=word_key)


def all_words(num_symbols: int, max_len: int, min_len: int = 0) -> Iterator[Word]:
    """Every word with length in [min_len, max_len], in length-lex order."""
    for length in range(min_len, max_len + 1):
        yield from itertools.product(range(num_symbols), repeat=length)
