"""Ground-truth LTLf patterns loaded from YAML."""

import yaml
from pathlib import Path

from core import Alphabet
from ltlf import LtlfFormula, parse_formula
from models import Pattern


def _load_patterns() -> list[Pattern]:
    """Load patterns from YAML file."""
    yaml_path = Path(__file__).parent / "patterns.yaml"
    with open(yaml_path) as f:
        data = yaml.safe_load(f)
    return [Pattern(**p) for p in data["patterns"]]


PATTERNS: list[Pattern] = _load_patterns()


def get_all_patterns() -> list[Pattern]:
    return PATTERNS


def get_pattern_by_name(name: str) -> Pattern | None:
    for pattern in PATTERNS:
        if pattern.name == name:
            return pattern
    return None


def get_patterns_by_category(category: str) -> list[Pattern]:
    return [p for p in PATTERNS if p.category == category]


def compile_pattern(pattern: Pattern) -> LtlfFormula:
    return parse_formula(pattern.formula, Alphabet(symbols=tuple(pattern.alphabet)))
