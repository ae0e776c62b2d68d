from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field

from config import settings

Algorithm = Literal["sym", "ceg", "ssym"]
Mode = Literal["dfa", "ltlf"]
Termination = Literal["minimal", "size-exhausted", "timeout"]
Verdict = Literal["pass", "fail", "skipped"]

DEFAULT_OPERATORS = ("!", "|", "&", "->", "X", "U", "F", "G")


# --- Learning runs ---

class LearnConfig(BaseModel):
    """Per-run options; unset fields fall back to the process settings."""
    algorithm: Algorithm = "sym"
    size_bound: int = Field(default_factory=lambda: settings.size_bound, ge=1)
    horizon: int = Field(default_factory=lambda: settings.horizon, ge=1)
    solver: str = Field(default_factory=lambda: settings.solver)
    solver_path: str | None = Field(default_factory=lambda: settings.solver_path)
    seed: int | None = None
    solver_timeout: float | None = Field(default_factory=lambda: settings.solver_timeout)
    total_timeout: float | None = Field(default_factory=lambda: settings.total_timeout)
    max_iterations: int = Field(default_factory=lambda: settings.max_iterations, ge=1)
    debug: bool = Field(default_factory=lambda: settings.debug)
    dump_dir: Path | None = Field(default_factory=lambda: settings.dump_dir)
    incremental: bool = True
    sample_subset: bool = True
    operators: tuple[str, ...] = DEFAULT_OPERATORS


class IterationRecord(BaseModel):
    iteration: int = Field(..., ge=1)
    size: int = Field(..., ge=1)
    status: Literal["sat", "unsat", "timeout"]
    event: Literal[
        "update", "positive", "negative", "discarded", "grow", "done", "timeout"
    ]
    elapsed: float = Field(..., ge=0)


class RunStats(BaseModel):
    algorithm: str
    iterations: int = 0
    solver_calls: int = 0
    counterexamples: int = 0
    hypothesis_updates: int = 0
    iteration_times: list[float] = []
    wall_time: float = Field(default=0.0, ge=0)
    model_size: int = 0
    termination: Termination = "minimal"
    history: list[IterationRecord] = []


# --- Oracle ---

class OracleVerdict(BaseModel):
    is_description: bool
    verdict: Verdict
    detail: str = ""
    witness: str | None = None


# --- Patterns ---

class Pattern(BaseModel):
    name: str
    category: Literal["absence", "existence", "universality", "disjunction"]
    formula: str
    alphabet: list[str] = Field(..., min_length=1)


# --- Benchmarks ---

class RandomDfaGrid(BaseModel):
    sizes: list[int] = Field(..., min_length=1)
    per_size: int = Field(default=1, ge=1)
    alphabet: list[str] = ["a", "b"]


class BenchInstance(BaseModel):
    id: str
    mode: Mode = "dfa"
    sample: Path | None = None
    random_dfa: int | None = Field(default=None, ge=1)
    formula: str | None = None
    pattern: str | None = None
    alphabet: list[str] = ["a", "b"]
    count: int = Field(default=100, ge=1)
    min_len: int = Field(default=1, ge=0)
    max_len: int = Field(default=10, ge=0)
    seed: int = 0


class BenchManifest(BaseModel):
    mode: Mode = "dfa"
    algorithms: list[Algorithm] = Field(..., min_length=1)
    size_bound: int = Field(default=4, ge=1)
    horizon: int = Field(default=8, ge=1)
    timeout: float | None = None
    seed: int = 0
    count: int = Field(default=100, ge=1)
    min_len: int = Field(default=1, ge=0)
    max_len: int = Field(default=10, ge=0)
    oracle_max_size: int = Field(default=0, ge=0)
    instances: list[BenchInstance] = []
    random_dfas: RandomDfaGrid | None = None


class BenchRow(BaseModel):
    instance: str
    algorithm: str
    model_size: int
    iterations: int
    solver_calls: int
    wall_time: float = Field(..., ge=0)
    counterexamples: int
    termination: Termination
    verdict: Verdict


# --- HTTP API ---

class LearnRequest(BaseModel):
    sample: str = Field(..., min_length=1)
    mode: Mode = "dfa"
    algorithm: Algorithm = "sym"
    size_bound: int = Field(default=3, ge=1, le=10)
    horizon: int = Field(default=8, ge=1)
    timeout: float | None = Field(default=None, gt=0)
    seed: int | None = None


class LearnResponse(BaseModel):
    mode: Mode
    model: str
    dot: str
    stats: RunStats


class SampleRequest(BaseModel):
    random_dfa: int | None = Field(default=None, ge=1, le=20)
    formula: str | None = None
    pattern: str | None = None
    alphabet: list[str] = ["a", "b"]
    count: int = Field(default=20, ge=1, le=5000)
    min_len: int = Field(default=1, ge=0)
    max_len: int = Field(default=10, ge=0, le=200)
    seed: int = 0


class SampleResponse(BaseModel):
    sample: str
    words: int
    requested: int


class CheckRequest(BaseModel):
    mode: Mode = "dfa"
    model: str = Field(..., min_length=1)
    sample: str = Field(..., min_length=1)
    size_bound: int | None = Field(default=None, ge=1)
    oracle_max_size: int = Field(default_factory=lambda: settings.oracle_max_size, ge=0)
