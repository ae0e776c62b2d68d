"""Exception hierarchy shared by the library, the CLI and the HTTP routes."""


class LearnerError(Exception):
    """Base class for every error raised by this package."""


class SampleParseError(LearnerError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class FormulaParseError(LearnerError):
    pass


class AlphabetMismatchError(LearnerError):
    pass


class SolverError(LearnerError):
    """The solver failed; this is never a verdict about the formula."""


class SamplingError(LearnerError):
    pass


class ManifestError(LearnerError):
    pass


class InvariantViolation(LearnerError):
    """A per-iteration audit failed (debug mode)."""


class IterationLimitExceeded(LearnerError):
    pass
