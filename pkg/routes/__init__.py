from fastapi import HTTPException

from errors import LearnerError, SolverError


def http_error(exc: LearnerError) -> HTTPException:
    """Solver failures are server errors; everything else is bad input."""
    status = 500 if isinstance(exc, SolverError) else 422
    return HTTPException(status_code=status, detail=str(exc))
