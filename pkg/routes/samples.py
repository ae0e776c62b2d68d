from fastapi import APIRouter, HTTPException

from core import Alphabet, serialize_sample
from errors import LearnerError
from models import SampleRequest, SampleResponse
from routes import http_error
from services.sampling import sample_from_dfa, sample_from_pattern, sample_from_text

router = APIRouter(prefix="/samples", tags=["samples"])


@router.post("", response_model=SampleResponse, status_code=201)
def generate_sample(request: SampleRequest):
    """Generate a positive sample from exactly one source."""
    sources = [request.random_dfa, request.formula, request.pattern]
    if sum(s is not None for s in sources) != 1:
        raise HTTPException(
            status_code=422,
            detail="Give exactly one of random_dfa, formula, pattern",
        )

    try:
        alphabet = Alphabet(symbols=tuple(request.alphabet))
        if request.random_dfa is not None:
            sample, _ = sample_from_dfa(request.random_dfa, alphabet, request.count,
                                        request.min_len, request.max_len, request.seed)
        elif request.formula is not None:
            sample = sample_from_text(request.formula, alphabet, request.count,
                                      request.min_len, request.max_len, request.seed)
        else:
            sample = sample_from_pattern(request.pattern, request.count,
                                         request.min_len, request.max_len, request.seed)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except LearnerError as exc:
        raise http_error(exc) from exc

    return SampleResponse(
        sample=serialize_sample(sample),
        words=len(sample.positives),
        requested=request.count,
    )
