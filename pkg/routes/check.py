from fastapi import APIRouter, HTTPException

from core import parse_sample
from dfa import Dfa, parse_dot
from errors import LearnerError
from ltlf import parse_formula
from models import CheckRequest, OracleVerdict
from routes import http_error
from services.oracle import check_dfa, check_formula

router = APIRouter(prefix="/check", tags=["check"])


@router.post("", response_model=OracleVerdict)
def check_model(request: CheckRequest):
    """n-description status and oracle verdict; n defaults to the model's own size."""
    try:
        sample = parse_sample(request.sample)
        if request.mode == "dfa":
            text = request.model.strip()
            try:
                dfa = Dfa.model_validate_json(text) if text.startswith("{") else parse_dot(text)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=f"cannot read model: {exc}") from exc
            return check_dfa(dfa, sample, request.size_bound or dfa.num_states,
                             request.oracle_max_size)
        phi = parse_formula(request.model, sample.alphabet)
        return check_formula(phi, sample, request.size_bound or phi.size, request.oracle_max_size)
    except LearnerError as exc:
        raise http_error(exc) from exc
