import logging

from fastapi import APIRouter

from core import parse_sample
from dfa import emit_dot
from errors import LearnerError
from ltlf import formula_dot, print_formula
from models import LearnConfig, LearnRequest, LearnResponse
from routes import http_error
from services.dfalearn import learn_dfa
from services.ltlflearn import learn_ltlf

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/learn", tags=["learn"])


@router.post("", response_model=LearnResponse)
def learn(request: LearnRequest):
    """Learn a model from sample text.

    A run that exhausts its timeout still answers 200 with the best-so-far
    model and ``stats.termination == "timeout"``.
    """
    config = LearnConfig(
        algorithm=request.algorithm,
        size_bound=request.size_bound,
        horizon=request.horizon,
        total_timeout=request.timeout,
        seed=request.seed,
        dump_dir=None,
    )
    try:
        sample = parse_sample(request.sample)
        if request.mode == "dfa":
            dfa, stats = learn_dfa(sample, config)
            model, dot = dfa.model_dump_json(), emit_dot(dfa)
        else:
            phi, stats = learn_ltlf(sample, config)
            model, dot = print_formula(phi), formula_dot(phi)
    except LearnerError as exc:
        logger.info("learn request rejected: %s", exc)
        raise http_error(exc) from exc

    return LearnResponse(mode=request.mode, model=model, dot=dot, stats=stats)
