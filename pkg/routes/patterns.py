from fastapi import APIRouter, HTTPException, Query

from models import Pattern
from patterns import get_all_patterns, get_pattern_by_name, get_patterns_by_category

router = APIRouter(prefix="/patterns", tags=["patterns"])


@router.get("", response_model=list[Pattern])
def list_patterns(category: str | None = Query(None, description="Filter by category")):
    """List the bundled ground-truth patterns."""
    if category:
        return get_patterns_by_category(category)
    return get_all_patterns()


@router.get("/{name}", response_model=Pattern)
def get_pattern(name: str):
    pattern = get_pattern_by_name(name)
    if not pattern:
        raise HTTPException(status_code=404, detail="Pattern not found")
    return pattern
