"""
Verification Routes
"""
from typing import Optional

from fastapi import APIRouter, Depends, Query, Request

from blockmass.schemas import ReportOut
from blockmass.verify import run_acceptance
from blockmass.words import Block

from api.dependencies import block_param, limiter, settings

router = APIRouter(prefix="/api", tags=["Verification"])


@router.get("/verify", response_model=ReportOut, response_model_exclude_none=True)
@limiter.limit(settings.heavy_rate_limit)
def get_verification(
    request: Request,
    w: Block = Depends(block_param),
    kmax: int = Query(4, ge=0, le=8),
    maxlen: int = Query(8, ge=0),
    depth: int = Query(12, ge=1),
    mutation: Optional[int] = Query(None, ge=1),
):
    """
    Full acceptance run; a failed run is still a 200 with ``passed = false``
    """
    report = run_acceptance(w, kmax=kmax, maxlen=maxlen, depth=depth, mutation=mutation)
    return ReportOut.build(report)
