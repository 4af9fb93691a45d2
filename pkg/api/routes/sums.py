"""
Harmonic Sum Routes
"""
from typing import Optional

from fastapi import APIRouter, Depends, Query, Request

from blockmass.kempner import check_limit_bound, enclose_sum, log_base_enclosure, partial_sum
from blockmass.schemas import EnclosureOut, LimitBoundOut, RationalOut
from blockmass.words import Block

from api.dependencies import block_param, limiter, settings

router = APIRouter(prefix="/api", tags=["Sums"])


@router.get("/partial", response_model=RationalOut)
@limiter.limit(settings.heavy_rate_limit)
def get_partial_sum(
    request: Request,
    w: Block = Depends(block_param),
    k: int = Query(..., ge=0),
    maxlen: int = Query(..., ge=0),
):
    return RationalOut.build(partial_sum(w, k, maxlen))


@router.get("/sum", response_model=EnclosureOut)
@limiter.limit(settings.heavy_rate_limit)
def get_sum(
    request: Request,
    w: Block = Depends(block_param),
    k: int = Query(..., ge=0),
    depth: int = Query(..., ge=1),
    precision: Optional[int] = Query(None, ge=8, le=4096),
):
    """
    Certified enclosure of S_w(k)
    """
    return EnclosureOut.build(enclose_sum(w, k, depth, precision=precision))


@router.get("/logb", response_model=EnclosureOut)
def get_log_base(
    base: int = Query(..., ge=2),
    precision: Optional[int] = Query(None, ge=8, le=4096),
):
    """
    Certified enclosure of log(b)
    """
    return EnclosureOut.build(log_base_enclosure(base, precision))


@router.get("/limit", response_model=LimitBoundOut, response_model_exclude_none=True)
@limiter.limit(settings.heavy_rate_limit)
def get_limit_bound(
    request: Request,
    w: Block = Depends(block_param),
    k: int = Query(..., ge=1),
    depth: Optional[int] = Query(None, ge=1),
    precision: Optional[int] = Query(None, ge=8, le=4096),
):
    """
    Certified gap between S_w(k) and b^p·log(b), against the limit bound
    """
    return LimitBoundOut.build(check_limit_bound(w, k, depth, precision=precision))
