"""
Mass and Measure Routes
"""
from typing import Optional

from fastapi import APIRouter, Depends, Query, Request
from fastapi.responses import StreamingResponse

from blockmass.automaton import prefix_mass
from blockmass.genfun import mass
from blockmass.kempner import BimalInterval, measure_histogram, measure_interval
from blockmass.schemas import RationalOut
from blockmass.words import Block, DigitString

from api.dependencies import block_param, limiter, settings

router = APIRouter(prefix="/api", tags=["Measures"])


@router.get("/mass", response_model=RationalOut)
def get_mass(
    w: Block = Depends(block_param),
    k: int = Query(..., ge=0),
    prefix: Optional[str] = Query(None),
):
    """
    M_w(k), or the mass of the k-admissible strings starting with ``prefix``
    """
    if prefix is not None:
        return RationalOut.build(prefix_mass(w, DigitString.parse(prefix, w.base), k))
    return RationalOut.build(mass(w, k))


@router.get("/measure", response_model=RationalOut)
def get_measure(
    w: Block = Depends(block_param),
    k: int = Query(..., ge=0),
    start: str = Query(..., alias="from"),
    end: str = Query(..., alias="to"),
):
    """
    mu_k([from, to)) for b-imal endpoints
    """
    interval = BimalInterval.parse(start, end, w.base)
    return RationalOut.build(measure_interval(w, k, interval))


@router.get("/histogram")
@limiter.limit(settings.heavy_rate_limit)
def get_histogram(
    request: Request,
    w: Block = Depends(block_param),
    k: int = Query(..., ge=0),
    resolution: int = Query(..., ge=0),
):
    """
    mu_k of every cell at the given resolution, as a CSV download
    """
    hist = measure_histogram(w, k, resolution)
    filename = f"histogram_b{w.base}_k{k}_l{resolution}.csv"
    return StreamingResponse(
        iter([hist.to_csv()]),
        media_type="text/csv",
        headers={"Content-Disposition": f"attachment; filename={filename}"}
    )
