"""
Generating-function Routes
"""
from fastapi import APIRouter, Depends, Query

from blockmass.exactnum import format_rational, series_coefficients
from blockmass.genfun import autocorrelation, gf_k, gf_loop, gf_v0
from blockmass.schemas import AutocorrOut, RationalFunctionOut
from blockmass.words import Block

from api.dependencies import block_param

router = APIRouter(prefix="/api", tags=["Generating functions"])


@router.get("/autocorr", response_model=AutocorrOut)
def get_autocorrelation(w: Block = Depends(block_param)):
    """
    Autocorrelation polynomial A_w and the positive periods of w
    """
    return AutocorrOut.build(autocorrelation(w))


@router.get("/genfun", response_model=RationalFunctionOut)
def get_generating_function(
    w: Block = Depends(block_param),
    k: int = Query(0, ge=0),
    series: str = Query("k", pattern="^(k|v0|loop)$"),
):
    """
    Z_w(k), Z_w(v,0) or t^(2-p)·Z_w(v,0,u) in canonical form
    """
    if series == "v0":
        r = gf_v0(w)
    elif series == "loop":
        r = gf_loop(w)
    else:
        r = gf_k(w, k)
    return RationalFunctionOut.build(r)


@router.get("/coeffs")
def get_coefficients(
    w: Block = Depends(block_param),
    k: int = Query(0, ge=0),
    maxlen: int = Query(..., ge=0, le=4096),
):
    """
    N_w(k, l) for l = 0..maxlen
    """
    coefficients = series_coefficients(gf_k(w, k), maxlen)
    return {
        "base": w.base,
        "block": str(w),
        "k": k,
        "coefficients": [int(c) if c.denominator == 1 else format_rational(c) for c in coefficients],
    }
