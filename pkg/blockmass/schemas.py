"""
Output schemas shared by the CLI and the HTTP service.

Rationals travel as ``num/den`` strings; polynomials with integer
coefficients as JSON integers.
"""
from __future__ import annotations

from typing import Any, List, Optional, Union

from pydantic import BaseModel, Field

from blockmass.exactnum import RationalFunction, format_rational
from blockmass.genfun import Correlation
from blockmass.kempner import Enclosure, LimitBoundReport
from blockmass.report import Report

Coefficient = Union[int, str]


class AutocorrOut(BaseModel):
    base: int
    block: str
    coefficients: List[int]
    periods: List[int]

    @classmethod
    def build(cls, corr: Correlation) -> AutocorrOut:
        return cls(
            base=corr.block.base,
            block=str(corr.block),
            coefficients=list(corr.coefficients),
            periods=list(corr.positive_periods),
        )


class RationalFunctionOut(BaseModel):
    num: List[Coefficient]
    den: List[Coefficient]

    @classmethod
    def build(cls, r: RationalFunction) -> RationalFunctionOut:
        return cls(**r.to_json())


class RationalOut(BaseModel):
    value: str

    @classmethod
    def build(cls, q) -> RationalOut:
        return cls(value=format_rational(q))


class EnclosureOut(BaseModel):
    lower: str
    upper: str
    decimal: str
    certified_digits: int = Field(ge=0)

    @classmethod
    def build(cls, enclosure: Enclosure) -> EnclosureOut:
        return cls(**enclosure.as_dict())


class LimitBoundOut(BaseModel):
    base: int
    block: str
    k: int
    depth: int
    bound: str
    worst_gap: str
    best_gap: str
    worst_gap_float: float
    bound_float: float
    status: str = Field(pattern="^(verified|violated|undecided)$")
    sum: EnclosureOut
    limit: EnclosureOut
    leading_mass: str
    coarse_bound: Optional[str] = None
    coarse_status: Optional[str] = None
    bracket_status: Optional[str] = None
    cell_resolution: Optional[int] = None
    cells_uniform: Optional[bool] = None

    @classmethod
    def build(cls, report: LimitBoundReport) -> LimitBoundOut:
        return cls(**report.as_dict())


class CheckOut(BaseModel):
    name: str
    passed: bool
    detail: Optional[str] = None
    witness: Optional[dict[str, Any]] = None


class ReportOut(BaseModel):
    base: int
    block: str
    passed: bool
    first_failure: Optional[CheckOut] = None
    checks: List[CheckOut]
    parameters: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def build(cls, report: Report) -> ReportOut:
        data = report.as_dict()
        params = {k: v for k, v in report.subject.items() if k not in ("base", "block")}
        return cls(
            base=data["base"],
            block=data["block"],
            passed=data["passed"],
            first_failure=data["first_failure"],
            checks=data["checks"],
            parameters=params,
        )


def dump(model: BaseModel) -> dict:
    """JSON-ready dict without unset optionals."""
    return model.model_dump(exclude_none=True)
