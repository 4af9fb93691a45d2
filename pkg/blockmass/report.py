"""
Check results shared by the identity battery and the acceptance run.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import structlog

logger = structlog.get_logger()


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    witness: dict[str, Any] | None = None

    def as_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    """Ordered list of checks; order is the order they were added."""

    subject: dict[str, Any]
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> CheckResult:
        if not result.passed:
            logger.warning("battery_item_failed", check=result.name, witness=result.witness, **self.subject)
        self.checks.append(result)
        return result

    def extend(self, other: Report) -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> CheckResult | None:
        return next((c for c in self.checks if not c.passed), None)

    def as_dict(self) -> dict:
        failure = self.first_failure
        return {
            **self.subject,
            "passed": self.passed,
            "first_failure": failure.as_dict() if failure else None,
            "checks": [c.as_dict() for c in self.checks],
        }
