"""Structured pass/fail records shared by parameter validation and the verifier.

A report is a list of per-check records.  The JSON field names are part of
the stable output contract: check, paper_ref, pass, witness, millis.  The
pass flag is three-valued: True, False, or None for a check that was
skipped (e.g. because the constraint check it depends on already failed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

__all__ = ["CheckResult", "VerificationReport"]


@dataclass
class CheckResult:
    check: str
    paper_ref: str
    passed: Optional[bool]
    witness: Any = None
    millis: int = 0

    def to_json_obj(self) -> dict:
        return {
            "check": self.check,
            "paper_ref": self.paper_ref,
            "pass": self.passed,
            "witness": self.witness,
            "millis": self.millis,
        }

    def status_word(self) -> str:
        if self.passed is True:
            return "PASS"
        if self.passed is False:
            return "FAIL"
        return "SKIP"


@dataclass
class VerificationReport:
    results: list[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> None:
        self.results.append(result)

    @property
    def passed(self) -> bool:
        """The suite passes iff no check failed (skips do not fail a suite,
        but the failure that caused them does)."""
        return all(r.passed is not False for r in self.results)

    def result(self, check: str) -> CheckResult:
        for r in self.results:
            if r.check == check:
                return r
        raise KeyError(check)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.passed is False]

    def to_json_obj(self) -> dict:
        return {
            "pass": self.passed,
            "checks": [r.to_json_obj() for r in self.results],
        }

    def to_text(self) -> str:
        lines = []
        width = max((len(r.check) for r in self.results), default=0)
        for r in self.results:
            line = f"{r.status_word():<4}  {r.check:<{width}}  [{r.millis} ms]  {r.paper_ref}"
            if r.passed is False and r.witness is not None:
                line += f"\n      witness: {r.witness}"
            if r.passed is None and r.witness is not None:
                line += f"  ({r.witness})"
            lines.append(line)
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)
