"""Check reports: per-condition verdicts with symbolic counterexample witnesses.

A witness records where a condition failed (which basis tuple) and the
nonzero symbolic value found there; failed reports always carry at least one
witness, and every witness re-evaluates to a nonzero value by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class PreconditionError(ValueError):
    """A checker was invoked on input violating its stated precondition."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass
class Witness:
    where: str
    value: object  # PolyScalar / tensor / section; anything with is_zero and str

    def value_str(self) -> str:
        return str(self.value)

    def to_dict(self) -> dict:
        return {"where": self.where, "value": self.value_str()}


@dataclass
class ConditionResult:
    cond_id: str
    description: str
    passed: bool
    witnesses: list[Witness] = field(default_factory=list)
    informational: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.cond_id,
            "description": self.description,
            "verdict": "pass" if self.passed else "fail",
            "informational": self.informational,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


@dataclass
class CheckReport:
    title: str
    conditions: list[ConditionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions if not c.informational)

    def condition(self, cond_id: str) -> ConditionResult:
        for c in self.conditions:
            if c.cond_id == cond_id:
                return c
        raise KeyError(f"no condition {cond_id!r} in report {self.title!r}")

    def failed_ids(self) -> list[str]:
        return [c.cond_id for c in self.conditions
                if not c.passed and not c.informational]

    def witnesses(self) -> list[Witness]:
        return [w for c in self.conditions for w in c.witnesses]

    def extend(self, other: "CheckReport") -> "CheckReport":
        self.conditions.extend(other.conditions)
        return self

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "verdict": "pass" if self.passed else "fail",
            "conditions": [c.to_dict() for c in self.conditions],
        }


class ConditionBuilder:
    """Accumulates witnesses for one named condition."""

    def __init__(self, result: ConditionResult):
        self._result = result

    def require_zero(self, value, where: str) -> "ConditionBuilder":
        if not value.is_zero():
            self._result.passed = False
            self._result.witnesses.append(Witness(where, value))
        return self

    def require(self, ok: bool, where: str, value) -> "ConditionBuilder":
        if not ok:
            self._result.passed = False
            self._result.witnesses.append(Witness(where, value))
        return self

    def fail(self, where: str, value) -> "ConditionBuilder":
        self._result.passed = False
        self._result.witnesses.append(Witness(where, value))
        return self


class ReportBuilder:
    def __init__(self, title: str):
        self._report = CheckReport(title)

    def cond(self, cond_id: str, description: str,
             informational: bool = False) -> ConditionBuilder:
        result = ConditionResult(cond_id, description, True, [], informational)
        self._report.conditions.append(result)
        return ConditionBuilder(result)

    def merge(self, other: CheckReport) -> "ReportBuilder":
        self._report.conditions.extend(other.conditions)
        return self

    def report(self) -> CheckReport:
        return self._report
