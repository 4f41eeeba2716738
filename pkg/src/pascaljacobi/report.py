"""Lightweight pass/fail reporting shared by the verification suites."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class Check:
    """Outcome of a single named identity check.

    ``defect`` is the largest absolute deviation found (exact rational for
    bit-exact checks, float otherwise) and ``witness`` locates it.
    """

    name: str
    n: Optional[int]
    passed: bool
    defect: Any = 0
    witness: Optional[tuple] = None

    def describe(self) -> str:
        status = "pass" if self.passed else "FAIL"
        dim = "" if self.n is None else f" [N={self.n}]"
        msg = f"{status}: {self.name}{dim}"
        if not self.passed:
            msg += f" (defect={self.defect}, witness={self.witness})"
        return msg


@dataclass
class IdentityReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    def extend(self, other: "IdentityReport") -> None:
        self.checks.extend(other.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list:
        return [c.describe() for c in self.checks]
