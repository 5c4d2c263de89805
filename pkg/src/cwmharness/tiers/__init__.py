"""Shared report type for the four verification tiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


@dataclass
class TierReport:
    """Named binary checks plus a score in [0, 1] for one tier."""

    tier: str  # static | dynamics | scenarios | information
    checks: list[tuple[str, bool]]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for _, ok in self.checks if ok)

    @property
    def total(self) -> int:
        return len(self.checks)

    def score_fraction(self) -> Fraction:
        if not self.checks:
            return Fraction(0)
        return Fraction(self.passed, self.total)

    @property
    def score(self) -> float:
        return float(self.score_fraction())

    def check_vector(self) -> list[bool]:
        return [ok for _, ok in self.checks]

    def to_dict(self) -> dict:
        return {
            "tier": self.tier,
            "checks": [{"name": name, "passed": ok} for name, ok in self.checks],
            "score": self.score,
            "passed": self.passed,
            "total": self.total,
            "diagnostics": list(self.diagnostics),
        }
