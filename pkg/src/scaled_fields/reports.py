from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of a numerical property check.

    ``passed`` compares ``max_deviation`` against ``tolerance`` unless an
    explicit verdict was supplied (used by slope-style checks).
    """

    name: str
    max_deviation: float
    tolerance: float
    samples: int = 0
    details: dict = field(default_factory=dict)
    verdict: bool | None = None

    @property
    def passed(self) -> bool:
        if self.verdict is not None:
            return self.verdict
        return math.isfinite(self.max_deviation) and self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "details": self.details,
        }
