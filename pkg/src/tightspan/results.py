"""Small result container shared by the sampled checks."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Verdict:
    """Outcome of a sampled check: a boolean plus the numbers behind it."""

    passed: bool
    residual: float = 0.0
    tol: float = 0.0
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.passed)

    def to_dict(self):
        out = {"passed": bool(self.passed), "residual": float(self.residual), "tol": float(self.tol)}
        out.update(self.details)
        return out
