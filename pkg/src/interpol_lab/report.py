"""Verdict containers shared by the check suites."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class CheckReport:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    witness: Optional[dict] = None

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": bool(self.passed), "details": self.details}
        if self.witness is not None:
            out["witness"] = self.witness
        return out
