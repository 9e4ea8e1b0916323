"""Certified enclosures for scalar quantities.

Every approximate number produced by this package travels as a
``NormBracket`` so that downstream inequality checks can consume the bound
in the sound direction (upper bound where an upper bound is needed, lower
where a lower is needed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ArgumentError


@dataclass(frozen=True)
class NormBracket:
    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ArgumentError("bracket endpoints must be finite")
        if self.lower > self.upper + 1e-30 + 1e-12 * abs(self.upper):
            raise ArgumentError(
                f"invalid bracket: lower {self.lower} > upper {self.upper}"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def relative_width(self) -> float:
        scale = max(abs(self.lower), abs(self.upper))
        return 0.0 if scale == 0.0 else self.width / scale

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, value: float, slack: float = 0.0) -> bool:
        pad = slack * max(1.0, abs(value))
        return self.lower - pad <= value <= self.upper + pad

    def scaled(self, factor: float) -> "NormBracket":
        if factor < 0:
            raise ArgumentError("bracket scaling factor must be nonnegative")
        return NormBracket(self.lower * factor, self.upper * factor)

    def __add__(self, other: "NormBracket") -> "NormBracket":
        return NormBracket(self.lower + other.lower, self.upper + other.upper)


def exact(value: float) -> NormBracket:
    """Zero-width bracket for a quantity known in closed form."""
    return NormBracket(value, value)
