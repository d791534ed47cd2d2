"""Closed intervals used for radial ranges and angular windows."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import INV_SQRT2


@dataclass(frozen=True)
class IntervalSpec:
    """A closed interval [a, b] with a <= b.

    Radial intervals live inside [-1/sqrt2, 1/sqrt2]; angular windows inside
    [0, 2*pi).  ``validate_radial``/``validate_angular`` enforce the ranges.
    """

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if self.a > self.b:
            raise ValueError(f"interval endpoints out of order: [{self.a}, {self.b}]")

    def __getitem__(self, i: int) -> float:
        return (self.a, self.b)[i]

    def __iter__(self):
        return iter((self.a, self.b))

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, v) -> bool:
        return (v >= self.a) & (v <= self.b)

    def validate_radial(self) -> "IntervalSpec":
        if self.a < -INV_SQRT2 - 1e-12 or self.b > INV_SQRT2 + 1e-12:
            raise ValueError(f"radial interval [{self.a}, {self.b}] exceeds [-1/sqrt2, 1/sqrt2]")
        return self

    def validate_angular(self) -> "IntervalSpec":
        if self.a < 0.0 or self.b > 2.0 * math.pi or self.length > 2.0 * math.pi:
            raise ValueError(f"angular window [{self.a}, {self.b}] exceeds [0, 2*pi)")
        return self


FULL_RADIAL = IntervalSpec(-INV_SQRT2, INV_SQRT2)
