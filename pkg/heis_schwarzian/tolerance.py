"""Numeric tolerance policy."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-8
    abs: float = 1e-10

    def bound(self, scale: float = 0.0) -> float:
        return self.abs + self.rel * abs(scale)

    def close(self, a: complex, b: complex, scale: float | None = None) -> bool:
        magnitude = max(abs(a), abs(b)) if scale is None else scale
        return abs(a - b) <= self.bound(magnitude)

    def small(self, value: complex, scale: float = 0.0) -> bool:
        return abs(value) <= self.bound(scale)


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class Residual:
    """Signed residual of an identity with the magnitude of its terms."""

    value: complex
    scale: float = 0.0

    def __abs__(self) -> float:
        return abs(self.value)

    def __complex__(self) -> complex:
        return complex(self.value)

    def ok(self, tolerance: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return tolerance.small(self.value, self.scale)
