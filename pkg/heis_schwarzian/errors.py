"""Exception hierarchy shared by the engine, the suites and the CLI."""

from __future__ import annotations

from typing import Any


class HeisError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HeisError, ValueError):
    """A partial function was evaluated outside its domain."""


class EvalError(DomainError):
    """A map is singular at the requested point."""


class OrderError(HeisError):
    """A derivative was requested beyond the available jet order."""


class SingularError(HeisError):
    """A quotient by ZF (or another vanishing quantity) was required."""


class NotContact(HeisError):
    """The contact equations fail at the point."""


class NotPositive(HeisError):
    """The horizontal Jacobian is not positive at the point."""


class NotHarmonic(HeisError):
    """A potential that must be harmonic is not."""


class BadPotential(HeisError):
    """A flow potential depends on more than x."""


class NotPolynomial(HeisError, TypeError):
    """An expression cannot be represented exactly as a polynomial."""


class MapSpecError(HeisError, ValueError):
    """A map, point or grid specification could not be parsed."""

    def __init__(self, message: str, token: str = ""):
        super().__init__(message)
        self.token = token


class NoConsistentConstant(HeisError):
    """No single constant fits an identity over its oracle family."""

    def __init__(self, identity: str, witnesses: list[Any]):
        super().__init__(f"no single constant fits {identity}")
        self.identity = identity
        self.witnesses = witnesses
