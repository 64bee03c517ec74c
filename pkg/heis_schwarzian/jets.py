"""Truncated Taylor jets in the three coordinates x, y, t."""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import DomainError, OrderError


MultiIndex = tuple[int, int, int]
Scalar = int | float | complex

AXES = ("x", "y", "t")

# Default finite-difference steps by total derivative order.
FD_STEPS = {1: 1e-4, 2: 1e-3, 3: 4e-3}

_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
}


def jet_size(order: int) -> int:
    return (order + 1) * (order + 2) * (order + 3) // 6


@lru_cache(maxsize=None)
def multi_indices(order: int) -> tuple[MultiIndex, ...]:
    """Multi-indices of total degree <= order in graded lexicographic rank.

    The rank of an index does not depend on ``order``, so truncating a jet
    is a prefix slice of its coefficient vector.
    """
    indices: list[MultiIndex] = []
    for degree in range(order + 1):
        for a in range(degree, -1, -1):
            for b in range(degree - a, -1, -1):
                indices.append((a, b, degree - a - b))
    return tuple(indices)


@lru_cache(maxsize=None)
def _ranks(order: int) -> dict[MultiIndex, int]:
    return {alpha: rank for rank, alpha in enumerate(multi_indices(order))}


@lru_cache(maxsize=None)
def _product_table(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    indices = multi_indices(order)
    ranks = _ranks(order)
    left: list[int] = []
    right: list[int] = []
    target: list[int] = []
    for i, a in enumerate(indices):
        for j, b in enumerate(indices):
            if sum(a) + sum(b) > order:
                break
            left.append(i)
            right.append(j)
            target.append(ranks[(a[0] + b[0], a[1] + b[1], a[2] + b[2])])
    return np.array(left), np.array(right), np.array(target)


@lru_cache(maxsize=None)
def _partial_table(order: int, axis: int) -> tuple[np.ndarray, np.ndarray]:
    ranks = _ranks(order)
    source: list[int] = []
    factor: list[float] = []
    for beta in multi_indices(order - 1):
        raised = list(beta)
        raised[axis] += 1
        source.append(ranks[tuple(raised)])
        factor.append(float(raised[axis]))
    return np.array(source, dtype=int), np.array(factor)


def _is_real(value: Any) -> bool:
    return not np.iscomplexobj(value) or float(np.imag(value)) == 0.0


def scalar_function(name: str, value: Any) -> Any:
    """Evaluate an elementary function on a plain real or complex scalar."""
    complex_input = np.iscomplexobj(value) or isinstance(value, complex)
    if name == "exp":
        try:
            return cmath.exp(value) if complex_input else math.exp(value)
        except OverflowError as exc:
            raise DomainError(f"exp overflow at {value!r}") from exc
    if name == "log":
        if _is_real(value):
            if float(np.real(value)) <= 0.0:
                raise DomainError(f"log of nonpositive value {value!r}")
            return math.log(float(np.real(value)))
        return cmath.log(value)
    if name == "sqrt":
        if _is_real(value):
            if float(np.real(value)) < 0.0:
                raise DomainError(f"sqrt of negative value {value!r}")
            return math.sqrt(float(np.real(value)))
        return cmath.sqrt(value)
    if name == "sin":
        return cmath.sin(value) if complex_input else math.sin(value)
    if name == "cos":
        return cmath.cos(value) if complex_input else math.cos(value)
    if name == "conj":
        return np.conj(value) if complex_input else value
    if name == "re":
        return float(np.real(value))
    if name == "im":
        return float(np.imag(value))
    raise ValueError(f"unknown function {name!r}")


def scalar_reciprocal(value: Any) -> Any:
    if value == 0:
        raise DomainError("division by zero value")
    return 1.0 / value


class Jet:
    """Taylor coefficients ``d^alpha f(base) / alpha!`` for ``|alpha| <= order``."""

    __slots__ = ("base", "order", "coeffs")
    __array_ufunc__ = None

    def __init__(self, base: Sequence[float], order: int, coeffs: Any):
        values = np.asarray(coeffs)
        if values.dtype.kind not in "fc":
            values = values.astype(float)
        if values.shape != (jet_size(order),):
            raise ValueError(
                f"order {order} jet needs {jet_size(order)} coefficients, "
                f"got shape {values.shape}"
            )
        values.setflags(write=False)
        self.base = base
        self.order = order
        self.coeffs = values

    @classmethod
    def constant(cls, value: Scalar, base: Sequence[float], order: int) -> "Jet":
        dtype = complex if np.iscomplexobj(value) else float
        coeffs = np.zeros(jet_size(order), dtype=dtype)
        coeffs[0] = value
        return cls(base, order, coeffs)

    @classmethod
    def coordinate(cls, axis: int, base: Sequence[float], order: int) -> "Jet":
        coeffs = np.zeros(jet_size(order))
        coeffs[0] = float(base[axis])
        if order >= 1:
            coeffs[1 + axis] = 1.0
        return cls(base, order, coeffs)

    @property
    def value(self) -> Any:
        return self.coeffs[0]

    @property
    def is_complex(self) -> bool:
        return self.coeffs.dtype.kind == "c"

    def coefficient(self, alpha: MultiIndex) -> Any:
        if sum(alpha) > self.order:
            raise OrderError(
                f"multi-index {tuple(alpha)} exceeds jet order {self.order}"
            )
        return self.coeffs[_ranks(sum(alpha))[tuple(alpha)]]

    def derivative(self, alpha: MultiIndex) -> Any:
        scale = math.prod(math.factorial(k) for k in alpha)
        return self.coefficient(alpha) * scale

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderError(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.base, order, self.coeffs[: jet_size(order)])

    def partial(self, axis: int) -> "Jet":
        """Jet of the partial derivative along ``axis``; the order drops by one."""
        if self.order < 1:
            raise OrderError("cannot differentiate an order-0 jet")
        source, factor = _partial_table(self.order, axis)
        return Jet(self.base, self.order - 1, self.coeffs[source] * factor)

    def conj(self) -> "Jet":
        if not self.is_complex:
            return self
        return Jet(self.base, self.order, np.conj(self.coeffs))

    def real(self) -> "Jet":
        return Jet(self.base, self.order, np.real(self.coeffs).copy())

    def imag(self) -> "Jet":
        return Jet(self.base, self.order, np.imag(self.coeffs).copy())

    def _coerce(self, other: Any) -> "Jet | None":
        if isinstance(other, Jet):
            if tuple(other.base) != tuple(self.base):
                raise ValueError(
                    f"jets at different base points {tuple(self.base)} "
                    f"and {tuple(other.base)}"
                )
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Jet.constant(other, self.base, self.order)
        return None

    def _aligned(self, other: "Jet") -> tuple[np.ndarray, np.ndarray, int]:
        order = min(self.order, other.order)
        size = jet_size(order)
        return self.coeffs[:size], other.coeffs[:size], order

    def __add__(self, other: Any) -> "Jet":
        other_jet = self._coerce(other)
        if other_jet is None:
            return NotImplemented
        a, b, order = self._aligned(other_jet)
        return Jet(self.base, order, a + b)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Jet":
        other_jet = self._coerce(other)
        if other_jet is None:
            return NotImplemented
        a, b, order = self._aligned(other_jet)
        return Jet(self.base, order, a - b)

    def __rsub__(self, other: Any) -> "Jet":
        other_jet = self._coerce(other)
        if other_jet is None:
            return NotImplemented
        return other_jet - self

    def __neg__(self) -> "Jet":
        return Jet(self.base, self.order, -self.coeffs)

    def __mul__(self, other: Any) -> "Jet":
        if isinstance(other, (int, float, complex, np.number)):
            return Jet(self.base, self.order, self.coeffs * other)
        other_jet = self._coerce(other)
        if other_jet is None:
            return NotImplemented
        a, b, order = self._aligned(other_jet)
        left, right, target = _product_table(order)
        products = a[left] * b[right]
        size = jet_size(order)
        if np.iscomplexobj(products):
            coeffs = np.bincount(
                target, weights=products.real, minlength=size
            ) + 1j * np.bincount(target, weights=products.imag, minlength=size)
        else:
            coeffs = np.bincount(target, weights=products, minlength=size)
        return Jet(self.base, order, coeffs)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        head = self.value
        if head == 0:
            raise DomainError("division by zero value")
        series = [(-1) ** n / head ** (n + 1) for n in range(self.order + 1)]
        return self._compose(series)

    def __truediv__(self, other: Any) -> "Jet":
        if isinstance(other, (int, float, complex, np.number)):
            if other == 0:
                raise DomainError("division by zero value")
            return Jet(self.base, self.order, self.coeffs / other)
        other_jet = self._coerce(other)
        if other_jet is None:
            return NotImplemented
        return self * other_jet.reciprocal()

    def __rtruediv__(self, other: Any) -> "Jet":
        other_jet = self._coerce(other)
        if other_jet is None:
            return NotImplemented
        return other_jet * self.reciprocal()

    def __pow__(self, exponent: int) -> "Jet":
        if not isinstance(exponent, (int, np.integer)):
            return NotImplemented
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        result = Jet.constant(1.0, self.base, self.order)
        square = self
        n = int(exponent)
        while n:
            if n & 1:
                result = result * square
            n >>= 1
            if n:
                square = square * square
        return result

    def _compose(self, series: Sequence[Any]) -> "Jet":
        """Evaluate ``sum series[n] * h**n`` with ``h`` the non-constant part."""
        nilpotent = self - self.value
        result = Jet.constant(series[self.order], self.base, self.order)
        for n in range(self.order - 1, -1, -1):
            result = result * nilpotent + series[n]
        return result

    def exp(self) -> "Jet":
        head = scalar_function("exp", self.value)
        return self._compose(
            [head / math.factorial(n) for n in range(self.order + 1)]
        )

    def log(self) -> "Jet":
        head = self.value
        first = scalar_function("log", head)
        series = [first] + [
            (-1) ** (n + 1) / (n * head**n) for n in range(1, self.order + 1)
        ]
        return self._compose(series)

    def sqrt(self) -> "Jet":
        head = self.value
        if _is_real(head) and float(np.real(head)) <= 0.0:
            raise DomainError(f"sqrt of nonpositive value {head!r}")
        root = scalar_function("sqrt", head)
        series = []
        binomial = 1.0
        for n in range(self.order + 1):
            series.append(root * binomial / head**n)
            binomial *= (0.5 - n) / (n + 1)
        return self._compose(series)

    def sin(self) -> "Jet":
        s = scalar_function("sin", self.value)
        c = scalar_function("cos", self.value)
        cycle = (s, c, -s, -c)
        return self._compose(
            [cycle[n % 4] / math.factorial(n) for n in range(self.order + 1)]
        )

    def cos(self) -> "Jet":
        s = scalar_function("sin", self.value)
        c = scalar_function("cos", self.value)
        cycle = (c, -s, -c, s)
        return self._compose(
            [cycle[n % 4] / math.factorial(n) for n in range(self.order + 1)]
        )

    def __repr__(self) -> str:
        return f"Jet(base={tuple(self.base)}, order={self.order}, value={self.value!r})"


@lru_cache(maxsize=4096)
def _seed(base: tuple[float, float, float], order: int) -> tuple[Jet, Jet, Jet]:
    return tuple(Jet.coordinate(axis, base, order) for axis in range(3))  # type: ignore[return-value]


def jet_seed(p: Sequence[float], order: int) -> tuple[Jet, Jet, Jet]:
    """Coordinate jets of x, y, t at ``p``."""
    if order < 0:
        raise ValueError(f"jet order must be >= 0, got {order}")
    return _seed(tuple(float(c) for c in p), int(order))


def jet_eval(e: Any, p: Sequence[float], order: int) -> Jet:
    """Jet of an expression at ``p``; ``e`` only needs an ``evaluate`` method."""
    x, y, t = jet_seed(p, order)
    result = e.evaluate({"x": x, "y": y, "t": t})
    if isinstance(result, Jet):
        return result
    return Jet.constant(result, x.base, order)


def jet_partial(jet: Jet, alpha: MultiIndex) -> Any:
    return jet.derivative(alpha)


def _stencil_value(
    e: Any,
    p: Sequence[float],
    alpha: MultiIndex,
    h: float,
) -> Any:
    total = 0.0
    offsets = [_STENCILS[k] for k in alpha]
    for ox, wx in zip(*offsets[0]):
        for oy, wy in zip(*offsets[1]):
            for ot, wt in zip(*offsets[2]):
                env: Mapping[str, float] = {
                    "x": float(p[0]) + ox * h,
                    "y": float(p[1]) + oy * h,
                    "t": float(p[2]) + ot * h,
                }
                total = total + wx * wy * wt * e.evaluate(env)
    return total / h ** sum(alpha)


def fd_oracle(
    e: Any,
    p: Sequence[float],
    alpha: MultiIndex,
    h: float | None = None,
    richardson: bool = True,
) -> Any:
    """Central finite-difference estimate of a partial derivative of ``e``."""
    if any(k < 0 or k > 3 for k in alpha) or sum(alpha) > 3:
        raise OrderError(f"no central stencil for multi-index {tuple(alpha)}")
    if sum(alpha) == 0:
        return e.evaluate({"x": float(p[0]), "y": float(p[1]), "t": float(p[2])})
    step = FD_STEPS[sum(alpha)] if h is None else float(h)
    if step <= 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    coarse = _stencil_value(e, p, alpha, step)
    if not richardson:
        return coarse
    fine = _stencil_value(e, p, alpha, step / 2)
    return (4 * fine - coarse) / 3
