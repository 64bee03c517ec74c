"""Exact polynomials over the Gaussian rationals and the operator identities they certify."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

import sympy
from sympy.polys.polyerrors import CoercionFailed, PolynomialError

from .errors import NoConsistentConstant, NotPolynomial
from .expr import SYMBOLS, Expr, from_sympy, parse_expr


logger = logging.getLogger(__name__)

GENS = (SYMBOLS["x"], SYMBOLS["y"], SYMBOLS["t"])
QQ = sympy.QQ

Monomial = tuple[int, int, int]
Word = tuple[str, ...]


def _rational(value: Any) -> sympy.Rational:
    if isinstance(value, bool):
        raise NotPolynomial(f"not a coefficient: {value!r}")
    if isinstance(value, float):
        return sympy.Rational(repr(value))
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    number = sympy.sympify(value)
    if not number.is_Rational:
        raise NotPolynomial(f"coefficient {value!r} is not rational")
    return number


def gaussian(value: Any) -> tuple[sympy.Rational, sympy.Rational]:
    """Split a scalar into exact real and imaginary rationals."""
    if isinstance(value, complex):
        return _rational(value.real), _rational(value.imag)
    if isinstance(value, (int, float, Fraction)):
        return _rational(value), sympy.Integer(0)
    real, imag = sympy.sympify(value).as_real_imag()
    return _rational(real), _rational(imag)


def _poly(terms: Mapping[Monomial, Any] | None = None) -> sympy.Poly:
    if not terms:
        return sympy.Poly(0, *GENS, domain=QQ)
    return sympy.Poly.from_dict(dict(terms), *GENS, domain=QQ)


def _eval_poly(poly: sympy.Poly, p: Sequence[float]) -> float:
    x, y, t = (float(c) for c in p)
    return math.fsum(
        float(c) * x**i * y**j * t**k for (i, j, k), c in poly.as_dict().items()
    )


@dataclass(frozen=True)
class RatPoly:
    """re + i*im with re, im in QQ[x, y, t]."""

    re: sympy.Poly = field(default_factory=_poly)
    im: sympy.Poly = field(default_factory=_poly)

    @classmethod
    def from_terms(cls, terms: Mapping[Monomial, Any]) -> "RatPoly":
        real: dict[Monomial, sympy.Rational] = {}
        imag: dict[Monomial, sympy.Rational] = {}
        for monomial, value in terms.items():
            a, b = gaussian(value)
            if a:
                real[tuple(monomial)] = a
            if b:
                imag[tuple(monomial)] = b
        return cls(_poly(real), _poly(imag))

    @classmethod
    def monomial(cls, exponents: Monomial, coefficient: Any = 1) -> "RatPoly":
        return cls.from_terms({tuple(exponents): coefficient})

    @classmethod
    def constant(cls, value: Any) -> "RatPoly":
        return cls.monomial((0, 0, 0), value)

    @classmethod
    def coordinate(cls, name: str) -> "RatPoly":
        index = ("x", "y", "t").index(name)
        exponents = [0, 0, 0]
        exponents[index] = 1
        return cls.monomial(tuple(exponents))  # type: ignore[arg-type]

    @classmethod
    def from_expr(cls, e: Expr | sympy.Expr | str) -> "RatPoly":
        """Exact polynomial of an expression; NotPolynomial otherwise."""
        if isinstance(e, Expr):
            source = e.to_sympy()
        elif isinstance(e, str):
            source = parse_expr(e).to_sympy()
        else:
            source = sympy.sympify(e)
        try:
            real, imag = sympy.expand(source).as_real_imag()
            return cls(
                sympy.Poly(sympy.expand(real), *GENS, domain=QQ),
                sympy.Poly(sympy.expand(imag), *GENS, domain=QQ),
            )
        except (PolynomialError, CoercionFailed) as exc:
            raise NotPolynomial(f"{source} is not a polynomial in x, y, t") from exc

    def terms(self) -> dict[Monomial, sympy.Expr]:
        real = self.re.as_dict()
        imag = self.im.as_dict()
        keys = set(real) | set(imag)
        result = {}
        for key in keys:
            value = real.get(key, 0) + sympy.I * imag.get(key, 0)
            if value != 0:
                result[key] = value
        return result

    def coefficient_vector(self, keys: Sequence[tuple[str, Monomial]]) -> list[Any]:
        real = self.re.as_dict()
        imag = self.im.as_dict()
        return [
            (real if part == "re" else imag).get(monomial, sympy.Integer(0))
            for part, monomial in keys
        ]

    def support(self) -> set[tuple[str, Monomial]]:
        return {("re", m) for m in self.re.as_dict()} | {
            ("im", m) for m in self.im.as_dict()
        }

    @property
    def is_zero(self) -> bool:
        return self.re.is_zero and self.im.is_zero

    @property
    def is_real(self) -> bool:
        return self.im.is_zero

    def weighted_degree(self) -> int:
        """Degree with x, y of weight 1 and t of weight 2; -1 for zero."""
        degrees = [i + j + 2 * k for (i, j, k) in self.terms()]
        return max(degrees, default=-1)

    def degree_in(self, name: str) -> int:
        index = ("x", "y", "t").index(name)
        return max((m[index] for m in self.terms()), default=-1)

    def __add__(self, other: Any) -> "RatPoly":
        other = _coerce(other)
        return RatPoly(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "RatPoly":
        other = _coerce(other)
        return RatPoly(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: Any) -> "RatPoly":
        return _coerce(other) - self

    def __neg__(self) -> "RatPoly":
        return RatPoly(-self.re, -self.im)

    def __mul__(self, other: Any) -> "RatPoly":
        if not isinstance(other, RatPoly):
            a, b = gaussian(other)
            return RatPoly(
                self.re.mul_ground(a) - self.im.mul_ground(b),
                self.re.mul_ground(b) + self.im.mul_ground(a),
            )
        return RatPoly(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RatPoly":
        if exponent < 0:
            raise NotPolynomial("negative powers leave the polynomial ring")
        result = RatPoly.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def conj(self) -> "RatPoly":
        return RatPoly(self.re, -self.im)

    def real_part(self) -> "RatPoly":
        return RatPoly(self.re, _poly())

    def imag_part(self) -> "RatPoly":
        return RatPoly(self.im, _poly())

    def partial(self, name: str) -> "RatPoly":
        symbol = SYMBOLS[name]
        return RatPoly(self.re.diff(symbol), self.im.diff(symbol))

    def derive(self, op: str) -> "RatPoly":
        """Apply one of X, Y, T, Z, Zbar exactly."""
        if op == "T":
            return self.partial("t")
        dt = self.partial("t")
        x_part = self.partial("x") + RatPoly.coordinate("y") * dt * 2
        y_part = self.partial("y") - RatPoly.coordinate("x") * dt * 2
        if op == "X":
            return x_part
        if op == "Y":
            return y_part
        if op == "Z":
            return (x_part - y_part * sympy.I) * sympy.Rational(1, 2)
        if op == "Zbar":
            return (x_part + y_part * sympy.I) * sympy.Rational(1, 2)
        raise ValueError(f"unknown operator {op!r}")

    def euclidean_laplacian(self) -> "RatPoly":
        """∂²/∂x² + ∂²/∂y² (the Euclidean Laplacian in the z-plane)."""
        return self.partial("x").partial("x") + self.partial("y").partial("y")

    def integrate(self, name: str) -> "RatPoly":
        """Antiderivative in one variable vanishing where that variable is 0."""
        symbol = SYMBOLS[name]
        return RatPoly(self.re.integrate(symbol), self.im.integrate(symbol))

    def substitute_zero(self, name: str) -> "RatPoly":
        index = ("x", "y", "t").index(name)
        return RatPoly.from_terms(
            {m: c for m, c in self.terms().items() if m[index] == 0}
        )

    def evaluate(self, p: Sequence[float]) -> float | complex:
        real = _eval_poly(self.re, p)
        if self.im.is_zero:
            return real
        return complex(real, _eval_poly(self.im, p))

    def as_sympy(self) -> sympy.Expr:
        return self.re.as_expr() + sympy.I * self.im.as_expr()

    def to_expr(self) -> Expr:
        return from_sympy(self.as_sympy())

    def __str__(self) -> str:
        return sympy.sstr(sympy.expand(self.as_sympy()))


def _coerce(value: Any) -> RatPoly:
    return value if isinstance(value, RatPoly) else RatPoly.constant(value)


def apply_word_exact(word: Sequence[str], p: RatPoly) -> RatPoly:
    """Exact counterpart of ``apply_word``: first letter acts first."""
    for op in word:
        p = p.derive(op)
    return p


def sublaplacian_exact(p: RatPoly) -> RatPoly:
    return apply_word_exact(("X", "X"), p) + apply_word_exact(("Y", "Y"), p)


def weighted_monomials(
    degree: int, exact: bool = False, t_max: int | None = None
) -> list[Monomial]:
    """Monomials x^i y^j t^k with i + j + 2k <= degree (== degree if exact)."""
    result = []
    for k in range(degree // 2 + 1):
        if t_max is not None and k > t_max:
            break
        for total in range(degree - 2 * k + 1):
            if exact and total + 2 * k != degree:
                continue
            for i in range(total, -1, -1):
                result.append((i, total - i, k))
    return result


def polynomial_kernel(
    operator: Callable[[RatPoly], RatPoly], monomials: Sequence[Monomial]
) -> list[RatPoly]:
    """Real polynomials spanned by ``monomials`` that ``operator`` annihilates."""
    if not monomials:
        return []
    images = [operator(RatPoly.monomial(m)) for m in monomials]
    rows = sorted(set().union(*(image.support() for image in images)))
    if not rows:
        return [RatPoly.monomial(m) for m in monomials]
    matrix = sympy.Matrix.hstack(
        *(sympy.Matrix(image.coefficient_vector(rows)) for image in images)
    )
    basis = []
    for vector in matrix.nullspace():
        basis.append(
            RatPoly.from_terms(
                {m: vector[i] for i, m in enumerate(monomials) if vector[i] != 0}
            )
        )
    return basis


def graded_kernel(
    operator: Callable[[RatPoly], RatPoly],
    degree: int,
    t_max: int | None = None,
) -> list[RatPoly]:
    """Kernel of an operator homogeneous for the weighted grading, degree by degree."""
    basis: list[RatPoly] = []
    for d in range(degree + 1):
        layer = polynomial_kernel(
            operator, weighted_monomials(d, exact=True, t_max=t_max)
        )
        logger.debug("weighted degree %d: kernel dimension %d", d, len(layer))
        basis.extend(layer)
    return basis


def span_rank(polys: Iterable[RatPoly]) -> int:
    polys = list(polys)
    if not polys:
        return 0
    keys = sorted(set().union(*(p.support() for p in polys)))
    if not keys:
        return 0
    return sympy.Matrix([p.coefficient_vector(keys) for p in polys]).rank()


def same_span(a: Sequence[RatPoly], b: Sequence[RatPoly]) -> bool:
    rank = span_rank(a)
    return rank == span_rank(b) == span_rank(list(a) + list(b))


def in_span(p: RatPoly, basis: Sequence[RatPoly]) -> bool:
    return span_rank(list(basis) + [p]) == span_rank(basis)


def z_squared(p: RatPoly) -> RatPoly:
    return apply_word_exact(("Z", "Z"), p)


def vzerosol_nullspace(dmax: int) -> tuple[int, list[RatPoly]]:
    """Real potentials v0 with Z²v0 = 0, t-degree <= 2, weighted degree <= dmax."""
    if dmax < 0:
        raise ValueError(f"weighted degree must be >= 0, got {dmax}")
    basis = graded_kernel(z_squared, dmax, t_max=2)
    logger.debug("conformal potentials up to degree %d: dimension %d", dmax, len(basis))
    return len(basis), basis


def fundamental_potentials() -> list[RatPoly]:
    """The eight fundamental conformal potentials, in coefficient order c1..c8."""
    return [
        RatPoly.from_expr(text)
        for text in (
            "x^4 + 2*x^2*y^2 + y^4 + t^2",
            "t*y - x*y^2 - x^3",
            "t*x + x^2*y + y^3",
            "x^2 + y^2",
            "x",
            "y",
            "t",
            "1",
        )
    ]


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    scope: str
    cases: int
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return self.witness is None

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "scope": self.scope,
            "cases": self.cases,
            "status": "exact: pass" if self.passed else "exact: fail",
            "witness": self.witness,
        }


@dataclass(frozen=True)
class AppendixReport:
    dmax: int
    checks: tuple[IdentityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_json(self) -> dict[str, Any]:
        return {
            "dmax": self.dmax,
            "passed": self.passed,
            "checks": [check.to_json() for check in self.checks],
        }


def _difference(
    terms: Sequence[tuple[Any, Word]],
) -> Callable[[RatPoly], RatPoly]:
    def operator(p: RatPoly) -> RatPoly:
        total = RatPoly()
        for coefficient, word in terms:
            total = total + apply_word_exact(word, p) * coefficient
        return total

    return operator


I = sympy.I

# Words list the letter that acts first first; "ZZbarZ" reads as Z(Zbar(Z v)).
UNCONDITIONAL = {
    "2 Z Zbar Z = Z Z Zbar + Zbar Z Z": _difference(
        [(2, ("Z", "Zbar", "Z")), (-1, ("Zbar", "Z", "Z")), (-1, ("Z", "Z", "Zbar"))]
    ),
    "2 Zbar Z Zbar = Zbar Zbar Z + Z Zbar Zbar": _difference(
        [
            (2, ("Zbar", "Z", "Zbar")),
            (-1, ("Z", "Zbar", "Zbar")),
            (-1, ("Zbar", "Zbar", "Z")),
        ]
    ),
    "Zbar Z Z Zbar = Z Zbar Zbar Z": _difference(
        [(1, ("Zbar", "Z", "Z", "Zbar")), (-1, ("Z", "Zbar", "Zbar", "Z"))]
    ),
    "[Zbar, Z] = 2iT": _difference(
        [(1, ("Z", "Zbar")), (-1, ("Zbar", "Z")), (-2 * I, ("T",))]
    ),
    "[X, Y] = -4T": _difference(
        [(1, ("Y", "X")), (-1, ("X", "Y")), (4, ("T",))]
    ),
}

ON_SOLUTIONS = {
    "Z^2 v0 = 0": _difference([(1, ("Z", "Z"))]),
    "4T^2 v0 = Z Zbar Zbar Z v0": _difference(
        [(4, ("T", "T")), (-1, ("Z", "Zbar", "Zbar", "Z"))]
    ),
    "4T^2 v0 = Zbar Z Z Zbar v0": _difference(
        [(4, ("T", "T")), (-1, ("Zbar", "Z", "Z", "Zbar"))]
    ),
    "(Zbar Z)^2 v0 = (Z Zbar)^2 v0": _difference(
        [(1, ("Z", "Zbar", "Z", "Zbar")), (-1, ("Zbar", "Z", "Zbar", "Z"))]
    ),
    "(Zbar Z)^3 v0 = 0": _difference([(1, ("Z", "Zbar") * 3)]),
    "T^3 v0 = 0": _difference([(1, ("T", "T", "T"))]),
}


def _check(
    name: str,
    scope: str,
    operator: Callable[[RatPoly], RatPoly],
    polys: Sequence[RatPoly],
) -> IdentityCheck:
    for p in polys:
        residual = operator(p)
        if not residual.is_zero:
            return IdentityCheck(
                name, scope, len(polys), f"{p} -> residual {residual}"
            )
    return IdentityCheck(name, scope, len(polys))


def appendix_identities(dmax: int = 6) -> AppendixReport:
    """Operator identities on all monomials, conditional ones on the solution basis."""
    monomials = [RatPoly.monomial(m) for m in weighted_monomials(dmax)]
    _, solutions = vzerosol_nullspace(max(dmax, 4))
    checks = [
        _check(name, "monomials", operator, monomials)
        for name, operator in UNCONDITIONAL.items()
    ]
    checks.extend(
        _check(name, "solution basis", operator, solutions)
        for name, operator in ON_SOLUTIONS.items()
    )
    checks.append(
        IdentityCheck(
            "solution basis spans the eight fundamental potentials",
            "solution basis",
            len(solutions),
            None if same_span(solutions, fundamental_potentials()) else "span differs",
        )
    )
    return AppendixReport(dmax, tuple(checks))


def fit_constant(identity: str, pairs: Iterable[tuple[RatPoly, RatPoly]]) -> sympy.Expr:
    """The single exact c with lhs = c * rhs over every pair."""
    pairs = list(pairs)
    constant: sympy.Expr | None = None
    for lhs, rhs in pairs:
        if rhs.is_zero:
            continue
        monomial, coefficient = next(iter(rhs.terms().items()))
        real, imag = gaussian(lhs.terms().get(monomial, 0) / coefficient)
        candidate = real + sympy.I * imag
        if constant is None:
            constant = candidate
        elif candidate != constant:
            raise NoConsistentConstant(identity, [str(lhs), str(rhs)])
    if constant is None:
        raise NoConsistentConstant(identity, ["every right-hand side vanishes"])
    for lhs, rhs in pairs:
        if not (lhs - rhs * constant).is_zero:
            raise NoConsistentConstant(identity, [str(lhs), str(rhs)])
    logger.debug("%s: fitted constant %s", identity, constant)
    return constant
