"""Expression trees for scalar fields on H^1.

An :class:`Expr` is evaluated over whatever algebra the environment
supplies: plain floats, complex numbers, or :class:`~.jets.Jet` values.
Nodes compare by identity, so shared subtrees (after substitution) are
evaluated once per call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr as sympy_parse_expr,
    standard_transformations,
)

from .errors import DomainError, MapSpecError
from .jets import Jet, scalar_function, scalar_reciprocal


FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt", "conj", "re", "im")

SYMBOLS = {name: sympy.Symbol(name, real=True) for name in ("x", "y", "t")}

_TRANSFORMATIONS = standard_transformations + (convert_xor,)

_SYMPY_FUNCTIONS = {
    "exp": sympy.exp,
    "log": sympy.log,
    "sin": sympy.sin,
    "cos": sympy.cos,
    "sqrt": sympy.sqrt,
    "conj": sympy.conjugate,
    "re": sympy.re,
    "im": sympy.im,
}


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float, complex, Fraction)) and not isinstance(
        value, bool
    )


class Expr:
    """Base class of expression nodes."""

    def evaluate(self, env: Mapping[str, Any]) -> Any:
        return _evaluate(self, env, {})

    def diff(self, var: str) -> "Expr":
        """Symbolic partial derivative with respect to a coordinate."""
        if var not in SYMBOLS:
            raise ValueError(f"unknown coordinate {var!r}")
        return _diff(self, var, {})

    def substitute(self, mapping: Mapping[str, "Expr"]) -> "Expr":
        return _substitute(self, mapping, {})

    def variables(self) -> frozenset[str]:
        found: set[str] = set()
        _collect(self, found, set())
        return frozenset(found)

    def to_sympy(self) -> sympy.Expr:
        return _to_sympy(self, {})

    def __str__(self) -> str:
        return sympy.sstr(self.to_sympy())

    def __add__(self, other: Any) -> "Expr":
        return add(self, other)

    def __radd__(self, other: Any) -> "Expr":
        return add(other, self)

    def __sub__(self, other: Any) -> "Expr":
        return sub(self, other)

    def __rsub__(self, other: Any) -> "Expr":
        return sub(other, self)

    def __mul__(self, other: Any) -> "Expr":
        return mul(self, other)

    def __rmul__(self, other: Any) -> "Expr":
        return mul(other, self)

    def __truediv__(self, other: Any) -> "Expr":
        return div(self, other)

    def __rtruediv__(self, other: Any) -> "Expr":
        return div(other, self)

    def __neg__(self) -> "Expr":
        if isinstance(self, Const):
            return Const(-self.value, -self.exact if self.exact is not None else None)
        return Neg(self)

    def __pow__(self, exponent: int) -> "Expr":
        if not isinstance(exponent, int) or isinstance(exponent, bool):
            return NotImplemented
        if exponent == 0:
            return Const(1, sympy.Integer(1))
        if exponent == 1:
            return self
        return Pow(self, exponent)


@dataclass(frozen=True, eq=False)
class Coord(Expr):
    name: str


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: Any
    exact: Any = None


@dataclass(frozen=True, eq=False)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=False)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=False)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=False)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=False)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True, eq=False)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=False)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self) -> None:
        if self.name not in FUNCTIONS:
            raise ValueError(f"unsupported function {self.name!r}")


COORDS = (Coord("x"), Coord("y"), Coord("t"))
ZERO = Const(0, sympy.Integer(0))
ONE = Const(1, sympy.Integer(1))


def const(value: Any) -> Const:
    if isinstance(value, Const):
        return value
    if isinstance(value, bool) or not _is_number(value):
        raise TypeError(f"not a numeric constant: {value!r}")
    if isinstance(value, int):
        return Const(value, sympy.Integer(value))
    if isinstance(value, Fraction):
        return Const(float(value), sympy.Rational(value.numerator, value.denominator))
    return Const(value)


def wrap(value: Any) -> Expr:
    return value if isinstance(value, Expr) else const(value)


def _zero(node: Expr) -> bool:
    return isinstance(node, Const) and node.value == 0


def _one(node: Expr) -> bool:
    return isinstance(node, Const) and node.value == 1


def _fold(a: Const, b: Const, op: str) -> Const:
    value = {
        "+": lambda: a.value + b.value,
        "-": lambda: a.value - b.value,
        "*": lambda: a.value * b.value,
    }[op]()
    if a.exact is None or b.exact is None:
        return Const(value)
    exact = {"+": a.exact + b.exact, "-": a.exact - b.exact, "*": a.exact * b.exact}[op]
    return Const(value, exact)


def add(a: Any, b: Any) -> Expr:
    a, b = wrap(a), wrap(b)
    if _zero(a):
        return b
    if _zero(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold(a, b, "+")
    return Add(a, b)


def sub(a: Any, b: Any) -> Expr:
    a, b = wrap(a), wrap(b)
    if _zero(b):
        return a
    if _zero(a):
        return -b
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold(a, b, "-")
    return Sub(a, b)


def mul(a: Any, b: Any) -> Expr:
    a, b = wrap(a), wrap(b)
    if _zero(a) or _zero(b):
        return ZERO
    if _one(a):
        return b
    if _one(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold(a, b, "*")
    return Mul(a, b)


def div(a: Any, b: Any) -> Expr:
    a, b = wrap(a), wrap(b)
    if _one(b):
        return a
    if _zero(a) and not _zero(b):
        return ZERO
    return Div(a, b)


def _func(name: str, arg: Any) -> Expr:
    return Func(name, wrap(arg))


def exp(arg: Any) -> Expr:
    return _func("exp", arg)


def log(arg: Any) -> Expr:
    return _func("log", arg)


def sin(arg: Any) -> Expr:
    return _func("sin", arg)


def cos(arg: Any) -> Expr:
    return _func("cos", arg)


def sqrt(arg: Any) -> Expr:
    return _func("sqrt", arg)


def conj(arg: Any) -> Expr:
    return _func("conj", arg)


def re(arg: Any) -> Expr:
    return _func("re", arg)


def im(arg: Any) -> Expr:
    return _func("im", arg)


def _apply_function(node: Func, value: Any) -> Any:
    if isinstance(value, Jet):
        if node.name == "re":
            return value.real()
        if node.name == "im":
            return value.imag()
        method = getattr(value, node.name)
        try:
            return method()
        except DomainError as exc:
            raise DomainError(f"{exc} in {node.name}({node.arg})") from exc
    try:
        return scalar_function(node.name, value)
    except DomainError as exc:
        raise DomainError(f"{exc} in {node.name}({node.arg})") from exc


def _divide(node: Div, left: Any, right: Any) -> Any:
    try:
        if isinstance(right, Jet):
            return left * right.reciprocal()
        return left * scalar_reciprocal(right)
    except DomainError as exc:
        raise DomainError(f"{exc} in denominator {node.right}") from exc


def _evaluate(node: Expr, env: Mapping[str, Any], memo: dict[int, Any]) -> Any:
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, Coord):
        try:
            result = env[node.name]
        except KeyError as exc:
            raise ValueError(f"no value bound for coordinate {node.name!r}") from exc
    elif isinstance(node, Const):
        result = node.value
    elif isinstance(node, Add):
        result = _evaluate(node.left, env, memo) + _evaluate(node.right, env, memo)
    elif isinstance(node, Sub):
        result = _evaluate(node.left, env, memo) - _evaluate(node.right, env, memo)
    elif isinstance(node, Mul):
        result = _evaluate(node.left, env, memo) * _evaluate(node.right, env, memo)
    elif isinstance(node, Div):
        result = _divide(
            node,
            _evaluate(node.left, env, memo),
            _evaluate(node.right, env, memo),
        )
    elif isinstance(node, Pow):
        base = _evaluate(node.base, env, memo)
        if node.exponent < 0 and not isinstance(base, Jet):
            try:
                base = scalar_reciprocal(base)
            except DomainError as exc:
                raise DomainError(f"{exc} in {node}") from exc
            result = base ** (-node.exponent)
        else:
            try:
                result = base**node.exponent
            except DomainError as exc:
                raise DomainError(f"{exc} in {node}") from exc
    elif isinstance(node, Neg):
        result = -_evaluate(node.arg, env, memo)
    elif isinstance(node, Func):
        result = _apply_function(node, _evaluate(node.arg, env, memo))
    else:
        raise TypeError(f"unknown expression node {type(node).__name__}")
    memo[key] = result
    return result


def _diff(node: Expr, var: str, memo: dict[int, Expr]) -> Expr:
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, Coord):
        result: Expr = ONE if node.name == var else ZERO
    elif isinstance(node, Const):
        result = ZERO
    elif isinstance(node, Add):
        result = add(_diff(node.left, var, memo), _diff(node.right, var, memo))
    elif isinstance(node, Sub):
        result = sub(_diff(node.left, var, memo), _diff(node.right, var, memo))
    elif isinstance(node, Mul):
        result = add(
            mul(_diff(node.left, var, memo), node.right),
            mul(node.left, _diff(node.right, var, memo)),
        )
    elif isinstance(node, Div):
        da = _diff(node.left, var, memo)
        db = _diff(node.right, var, memo)
        if _zero(db):
            result = div(da, node.right)
        else:
            result = div(sub(mul(da, node.right), mul(node.left, db)), node.right**2)
    elif isinstance(node, Pow):
        inner = _diff(node.base, var, memo)
        result = mul(mul(node.exponent, node.base ** (node.exponent - 1)), inner)
    elif isinstance(node, Neg):
        inner = _diff(node.arg, var, memo)
        result = ZERO if _zero(inner) else -inner
    elif isinstance(node, Func):
        inner = _diff(node.arg, var, memo)
        if _zero(inner):
            result = ZERO
        elif node.name == "exp":
            result = mul(node, inner)
        elif node.name == "log":
            result = div(inner, node.arg)
        elif node.name == "sin":
            result = mul(cos(node.arg), inner)
        elif node.name == "cos":
            result = -mul(sin(node.arg), inner)
        elif node.name == "sqrt":
            result = div(inner, mul(2, node))
        else:
            # conj, re and im commute with derivatives in real coordinates.
            result = Func(node.name, inner)
    else:
        raise TypeError(f"unknown expression node {type(node).__name__}")
    memo[key] = result
    return result


def _substitute(
    node: Expr, mapping: Mapping[str, Expr], memo: dict[int, Expr]
) -> Expr:
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, Coord):
        result = wrap(mapping[node.name]) if node.name in mapping else node
    elif isinstance(node, Const):
        result = node
    elif isinstance(node, (Add, Sub, Mul, Div)):
        left = _substitute(node.left, mapping, memo)
        right = _substitute(node.right, mapping, memo)
        builder = {Add: add, Sub: sub, Mul: mul, Div: div}[type(node)]
        result = builder(left, right)
    elif isinstance(node, Pow):
        result = _substitute(node.base, mapping, memo) ** node.exponent
    elif isinstance(node, Neg):
        result = -_substitute(node.arg, mapping, memo)
    elif isinstance(node, Func):
        result = Func(node.name, _substitute(node.arg, mapping, memo))
    else:
        raise TypeError(f"unknown expression node {type(node).__name__}")
    memo[key] = result
    return result


def _collect(node: Expr, found: set[str], seen: set[int]) -> None:
    if id(node) in seen:
        return
    seen.add(id(node))
    if isinstance(node, Coord):
        found.add(node.name)
    elif isinstance(node, (Add, Sub, Mul, Div)):
        _collect(node.left, found, seen)
        _collect(node.right, found, seen)
    elif isinstance(node, Pow):
        _collect(node.base, found, seen)
    elif isinstance(node, (Neg, Func)):
        _collect(node.arg, found, seen)


def _exact_number(value: Any) -> sympy.Expr:
    if isinstance(value, complex):
        return _exact_number(value.real) + sympy.I * _exact_number(value.imag)
    if isinstance(value, int):
        return sympy.Integer(value)
    return sympy.Rational(repr(float(value)))


def _to_sympy(node: Expr, memo: dict[int, sympy.Expr]) -> sympy.Expr:
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, Coord):
        result = SYMBOLS[node.name]
    elif isinstance(node, Const):
        result = node.exact if node.exact is not None else _exact_number(node.value)
    elif isinstance(node, Add):
        result = _to_sympy(node.left, memo) + _to_sympy(node.right, memo)
    elif isinstance(node, Sub):
        result = _to_sympy(node.left, memo) - _to_sympy(node.right, memo)
    elif isinstance(node, Mul):
        result = _to_sympy(node.left, memo) * _to_sympy(node.right, memo)
    elif isinstance(node, Div):
        result = _to_sympy(node.left, memo) / _to_sympy(node.right, memo)
    elif isinstance(node, Pow):
        result = _to_sympy(node.base, memo) ** node.exponent
    elif isinstance(node, Neg):
        result = -_to_sympy(node.arg, memo)
    elif isinstance(node, Func):
        result = _SYMPY_FUNCTIONS[node.name](_to_sympy(node.arg, memo))
    else:
        raise TypeError(f"unknown expression node {type(node).__name__}")
    memo[key] = result
    return result


def _number(node: sympy.Expr) -> Const:
    if node.is_Integer:
        return Const(int(node), node)
    if node.is_Rational:
        return Const(float(node), node)
    value = complex(node.evalf())
    exact = node if not node.is_Float else None
    if value.imag == 0:
        return Const(value.real, exact)
    return Const(value, exact)


def from_sympy(node: sympy.Expr) -> Expr:
    """Convert a sympy expression in x, y, t into an :class:`Expr`."""
    if node.is_Symbol:
        if node.name not in SYMBOLS:
            raise MapSpecError(f"unknown symbol {node.name!r}", token=node.name)
        return COORDS[("x", "y", "t").index(node.name)]
    if node.is_number:
        return _number(node)
    if node.is_Add:
        result: Expr = ZERO
        for term in node.args:
            result = add(result, from_sympy(term))
        return result
    if node.is_Mul:
        result = ONE
        for factor in node.args:
            result = mul(result, from_sympy(factor))
        return result
    if node.is_Pow:
        base, exponent = node.args
        inner = from_sympy(base)
        if exponent.is_Integer:
            power = int(exponent)
            if power < 0:
                return div(ONE, inner ** (-power))
            return inner**power
        if exponent == sympy.Rational(1, 2):
            return sqrt(inner)
        if exponent == sympy.Rational(-1, 2):
            return div(ONE, sqrt(inner))
        return exp(mul(from_sympy(exponent), log(inner)))
    for name, function in _SYMPY_FUNCTIONS.items():
        if name != "sqrt" and isinstance(node, function):
            return Func(name, from_sympy(node.args[0]))
    raise MapSpecError(f"unsupported expression {node}", token=str(node))


def parse_expr(text: str) -> Expr:
    """Parse a field such as ``"t^2-(2/3)*(x^4+y^4)"`` or ``"exp(x)"``."""
    source = str(text or "").strip()
    if not source:
        raise MapSpecError("empty expression", token="")
    local_dict = dict(SYMBOLS)
    local_dict.update(
        {
            "I": sympy.I,
            "exp": sympy.exp,
            "log": sympy.log,
            "sin": sympy.sin,
            "cos": sympy.cos,
            "sqrt": sympy.sqrt,
            "conjugate": sympy.conjugate,
            "conj": sympy.conjugate,
            "re": sympy.re,
            "im": sympy.im,
            "pi": sympy.pi,
            "E": sympy.E,
        }
    )
    try:
        parsed = sympy_parse_expr(
            source,
            local_dict=local_dict,
            transformations=_TRANSFORMATIONS,
            evaluate=True,
        )
    except Exception as exc:
        raise MapSpecError(f"cannot parse expression {source!r}", token=source) from exc
    if not isinstance(parsed, sympy.Expr):
        raise MapSpecError(f"not a scalar expression: {source!r}", token=source)
    return from_sympy(parsed)


def parse_number(text: str) -> float:
    """Parse a real constant such as ``"0.3"`` or ``"pi/4"``."""
    value = parse_expr(text)
    if value.variables():
        raise MapSpecError(f"expected a number, got {text!r}", token=str(text))
    number = value.evaluate({})
    if isinstance(number, complex):
        if number.imag != 0:
            raise MapSpecError(f"expected a real number, got {text!r}", token=str(text))
        number = number.real
    if not math.isfinite(float(number)):
        raise MapSpecError(f"number is not finite: {text!r}", token=str(text))
    return float(number)
