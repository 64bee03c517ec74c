from __future__ import annotations

import math

import pytest
import sympy

from heis_schwarzian.errors import DomainError, MapSpecError
from heis_schwarzian.expr import COORDS, from_sympy, parse_expr, parse_number


def env(x: float, y: float, t: float) -> dict[str, float]:
    return {"x": x, "y": y, "t": t}


def test_parse_polynomial_with_caret_powers():
    e = parse_expr("t^2-(2/3)*(x^4+y^4)")

    assert e.evaluate(env(1.0, 1.0, 2.0)) == pytest.approx(4.0 - 4.0 / 3.0)
    assert e.variables() == frozenset({"x", "y", "t"})


def test_parse_functions_and_constants():
    e = parse_expr("exp(x) + sin(pi*y) + sqrt(t)")

    assert e.evaluate(env(0.0, 0.5, 4.0)) == pytest.approx(1.0 + 1.0 + 2.0)


def test_diff_matches_sympy():
    e = parse_expr("x^3*y - exp(t*x)")
    derivative = e.diff("x")
    x, y, t = (sympy.Symbol(name, real=True) for name in ("x", "y", "t"))
    expected = sympy.diff(e.to_sympy(), x).subs({x: 0.7, y: -0.4, t: 0.2})

    assert derivative.evaluate(env(0.7, -0.4, 0.2)) == pytest.approx(float(expected))


def test_substitute_composes_fields():
    x, y, _ = COORDS
    e = parse_expr("x*y + t")

    composed = e.substitute({"x": x + 1.0, "y": 2.0 * y})

    assert composed.evaluate(env(1.0, 1.0, 3.0)) == pytest.approx(2.0 * 2.0 + 3.0)


def test_from_sympy_handles_negative_and_half_powers():
    x = sympy.Symbol("x", real=True)
    e = from_sympy(1 / (x + 2) ** 2 + sympy.sqrt(x + 3))

    assert e.evaluate(env(1.0, 0.0, 0.0)) == pytest.approx(1.0 / 9.0 + 2.0)


def test_sqrt_of_negative_value_raises():
    with pytest.raises(DomainError, match="sqrt"):
        parse_expr("sqrt(x)").evaluate(env(-1.0, 0.0, 0.0))


@pytest.mark.parametrize("text", ["", "x +", "foo(x)", "w + 1"])
def test_bad_expressions_raise_map_spec_error(text):
    with pytest.raises(MapSpecError):
        parse_expr(text)


def test_parse_number():
    assert parse_number("pi/4") == pytest.approx(math.pi / 4)
    assert parse_number("0.3") == 0.3
    with pytest.raises(MapSpecError, match="expected a number"):
        parse_number("x")
