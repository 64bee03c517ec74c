from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heis_schwarzian.errors import DomainError, OrderError
from heis_schwarzian.expr import COORDS, exp, parse_expr
from heis_schwarzian.jets import (
    fd_oracle,
    jet_eval,
    jet_partial,
    jet_seed,
    multi_indices,
)


coordinate = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)
points = st.tuples(coordinate, coordinate, coordinate)


def test_coordinate_seed_has_unit_first_partial():
    x, y, t = jet_seed((1.0, 2.0, 3.0), 2)

    assert x.value == 1.0
    assert x.coefficient((1, 0, 0)) == 1.0
    assert x.coefficient((0, 1, 0)) == 0.0
    assert x.coefficient((2, 0, 0)) == 0.0
    assert t.value == 3.0


def test_order_zero_seed_is_values_only():
    jets = jet_seed((0.0, 0.0, 0.0), 0)

    assert [j.value for j in jets] == [0.0, 0.0, 0.0]
    assert multi_indices(0) == ((0, 0, 0),)


def test_product_rule_on_xy():
    jet = jet_eval(parse_expr("x*y"), (1.0, 2.0, 3.0), 1)

    assert jet.value == 2.0
    assert jet.coefficient((1, 0, 0)) == 2.0
    assert jet.coefficient((0, 1, 0)) == 1.0
    assert jet.coefficient((0, 0, 1)) == 0.0


def test_exp_taylor_coefficients():
    jet = jet_eval(exp(COORDS[0]), (0.0, 0.0, 0.0), 3)

    expected = [1.0, 1.0, 0.5, 1.0 / 6.0]
    for k, value in enumerate(expected):
        assert jet.coefficient((k, 0, 0)) == pytest.approx(value)
    assert jet_partial(jet, (2, 0, 0)) == pytest.approx(1.0)


def test_mixed_partial_of_polynomial():
    jet = jet_eval(parse_expr("x^2*y"), (1.0, 2.0, 3.0), 2)

    assert jet.coefficient((1, 1, 0)) == pytest.approx(2.0)
    assert jet_partial(jet, (1, 1, 0)) == pytest.approx(2.0)
    assert jet_partial(jet, (0, 0, 0)) == pytest.approx(2.0)


def test_pole_raises_domain_error():
    with pytest.raises(DomainError, match="division by zero"):
        jet_eval(parse_expr("1/x"), (0.0, 0.0, 0.0), 2)


def test_log_of_nonpositive_value_raises():
    with pytest.raises(DomainError, match="log"):
        jet_eval(parse_expr("log(x)"), (-1.0, 0.0, 0.0), 1)


def test_fd_oracle_first_derivative_of_exp():
    estimate = fd_oracle(exp(COORDS[0]), (0.0, 0.0, 0.0), (1, 0, 0), h=1e-4)

    assert abs(estimate - 1.0) <= 1e-7


def test_fd_oracle_is_exact_on_quadratics():
    for h in (1e-1, 1e-3):
        estimate = fd_oracle(parse_expr("x^2"), (0.3, 0.0, 0.0), (2, 0, 0), h=h)
        assert estimate == pytest.approx(2.0, abs=1e-8)


def test_fd_oracle_third_derivative_in_t():
    estimate = fd_oracle(parse_expr("sin(t)"), (0.0, 0.0, 0.0), (0, 0, 3))

    assert estimate == pytest.approx(-1.0, abs=1e-6)


def test_fd_oracle_rejects_fourth_order():
    with pytest.raises(OrderError):
        fd_oracle(parse_expr("x^4"), (0.0, 0.0, 0.0), (4, 0, 0))


@settings(max_examples=40, deadline=None)
@given(points)
def test_jet_ring_laws(p):
    x, y, t = jet_seed(p, 3)
    a = x * y + t
    b = x - 2.0 * t * t
    c = y * y + 1.0

    left = (a + b) * c
    right = a * c + b * c
    for alpha in multi_indices(3):
        assert left.coefficient(alpha) == pytest.approx(right.coefficient(alpha), abs=1e-9)
    product = (a * b) * c - a * (b * c)
    assert all(abs(product.coefficient(alpha)) <= 1e-9 for alpha in multi_indices(3))


@settings(max_examples=30, deadline=None)
@given(points)
def test_jets_agree_with_finite_differences(p):
    e = parse_expr("exp(x*y) * cos(t) + x^3")
    jet = jet_eval(e, p, 2)
    for alpha in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 0, 2)):
        exact = jet_partial(jet, alpha)
        estimate = fd_oracle(e, p, alpha)
        assert abs(exact - estimate) <= 1e-6 * max(1.0, abs(exact))


def test_exp_log_round_to_identity():
    jet = jet_eval(parse_expr("log(exp(x) + 1)"), (0.5, 0.0, 0.0), 2)

    assert jet.value == pytest.approx(math.log(math.exp(0.5) + 1.0))
    assert jet_partial(jet, (1, 0, 0)) == pytest.approx(math.exp(0.5) / (math.exp(0.5) + 1.0))
