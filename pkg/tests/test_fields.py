from __future__ import annotations

import math

import pytest

from heis_schwarzian.errors import BadPotential
from heis_schwarzian.expr import COORDS, exp, parse_expr
from heis_schwarzian.fields import (
    PRIMARY_PUSHFORWARD_CASES,
    REDUNDANT_PUSHFORWARD_CASES,
    TRAJECTORY_COLUMNS,
    ConformalVFCoeffs,
    ContactVF,
    TabulatedFlowMap,
    antiholomorphic_product,
    conformal_residual,
    conformal_v0,
    flow_closed_form,
    flow_integrate,
    pushforward_residuals,
    pushforward_w0,
    scl_flow_derivative,
    trajectory_rows,
)
from heis_schwarzian.group import Point, dilate, make_type1, make_type2
from heis_schwarzian.horizontal import assess_contact
from heis_schwarzian.schwarzian import s_cl


@pytest.mark.parametrize("index", range(1, 9))
def test_fundamental_conformal_potentials(rng, tolerance, index):
    v0 = conformal_v0(ConformalVFCoeffs.unit(index))
    for p in rng.uniform(-1.0, 1.0, size=(5, 3)):
        residual = conformal_residual(v0, p)
        assert residual.vanishes(tolerance)


def test_non_conformal_potentials():
    quadratic = conformal_residual(parse_expr("x^2"), (0.3, 0.1, -0.2))
    assert quadratic.z2 == pytest.approx(0.5)
    assert quadratic.from_real_pair == pytest.approx(quadratic.z2)

    exponential = conformal_residual(exp(COORDS[0]), (0.4, 0.0, 0.0))
    assert exponential.z2 == pytest.approx(math.exp(0.4) / 4.0)
    assert exponential.from_real_pair == pytest.approx(exponential.z2)


def test_coefficient_validation():
    with pytest.raises(ValueError, match="8 coefficients"):
        ConformalVFCoeffs.of([1.0, 2.0])
    with pytest.raises(ValueError, match="1..8"):
        ConformalVFCoeffs.unit(9)


def test_contact_field_of_t_is_radial():
    vf = ContactVF(COORDS[2])

    assert list(vf.coordinate_field((1.0, 2.0, 3.0))) == pytest.approx([-2.0, -4.0, -12.0])
    assert vf.label == "V[t]"


def test_closed_form_flow_example():
    f = flow_closed_form(parse_expr("x^2"), 0.5)

    assert tuple(f.at((1.0, 1.0, 0.0))) == pytest.approx((1.0, 0.0, 0.0))
    identity = flow_closed_form(exp(COORDS[0]), 0.0)
    assert tuple(identity.at((0.3, -0.7, 1.1))) == pytest.approx((0.3, -0.7, 1.1))


def test_flows_preserve_the_horizontal_jacobian(rng, tolerance):
    for s in (0.1, 0.5, 1.0):
        f = flow_closed_form(exp(COORDS[0]), s)
        assessment = assess_contact(f, rng.uniform(-1.0, 1.0, size=3), tolerance)
        assert assessment.is_contact(tolerance)
        assert assessment.lam == pytest.approx(1.0)


def test_potential_must_depend_on_x_only():
    with pytest.raises(BadPotential, match="y"):
        flow_closed_form(parse_expr("x*y"), 0.1)
    with pytest.raises(BadPotential, match="t"):
        flow_closed_form(parse_expr("x + t"), 0.1)


def test_rk4_matches_closed_form():
    h = exp(COORDS[0])
    p = (0.2, -0.3, 0.5)

    numeric = flow_integrate(ContactVF(h), p, 0.25, steps=64)
    exact = flow_closed_form(h, 0.25).at(p)
    assert max(abs(u - v) for u, v in zip(numeric, exact)) <= 1e-8

    radial = flow_integrate(ContactVF(COORDS[2]), p, 0.3, steps=64)
    assert tuple(radial) == pytest.approx(tuple(dilate(p, math.exp(-0.6))), abs=1e-8)


def test_rk4_edge_cases():
    p = Point(0.1, 0.2, 0.3)

    assert flow_integrate(ContactVF(COORDS[2]), p, 0.0) == p
    with pytest.raises(ValueError, match="steps"):
        flow_integrate(ContactVF(COORDS[2]), p, 0.1, steps=0)


def test_tabulated_flow_is_contact_to_difference_accuracy():
    tabulated = TabulatedFlowMap(ContactVF(exp(COORDS[0])), 0.25)

    assessment = tabulated.assess((0.1, -0.2, 0.3))
    assert assessment.contact_residual <= 1e-5
    assert assessment.lam == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(ValueError, match="positive"):
        TabulatedFlowMap(ContactVF(COORDS[2]), 0.1, h=0.0)


def test_cl_schwarzian_first_order_in_s():
    h = exp(COORDS[0])
    p = (0.0, 0.0, 0.0)
    epsilon = 1e-4

    predicted = scl_flow_derivative(h, p)
    assert predicted == pytest.approx(-0.125j)
    central = (
        s_cl(flow_closed_form(h, epsilon), p) - s_cl(flow_closed_form(h, -epsilon), p)
    ) / (2.0 * epsilon)
    assert abs(central - predicted) <= 1e-6


@pytest.mark.parametrize("cases", [PRIMARY_PUSHFORWARD_CASES, REDUNDANT_PUSHFORWARD_CASES])
def test_pushforward_of_conformal_potentials(tolerance, cases):
    words = (
        make_type1((0.2, 0.1, -0.3), 0.7, 1.5, (0.4, -0.2, 0.1)),
        make_type2((0.2, 0.1, -0.3), 0.7, 1.5, (0.4, -0.2, 0.1)),
    )
    for word in words:
        residuals = pushforward_residuals(word.to_map(), (0.5, 0.6, 0.2), tolerance)
        scale = 1.0 + max(abs(v) for v in residuals.values())
        for case in cases:
            assert tolerance.small(residuals[case], scale), (word.label, case)


def test_pushforward_w0_and_product():
    f = make_type1((0.0, 0.0, 0.0), 0.0, 2.0, (0.0, 0.0, 0.0)).to_map()
    p = (0.5, 0.0, 0.0)

    # λ = 4 for a dilation by 2, and v0 = 1 in the last case.
    assert pushforward_w0(f, 8, p) == pytest.approx(0.25)
    assert antiholomorphic_product(f, p) == pytest.approx(0.0)
    with pytest.raises(ValueError, match="1..8"):
        pushforward_w0(f, 0, p)


def test_trajectory_rows():
    rows = trajectory_rows(parse_expr("x^2"), [0.0, 0.5], (1.0, 1.0, 0.0))

    assert [tuple(row) for row in rows] == [TRAJECTORY_COLUMNS] * 2
    assert rows[1]["y"] == pytest.approx(0.0)
    assert all(row["lambda"] == pytest.approx(1.0) for row in rows)
    assert all(abs(row["s_cl_re"]) <= 1e-10 for row in rows)
