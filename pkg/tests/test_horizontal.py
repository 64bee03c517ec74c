from __future__ import annotations

import pytest

from heis_schwarzian.errors import NotContact, NotPositive, OrderError
from heis_schwarzian.expr import COORDS, exp, parse_expr
from heis_schwarzian.fields import flow_closed_form
from heis_schwarzian.group import (
    Dilate,
    Point,
    Rotate,
    make_sl2,
    random_point,
    random_word,
    word_is_regular_at,
    word_to_map,
)
from heis_schwarzian.horizontal import (
    MapJets,
    apply_word,
    assess_contact,
    chain_rule_residual,
    horizontal_gradient,
    jacobian_product_residual,
    require_contact,
    sublaplacian,
)
from heis_schwarzian.mapspec import parse_map


def regular_pairs(rng, count):
    found = []
    while len(found) < count:
        word = random_word(rng, 4)
        p = random_point(rng, 0.3, 2.0)
        if word_is_regular_at(word, p, 0.3):
            found.append((word, p))
    return found


def test_left_invariant_fields_on_t():
    t = COORDS[2]

    assert apply_word(("X",), t, (1.0, 2.0, 3.0)) == pytest.approx(4.0)
    assert apply_word(("Y",), t, (1.0, 2.0, 3.0)) == pytest.approx(-2.0)
    assert apply_word(("Z",), t, (0.4, -0.7, 1.0)) == pytest.approx(complex(-0.7, 0.4))
    assert apply_word(("T",), t, (0.4, -0.7, 1.0)) == pytest.approx(1.0)


def test_word_longer_than_order_is_rejected():
    with pytest.raises(OrderError):
        apply_word(("X", "X"), COORDS[0], (0.0, 0.0, 0.0), order=1)


def test_commutators(rng):
    e = parse_expr("x^3*y*t + exp(y)*t^2")
    for _ in range(10):
        p = tuple(rng.uniform(-1.0, 1.0, size=3))
        xy = apply_word(("Y", "X"), e, p) - apply_word(("X", "Y"), e, p)
        assert xy == pytest.approx(-4.0 * apply_word(("T",), e, p), abs=1e-9)
        bracket = apply_word(("Z", "Zbar"), e, p) - apply_word(("Zbar", "Z"), e, p)
        assert bracket == pytest.approx(2j * apply_word(("T",), e, p), abs=1e-9)


@pytest.mark.parametrize(
    ("text", "expected"),
    [("t", 0.0), ("x^2 - y^2", 0.0), ("t^2", 8.0 * (0.3**2 + 0.5**2))],
)
def test_sublaplacian_examples(text, expected):
    assert sublaplacian(parse_expr(text), (0.3, 0.5, -0.2)) == pytest.approx(expected)


def test_horizontal_gradient_of_t():
    assert horizontal_gradient(COORDS[2], (1.0, 2.0, 0.0)) == pytest.approx((4.0, -2.0))


def test_conformal_words_are_contact_and_conformal(rng, tolerance):
    for word, p in regular_pairs(rng, 20):
        assessment = assess_contact(word.to_map(), p, tolerance)
        assert assessment.is_contact(tolerance)
        assert assessment.is_conformal(tolerance)
        assert assessment.lam > 0
        assert abs(assessment.r_z) <= 1e-8 * max(1.0, assessment.scale)


def test_flow_is_contact_but_not_conformal(tolerance):
    f = flow_closed_form(exp(COORDS[0]), 0.5)
    assessment = assess_contact(f, (0.2, 0.1, -0.3), tolerance)

    assert assessment.is_contact(tolerance)
    assert not assessment.is_conformal(tolerance)
    assert assessment.lam == pytest.approx(1.0)
    assert 0.0 < abs(assessment.beltrami()) < 1.0


def test_require_contact_rejects_arbitrary_maps(tolerance):
    spec = parse_map("map(x; 2*y; t)")
    assert spec.unchecked
    with pytest.raises(NotContact):
        require_contact(MapJets(spec.map, (0.3, 0.2, 0.1), 1), tolerance)


def test_require_contact_positive_orientation(tolerance):
    reflect = parse_map("refl").map
    with pytest.raises(NotPositive):
        require_contact(MapJets(reflect, (0.3, 0.2, 0.1), 1), tolerance, positive=True)


def test_horizontal_chain_rule(rng, tolerance):
    f = flow_closed_form(exp(COORDS[0]), 0.3)
    g = make_sl2(1.5, 0.4, 0.0, 1.0 / 1.5)
    for _ in range(5):
        p = Point(*rng.uniform(-1.0, 1.0, size=3))
        for letter in ("X", "Y", "Z", "Zbar"):
            assert chain_rule_residual(f, g, letter, p).ok(tolerance)
        assert jacobian_product_residual(f, g, p).ok(tolerance)


def test_jacobian_of_dilation_rotation():
    f = word_to_map([Dilate(2.0), Rotate(0.7)])

    assert MapJets(f, (0.1, 0.2, 0.3), 1).lam().value == pytest.approx(4.0)
