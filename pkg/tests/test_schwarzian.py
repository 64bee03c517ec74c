from __future__ import annotations

import pytest

from heis_schwarzian.errors import NotHarmonic, NotPositive, OrderError, SingularError
from heis_schwarzian.exact import RatPoly, apply_word_exact
from heis_schwarzian.expr import COORDS, exp, parse_expr
from heis_schwarzian.fields import flow_closed_form
from heis_schwarzian.group import (
    Dilate,
    Invert,
    Point,
    Translate,
    make_affine,
    make_sl2,
    make_type1,
    make_type2,
    random_point,
    random_word,
    word_is_regular_at,
    word_to_map,
)
from heis_schwarzian.horizontal import assess_contact
from heis_schwarzian.mapspec import parse_map
from heis_schwarzian.schwarzian import (
    annihilation_residuals,
    claim1_residual,
    claim2_residual,
    claim3_value,
    cocycle_residual_left,
    cocycle_residual_right,
    conformal_factor_identity,
    cr_chain_residual,
    jacobian_ratio_spread,
    pluriharmonic_residual,
    preschwarzian,
    preschwarzian_affine_residual,
    preschwarzian_chain_residual,
    s_cl,
    s_cl_scan,
    s_cr,
    schwarzian_values,
    zh_one_builder,
    zh_residual,
)


def regular_pairs(rng, count, max_length=5):
    found = []
    while len(found) < count:
        word = random_word(rng, max_length)
        p = random_point(rng, 0.3, 2.0)
        if word_is_regular_at(word, p, 0.3):
            found.append((word, p))
    return found


def inverted_sl2(a, b):
    alpha = make_sl2(a, b, 0.0, 1.0 / a)
    return alpha, word_to_map([Invert()]).compose(alpha)


def test_conformal_words_annihilate_both_operators(rng, tolerance):
    for word, p in regular_pairs(rng, 25):
        residuals = annihilation_residuals(word, p, tolerance)
        assert residuals["s_cr"].ok(tolerance), word.label
        assert residuals["s_cl"].ok(tolerance), word.label


def test_sl2_action_has_zero_cr_schwarzian(tolerance):
    f = make_sl2(2.0, 0.3, 0.0, 0.5)

    assert abs(s_cr(f, (0.4, -0.2, 0.7), tolerance)) <= 1e-10


def test_inverted_sl2_closed_form(tolerance):
    alpha, f = inverted_sl2(2.0, 0.0)
    p = (1.0, 1.0, 0.0)

    expected = 6.0 * (4.25 / 18.0625) * (5.0 / 4.0) * (3.0 / 4.0)
    assert claim3_value(alpha, p) == pytest.approx(expected)
    assert s_cr(f, p, tolerance) == pytest.approx(expected, rel=1e-7)


def test_quadratic_flows_have_zero_cl_schwarzian(rng, tolerance):
    x = COORDS[0]
    for _ in range(10):
        a, b, c = rng.uniform(-1.0, 1.0, size=3)
        s = float(rng.uniform(0.1, 1.0))
        f = flow_closed_form(float(a) * x * x + float(b) * x + float(c), s)
        assert abs(s_cl(f, tuple(rng.uniform(-1.0, 1.0, size=3)), tolerance)) <= 1e-10


def test_exp_flow_has_nonzero_cl_schwarzian(tolerance):
    f = flow_closed_form(exp(COORDS[0]), 0.5)

    assert abs(s_cl(f, (0.0, 0.0, 0.0), tolerance)) > 1e-3
    assert abs(s_cr(f, (0.0, 0.0, 0.0), tolerance)) <= 1e-10


def test_cr_schwarzian_needs_positive_orientation(tolerance):
    with pytest.raises(NotPositive):
        s_cr(parse_map("refl").map, (0.3, 0.2, 0.1), tolerance)


def test_cl_schwarzian_singular_set_is_reported(tolerance):
    spec = parse_map("grad(u=x)")
    with pytest.raises(SingularError):
        s_cl(spec.map, (0.1, 0.2, 0.3), tolerance)

    rows = s_cl_scan(spec.map, [(0.1, 0.2, 0.3), (0.5, 0.5, 0.5)], tolerance)
    assert [row["singular"] for row in rows] == [True, True]


def test_preschwarzian_vanishes_for_constant_jacobian():
    assert abs(preschwarzian(word_to_map([Dilate(3.0)]), (0.2, 0.4, 0.1))) <= 1e-12
    f = flow_closed_form(exp(COORDS[0]), 0.7)
    assert abs(preschwarzian(f, (0.2, 0.4, 0.1))) <= 1e-10


def test_pluriharmonic_residual():
    assert abs(pluriharmonic_residual(COORDS[0], (0.3, 0.4, 0.5))) <= 1e-12

    u = parse_expr("x^2*y")
    p = (0.3, -0.4, 0.5)
    exact = apply_word_exact(("Zbar", "Z", "Z"), RatPoly.from_expr(u)).evaluate(p)
    assert pluriharmonic_residual(u, p) == pytest.approx(complex(exact), abs=1e-12)
    assert abs(complex(exact)) > 0


def test_right_cocycle(rng, tolerance):
    f = flow_closed_form(exp(COORDS[0]), 0.3)
    for _ in range(10):
        q = Point(*rng.uniform(-1.0, 1.0, size=3))
        g = word_to_map([Dilate(2.0), Translate(q)])
        p = tuple(rng.uniform(-0.5, 0.5, size=3))
        assert cocycle_residual_right(f, g, p, tolerance).ok(tolerance)
    identity = word_to_map([])
    assert abs(complex(cocycle_residual_right(identity, identity, (0.1, 0.2, 0.3)))) <= 1e-12


def test_cr_chain_rule_and_claims(rng, tolerance):
    for word, p in regular_pairs(rng, 10, max_length=4):
        alpha, contact = inverted_sl2(float(rng.uniform(0.6, 1.6)), float(rng.uniform(-1, 1)))
        try:
            chain = cr_chain_residual(contact, word, p, tolerance)
            first = claim1_residual(contact, word, p, tolerance)
        except SingularError:
            continue
        assert chain.ok(tolerance)
        assert first.ok(tolerance)
        assert conformal_factor_identity(word, p, tolerance).ok(tolerance)

    flow = flow_closed_form(parse_expr("x^3 - x"), 0.2)
    g = word_to_map([Translate(Point(0.2, -0.1, 0.4)), Dilate(1.5)])
    assert cr_chain_residual(flow, g, (0.3, -0.4, 0.2), tolerance).ok(tolerance)


def test_cr_chain_rule_with_non_conformal_inner_map(rng, tolerance):
    _, outer_contact = inverted_sl2(1.3, 0.2)
    _, inner = inverted_sl2(0.8, -0.3)
    word = make_type2((0.2, 0.1, -0.3), 0.7, 1.5, (0.4, -0.2, 0.1))
    pairs = (
        (outer_contact, inner),
        (word.to_map(), inner),
        (outer_contact, word.to_map().compose(inner)),
    )
    checked = 0
    for _ in range(8):
        p = random_point(rng, 0.5, 2.0)
        if not word_is_regular_at(word, inner.at(p), 0.3):
            continue
        assert not assess_contact(inner, p, tolerance).is_conformal(tolerance)
        for f, g in pairs:
            assert cr_chain_residual(f, g, p, tolerance).ok(tolerance), (f.label, g.label)
        checked += 1
    assert checked > 0


def test_left_composition_by_inversion_free_words(rng, tolerance):
    _, contact = inverted_sl2(1.3, 0.2)
    for _ in range(10):
        word = make_type1(rng.uniform(-1, 1, size=3), float(rng.uniform(-3, 3)), 1.5, rng.uniform(-1, 1, size=3))
        p = random_point(rng, 0.5, 2.0)
        assert claim2_residual(word, contact, p, tolerance).ok(tolerance)


def test_left_cocycle(rng, tolerance):
    f = flow_closed_form(exp(COORDS[0]), 0.4)
    type1 = make_type1((0.2, -0.1, 0.3), 0.8, 1.7, (0.5, 0.5, -0.2))
    type2 = make_type2((0.2, -0.1, 0.3), 0.8, 1.2, (0.5, 0.5, -0.2))
    changed = 0
    for _ in range(10):
        p = tuple(rng.uniform(-0.8, 0.8, size=3))
        base = s_cl(f, p, tolerance)
        assert s_cl(type1.to_map().compose(f), p, tolerance) == pytest.approx(base, rel=1e-7, abs=1e-9)
        assert cocycle_residual_left(type2, f, p, tolerance=tolerance).ok(tolerance)
        changed += abs(s_cl(type2.to_map().compose(f), p, tolerance) - base) > 1e-3
    assert changed > 0


def test_preschwarzian_rules(rng, tolerance):
    affine = make_affine(1.2 + 0.3j, 0.2 - 0.1j, 0.5j, 1.0, 0.0)
    pairs = regular_pairs(rng, 10, max_length=4)
    for (g, p), (f, _) in zip(pairs, pairs[1:]):
        assert preschwarzian_affine_residual(affine, g, p).ok(tolerance)
        if word_is_regular_at(f, g.apply(p), 0.3):
            assert preschwarzian_chain_residual(f, g, p).ok(tolerance)
    # Flows have J = 1 everywhere, so the equal-Preschwarzian pair is affine∘g against g.
    g = pairs[0][0]
    points = [p for _, p in pairs if word_is_regular_at(g, p, 0.3)]
    assert jacobian_ratio_spread(affine.compose(g.to_map()), g, points) <= 1e-8


@pytest.mark.parametrize(
    ("q", "c1"), [("0", 0.0), ("x^2 - y^2", 0.0), ("x^3 - 3*x*y^2", 1.0)]
)
def test_zh_one_solutions(rng, q, c1):
    h = zh_one_builder(q, c1, 0.5, -2.0)
    for p in rng.uniform(-1.0, 1.0, size=(20, 3)):
        assert abs(zh_residual(h, p)) <= 1e-10


def test_zh_one_rejects_non_harmonic_q():
    with pytest.raises(NotHarmonic):
        zh_one_builder("x^2", 0.0, 0.0, 0.0)
    with pytest.raises(NotHarmonic):
        zh_one_builder("t*x", 0.0, 0.0, 0.0)


def test_schwarzian_values_report(tolerance):
    values = schwarzian_values(parse_map("dil(2)").map, (1.0, 1.0, 0.0), tolerance)
    payload = values.to_json()

    assert payload["lambda"] == pytest.approx(4.0)
    assert payload["s_cl"] == [pytest.approx(0.0, abs=1e-12)] * 2
    assert payload["s_cr"] == [pytest.approx(0.0, abs=1e-12)] * 2
    assert payload["notes"] == []

    unchecked = schwarzian_values(parse_map("map(x; 2*y; t)").map, (0.3, 0.2, 0.1), tolerance)
    assert unchecked.s_cr is None
    assert any("not contact" in note for note in unchecked.notes)

    with pytest.raises(OrderError):
        schwarzian_values(parse_map("dil(2)").map, (1.0, 1.0, 0.0), tolerance, order=2)
