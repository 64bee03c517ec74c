from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heis_schwarzian.errors import DomainError, EvalError
from heis_schwarzian.group import (
    ConformalWord,
    Dilate,
    Invert,
    Point,
    Reflect,
    Rotate,
    Translate,
    contact_form,
    curve_tangent,
    group_inv,
    group_mul,
    identity_map,
    invert,
    koranyi_dist,
    koranyi_norm,
    make_sl2,
    make_type1,
    point_from_json,
    point_to_json,
    radial_curve,
    random_point,
    random_word,
    unit_sphere_point,
    word_from_json,
    word_is_regular_at,
    word_to_map,
)


coordinate = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
points = st.builds(Point, coordinate, coordinate, coordinate)


def assert_points_close(a, b, tol=1e-9):
    assert all(abs(u - v) <= tol * max(1.0, abs(v)) for u, v in zip(a, b)), (a, b)


def test_group_law_examples():
    assert group_mul((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)) == Point(1.0, 1.0, -2.0)
    assert group_mul((0.0, 0.0, 2.0), (0.0, 0.0, 3.0)) == Point(0.0, 0.0, 5.0)


@settings(max_examples=50, deadline=None)
@given(points, points, points)
def test_group_laws(p, q, r):
    assert_points_close(group_mul(p, group_inv(p)), (0.0, 0.0, 0.0))
    assert_points_close(group_mul(group_mul(p, q), r), group_mul(p, group_mul(q, r)))


def test_koranyi_norm_and_distance():
    assert koranyi_norm((1.0, 1.0, 0.0)) == pytest.approx(math.sqrt(2.0))
    assert koranyi_norm((0.0, 0.0, 1.0)) == pytest.approx(1.0)
    assert koranyi_dist((0.3, -1.0, 2.0), (0.3, -1.0, 2.0)) == 0.0


def test_inversion_examples():
    assert_points_close(invert((1.0, 0.0, 0.0)), (-1.0, 0.0, 0.0))
    assert_points_close(invert((0.0, 0.0, 1.0)), (0.0, 0.0, -1.0))
    with pytest.raises(EvalError, match="inversion singular at origin"):
        invert((0.0, 0.0, 0.0))


def test_inversion_is_an_involution(rng):
    for _ in range(20):
        p = random_point(rng)
        assert_points_close(invert(invert(p)), p, 1e-8)


def test_dilation_rejects_nonpositive_factor():
    with pytest.raises(ValueError, match="positive"):
        Dilate(0.0)


def test_word_map_matches_pointwise_action(rng):
    for _ in range(20):
        word = random_word(rng, 5)
        p = random_point(rng)
        if not word_is_regular_at(word, p):
            continue
        assert_points_close(word.to_map().at(p), word.apply(p), 1e-8)


def test_word_map_guard_reports_singular_inversion():
    f = word_to_map([Invert(), Translate(Point(-1.0, 0.0, 0.0))])

    with pytest.raises(EvalError):
        f.at((1.0, 0.0, 0.0))


def test_word_orientation_and_flags():
    word = ConformalWord((Rotate(0.3), Reflect(), Invert()))

    assert word.orientation == -1
    assert not word.reflect_free
    assert word.has_inversion
    assert make_type1((0, 0, 0), 0.1, 2.0, (1, 0, 0)).reflect_free


def test_word_json_round_trip_preserves_action(rng):
    word = random_word(rng, 6, allow_reflect=True)
    restored = word_from_json(word.to_json())

    p = random_point(rng)
    if word_is_regular_at(word, p):
        assert_points_close(restored.apply(p), word.apply(p))


def test_sl2_requires_unit_determinant():
    with pytest.raises(ValueError, match="ad - bc"):
        make_sl2(1.0, 1.0, 1.0, 1.0)
    assert make_sl2(2.0, 0.0, 0.0, 0.5).at((1.0, 1.0, 3.0)) == Point(2.0, 0.5, 3.0)


def test_radial_curve_examples():
    assert_points_close(radial_curve(0.5, (1.0, 0.0, 0.0)), (0.5, 0.0, 0.0))
    p = Point(0.6, -0.2, 0.9)
    assert_points_close(radial_curve(1.0, p), p)
    with pytest.raises(DomainError):
        radial_curve(0.5, (0.0, 0.0, 1.0))


def test_radial_curve_is_horizontal_and_scales_the_norm(rng):
    p = Point(1.0, 0.0, 1.0)
    for r in np.linspace(0.1, 0.9, 9):
        q = radial_curve(float(r), p)
        assert abs(contact_form(q, curve_tangent(float(r), p))) <= 1e-8
        assert koranyi_norm(q) == pytest.approx(r * koranyi_norm(p), abs=1e-9)
    for _ in range(10):
        base = unit_sphere_point(rng)
        assert koranyi_norm(base) == pytest.approx(1.0, abs=1e-12)


def test_identity_map_and_point_json():
    identity = identity_map()
    assert identity.label == "id"
    assert tuple(identity.at((0.5, -1.0, 2.0))) == pytest.approx((0.5, -1.0, 2.0))

    assert point_to_json(Point(1, 2, 3)) == [1.0, 2.0, 3.0]
    assert Translate(Point(1, 2, 3)).to_json() == {"type": "translate", "p": [1.0, 2.0, 3.0]}
    assert point_from_json([1, 2, 3]) == Point(1.0, 2.0, 3.0)
    with pytest.raises(ValueError):
        point_from_json("1,2,3")
