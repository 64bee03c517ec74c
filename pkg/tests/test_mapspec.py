from __future__ import annotations

import pytest

from heis_schwarzian.errors import MapSpecError, NotHarmonic
from heis_schwarzian.group import Dilate, Invert, Point, Rotate, dilate, invert, rotate
from heis_schwarzian.mapspec import parse_grid, parse_map, parse_point, parse_s_range


def test_word_composes_right_to_left():
    spec = parse_map("inv∘rot(0.3)∘dil(2)")
    p = (0.4, -0.2, 0.3)

    assert spec.word is not None
    assert [type(g) for g in spec.word.generators] == [Invert, Rotate, Dilate]
    expected = invert(rotate(dilate(p, 2.0), 0.3))
    assert tuple(spec.map.at(p)) == pytest.approx(tuple(expected))
    assert not spec.unchecked


def test_star_is_a_composition_too():
    assert parse_map("dil(2) * tr(1,0,0)").map.at((0.0, 0.0, 0.0)) == pytest.approx((2.0, 0.0, 0.0))


def test_flow_and_gradient_terms():
    flow = parse_map("flow(h=x^2, s=0.5)")
    assert tuple(flow.map.at((1.0, 1.0, 0.0))) == pytest.approx((1.0, 0.0, 0.0))
    assert flow.word is None

    grad = parse_map("grad(u=t)")
    assert grad.gradient is not None
    assert tuple(grad.map.at((1.0, 2.0, 3.0))) == pytest.approx((4.0, -2.0, 1.0))
    assert grad.unchecked


def test_mixed_composition():
    spec = parse_map("dil(2)∘flow(h=x^2, s=0.5)")

    assert tuple(spec.map.at((1.0, 1.0, 0.0))) == pytest.approx((2.0, 0.0, 0.0))


def test_raw_map_and_sl2():
    raw = parse_map("map(x; 2*y; t)")
    assert raw.unchecked
    assert tuple(raw.map.at((1.0, 1.0, 1.0))) == pytest.approx((1.0, 2.0, 1.0))

    sl2 = parse_map("sl2(2, 0, 0, 0.5)")
    assert tuple(sl2.map.at((1.0, 1.0, 0.3))) == pytest.approx((2.0, 0.5, 0.3))
    assert tuple(parse_map("id").map.at((1.0, 2.0, 3.0))) == pytest.approx((1.0, 2.0, 3.0))


@pytest.mark.parametrize(
    ("text", "token"),
    [
        ("", ""),
        ("foo(1)", "foo"),
        ("dil(1, 2)", "dil(1, 2)"),
        ("dil(-1)", "dil(-1)"),
        ("inv(3)", "inv(3)"),
        ("rot(0.3", "rot(0.3"),
        ("dil(2)∘", "dil(2)∘"),
        ("flow(h=x^2)", "flow"),
        ("flow(h=x^2, q=1)", "q=1"),
        ("map(x; y)", "map(x; y)"),
        ("sl2(1, 1, 1, 1)", "sl2(1, 1, 1, 1)"),
    ],
)
def test_bad_specs_name_the_token(text, token):
    with pytest.raises(MapSpecError) as info:
        parse_map(text)

    assert info.value.token == token


def test_gradient_of_non_harmonic_u_is_a_domain_error():
    with pytest.raises(NotHarmonic):
        parse_map("grad(u=x^2)")


def test_points():
    assert parse_point("1, -2.5, 0.3") == Point(1.0, -2.5, 0.3)
    for text in ("1,2", "1,,3", "a,b,c"):
        with pytest.raises(MapSpecError):
            parse_point(text)


def test_grid_is_x_major():
    grid = parse_grid("-1:1:3,0:1:2,0")

    assert len(grid) == 6
    assert grid[0] == Point(-1.0, 0.0, 0.0)
    assert grid[1] == Point(-1.0, 1.0, 0.0)
    assert grid[-1] == Point(1.0, 1.0, 0.0)
    assert parse_grid("0:1:1,2,3") == [Point(0.0, 2.0, 3.0)]


@pytest.mark.parametrize("text", ["-1:1:3,0", "-1:1,0,0", "-1:1:x,0,0", "-1:1:0,0,0", ""])
def test_bad_grids(text):
    with pytest.raises(MapSpecError):
        parse_grid(text)


def test_s_ranges():
    assert parse_s_range("0..1", 5) == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    assert parse_s_range("0.5") == [0.5]
    assert parse_s_range("0..1", 1) == [0.0]
    with pytest.raises(MapSpecError):
        parse_s_range("0..1", 0)
    with pytest.raises(MapSpecError):
        parse_s_range("a..1")
