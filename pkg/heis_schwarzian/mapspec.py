"""Parsing of map specifications, points, grids and parameter ranges."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MapSpecError
from .expr import parse_expr, parse_number
from .fields import flow_closed_form
from .group import (
    ConformalWord,
    Dilate,
    Generator,
    HeisMap,
    Invert,
    Point,
    Reflect,
    Rotate,
    Translate,
    identity_map,
    make_sl2,
    word_to_map,
)
from .harmonic import GradientHarmonicMap, gradient_harmonic


COMPOSE = ("∘", "*")
_TERM = re.compile(r"^\s*([A-Za-z][A-Za-z0-9]*)\s*(?:\((.*)\))?\s*$", re.DOTALL)


@dataclass(frozen=True)
class MapSpec:
    text: str
    map: HeisMap
    word: ConformalWord | None = None
    gradient: GradientHarmonicMap | None = None

    @property
    def unchecked(self) -> bool:
        """True when contact was not established by construction."""
        return not self.map.contact_checked


def _split_top(text: str, separators: Sequence[str]) -> list[str]:
    parts, depth, current = [], 0, []
    for char in text:
        if char in "([":
            depth += 1
        elif char in ")]":
            depth -= 1
            if depth < 0:
                raise MapSpecError(f"unbalanced ')' in {text!r}", token=text)
        if depth == 0 and char in separators:
            parts.append("".join(current))
            current = []
            continue
        current.append(char)
    if depth != 0:
        raise MapSpecError(f"unbalanced '(' in {text!r}", token=text)
    parts.append("".join(current))
    return parts


def _numbers(name: str, args: str | None, count: int) -> list[float]:
    items = [] if args is None else [a for a in _split_top(args, ",")]
    if len(items) != count or any(not a.strip() for a in items):
        raise MapSpecError(
            f"{name} takes {count} argument(s), got {args!r}", token=f"{name}({args or ''})"
        )
    return [parse_number(a) for a in items]


def _keywords(name: str, args: str | None, required: Sequence[str]) -> dict[str, str]:
    if args is None:
        raise MapSpecError(f"{name} needs arguments {', '.join(required)}", token=name)
    values: dict[str, str] = {}
    for item in _split_top(args, ","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in required or not value.strip():
            raise MapSpecError(f"bad argument {item.strip()!r} to {name}", token=item.strip())
        values[key] = value.strip()
    missing = [key for key in required if key not in values]
    if missing:
        raise MapSpecError(f"{name} is missing {', '.join(missing)}", token=name)
    return values


def _generator(name: str, args: str | None) -> Generator | None:
    try:
        if name in ("inv", "refl"):
            if args is not None and args.strip():
                raise MapSpecError(f"{name} takes no arguments", token=f"{name}({args})")
            return Invert() if name == "inv" else Reflect()
        if name == "rot":
            return Rotate(*_numbers(name, args, 1))
        if name == "dil":
            return Dilate(*_numbers(name, args, 1))
        if name == "tr":
            return Translate(Point(*_numbers(name, args, 3)))
    except MapSpecError:
        raise
    except ValueError as exc:
        raise MapSpecError(str(exc), token=f"{name}({args or ''})") from exc
    return None


def _term(text: str) -> Generator | HeisMap | GradientHarmonicMap:
    match = _TERM.match(text)
    if not match:
        raise MapSpecError(f"cannot parse map term {text.strip()!r}", token=text.strip())
    name, args = match.group(1), match.group(2)
    generator = _generator(name, args)
    if generator is not None:
        return generator
    if name == "id":
        return identity_map()
    if name == "sl2":
        numbers = _numbers(name, args, 4)
        try:
            return make_sl2(*numbers)
        except ValueError as exc:
            raise MapSpecError(str(exc), token=text.strip()) from exc
    if name == "flow":
        values = _keywords(name, args, ("h", "s"))
        return flow_closed_form(parse_expr(values["h"]), parse_number(values["s"]))
    if name == "grad":
        values = _keywords(name, args, ("u",))
        return gradient_harmonic(parse_expr(values["u"]))
    if name == "map":
        if args is None:
            raise MapSpecError("map needs three components", token=text.strip())
        components = _split_top(args, ";")
        if len(components) != 3:
            raise MapSpecError(
                f"map needs three ';'-separated components, got {len(components)}",
                token=text.strip(),
            )
        f1, f2, f3 = (parse_expr(c) for c in components)
        return HeisMap(f1, f2, f3, label=f"map({args.strip()})", contact_checked=False)
    raise MapSpecError(f"unknown map term {name!r}", token=name)


def parse_map(text: str) -> MapSpec:
    """Parse ``"inv∘rot(0.3)∘dil(2)"``, ``"flow(h=exp(x), s=0.5)"``, ``"grad(u=t)"`` and so on."""
    source = str(text or "").strip()
    if not source:
        raise MapSpecError("empty map specification", token="")
    pieces = _split_top(source, COMPOSE)
    if any(not piece.strip() for piece in pieces):
        raise MapSpecError(f"empty term in {source!r}", token=source)
    terms = [_term(piece) for piece in pieces]

    if all(isinstance(term, (Translate, Dilate, Rotate, Invert, Reflect)) for term in terms):
        word = ConformalWord(tuple(terms))  # type: ignore[arg-type]
        return MapSpec(source, word.to_map(), word=word)

    maps = []
    for term in terms:
        if isinstance(term, GradientHarmonicMap):
            maps.append(term.map)
        elif isinstance(term, HeisMap):
            maps.append(term)
        else:
            maps.append(word_to_map([term]))
    result = maps[0]
    for inner in maps[1:]:
        result = result.compose(inner)
    gradient = terms[0] if len(terms) == 1 and isinstance(terms[0], GradientHarmonicMap) else None
    return MapSpec(source, result, gradient=gradient)


def parse_point(text: str) -> Point:
    items = [item for item in str(text or "").split(",")]
    if len(items) != 3 or any(not item.strip() for item in items):
        raise MapSpecError(f"a point needs three coordinates x,y,t, got {text!r}", token=str(text))
    return Point(*(parse_number(item) for item in items))


def _axis(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) == 1:
        return [parse_number(parts[0])]
    if len(parts) != 3:
        raise MapSpecError(f"an axis is lo:hi:n or a number, got {text!r}", token=text)
    low, high = parse_number(parts[0]), parse_number(parts[1])
    try:
        count = int(parts[2])
    except ValueError as exc:
        raise MapSpecError(f"sample count must be an integer, got {parts[2]!r}", token=parts[2]) from exc
    if count < 1:
        raise MapSpecError(f"sample count must be >= 1, got {count}", token=parts[2])
    if count == 1:
        return [low]
    return [float(v) for v in np.linspace(low, high, count)]


def parse_grid(text: str) -> list[Point]:
    """``"-1:1:21,-1:1:21,0"``: three axis specs, expanded x-major."""
    axes = [a.strip() for a in str(text or "").split(",")]
    if len(axes) != 3 or any(not a for a in axes):
        raise MapSpecError(f"a grid needs three axis specs, got {text!r}", token=str(text))
    xs, ys, ts = (_axis(a) for a in axes)
    return [Point(x, y, t) for x, y, t in itertools.product(xs, ys, ts)]


def parse_s_range(text: str, samples: int = 21) -> list[float]:
    """``"0..2"`` sampled at ``samples`` evenly spaced values, or a single number."""
    source = str(text or "").strip()
    if ".." not in source:
        return [parse_number(source)]
    low_text, _, high_text = source.partition("..")
    low, high = parse_number(low_text), parse_number(high_text)
    if samples < 1:
        raise MapSpecError(f"samples must be >= 1, got {samples}", token=str(samples))
    if samples == 1:
        return [low]
    return [float(v) for v in np.linspace(low, high, samples)]
