"""The Heisenberg group H^1, its conformal generators and maps between domains."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, EvalError
from .expr import COORDS, Expr, wrap
from .jets import Jet, jet_eval


class Point(NamedTuple):
    x: float
    y: float
    t: float

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def of(cls, values: Sequence[float]) -> "Point":
        if len(values) != 3:
            raise ValueError(f"a point needs three coordinates, got {len(values)}")
        return cls(float(values[0]), float(values[1]), float(values[2]))


ORIGIN = Point(0.0, 0.0, 0.0)


def group_mul(p: Sequence[float], q: Sequence[float]) -> Point:
    """(z1, t1)(z2, t2) = (z1 + z2, t1 + t2 + 2 Im(z1 conj(z2)))."""
    x1, y1, t1 = p
    x2, y2, t2 = q
    return Point(x1 + x2, y1 + y2, t1 + t2 + 2.0 * (x2 * y1 - x1 * y2))


def group_inv(p: Sequence[float]) -> Point:
    return Point(-p[0], -p[1], -p[2])


def koranyi_norm(p: Sequence[float]) -> float:
    r2 = p[0] ** 2 + p[1] ** 2
    return (r2 * r2 + p[2] ** 2) ** 0.25


def koranyi_dist(p: Sequence[float], q: Sequence[float]) -> float:
    return koranyi_norm(group_mul(group_inv(q), p))


Triple = tuple[Expr, Expr, Expr]


@dataclass(frozen=True)
class Translate:
    q: Point

    name = "translate"
    orientation = 1

    def apply(self, p: Sequence[float]) -> Point:
        return group_mul(self.q, p)

    def exprs(self, a: Expr, b: Expr, c: Expr) -> Triple:
        qx, qy, qt = self.q
        return (
            a + qx,
            b + qy,
            c + qt + 2.0 * qy * a - 2.0 * qx * b,
        )

    def check(self, p: Sequence[float]) -> None:
        return None

    def to_json(self) -> dict[str, Any]:
        return {"type": self.name, "p": point_to_json(self.q)}


@dataclass(frozen=True)
class Dilate:
    r: float

    name = "dilate"
    orientation = 1

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise ValueError(f"dilation factor must be positive, got {self.r}")

    def apply(self, p: Sequence[float]) -> Point:
        return Point(self.r * p[0], self.r * p[1], self.r * self.r * p[2])

    def exprs(self, a: Expr, b: Expr, c: Expr) -> Triple:
        return (self.r * a, self.r * b, (self.r * self.r) * c)

    def check(self, p: Sequence[float]) -> None:
        return None

    def to_json(self) -> dict[str, Any]:
        return {"type": self.name, "r": self.r}


@dataclass(frozen=True)
class Rotate:
    phi: float

    name = "rotate"
    orientation = 1

    def apply(self, p: Sequence[float]) -> Point:
        c, s = math.cos(self.phi), math.sin(self.phi)
        return Point(c * p[0] - s * p[1], s * p[0] + c * p[1], p[2])

    def exprs(self, a: Expr, b: Expr, c: Expr) -> Triple:
        cs, sn = math.cos(self.phi), math.sin(self.phi)
        return (cs * a - sn * b, sn * a + cs * b, c)

    def check(self, p: Sequence[float]) -> None:
        return None

    def to_json(self) -> dict[str, Any]:
        return {"type": self.name, "phi": self.phi}


@dataclass(frozen=True)
class Invert:
    """z -> z / (it - |z|^2), t -> -t / (|z|^4 + t^2)."""

    name = "invert"
    orientation = 1

    def apply(self, p: Sequence[float]) -> Point:
        self.check(p)
        x, y, t = p
        r2 = x * x + y * y
        d = r2 * r2 + t * t
        return Point((y * t - x * r2) / d, -(y * r2 + x * t) / d, -t / d)

    def exprs(self, a: Expr, b: Expr, c: Expr) -> Triple:
        r2 = a * a + b * b
        d = r2 * r2 + c * c
        return ((b * c - a * r2) / d, -(b * r2 + a * c) / d, -c / d)

    def check(self, p: Sequence[float]) -> None:
        if p[0] == 0 and p[1] == 0 and p[2] == 0:
            raise EvalError("inversion singular at origin")

    def to_json(self) -> dict[str, Any]:
        return {"type": self.name}


@dataclass(frozen=True)
class Reflect:
    """(z, t) -> (conj(z), -t); the orientation-reversing generator."""

    name = "reflect"
    orientation = -1

    def apply(self, p: Sequence[float]) -> Point:
        return Point(p[0], -p[1], -p[2])

    def exprs(self, a: Expr, b: Expr, c: Expr) -> Triple:
        return (a, -b, -c)

    def check(self, p: Sequence[float]) -> None:
        return None

    def to_json(self) -> dict[str, Any]:
        return {"type": self.name}


Generator = Translate | Dilate | Rotate | Invert | Reflect


@dataclass(frozen=True)
class HeisMap:
    """A map H^1 -> H^1 given by three component expressions."""

    f1: Expr
    f2: Expr
    f3: Expr
    label: str = "map"
    contact_checked: bool = True
    guard: Callable[[Point], None] | None = field(default=None, compare=False)

    def check(self, p: Sequence[float]) -> None:
        if self.guard is not None:
            self.guard(Point.of(p))

    def at(self, p: Sequence[float]) -> Point:
        self.check(p)
        env = {"x": float(p[0]), "y": float(p[1]), "t": float(p[2])}
        values = [component.evaluate(env) for component in self.components]
        return Point(*(float(np.real(value)) for value in values))

    @property
    def components(self) -> Triple:
        return (self.f1, self.f2, self.f3)

    @property
    def F(self) -> Expr:
        return self.f1 + 1j * self.f2

    def jets(self, p: Sequence[float], order: int) -> tuple[Jet, Jet, Jet]:
        self.check(p)
        point = Point.of(p)
        return tuple(  # type: ignore[return-value]
            jet_eval(component, point, order) for component in self.components
        )

    def compose(self, inner: "HeisMap") -> "HeisMap":
        """``self`` after ``inner``."""
        mapping = dict(zip(("x", "y", "t"), inner.components))
        outer_guard = self.guard
        inner_guard = inner.guard

        def guard(p: Point) -> None:
            if inner_guard is not None:
                inner_guard(p)
            if outer_guard is not None:
                outer_guard(inner.at(p))

        has_guard = outer_guard is not None or inner_guard is not None
        return HeisMap(
            *(component.substitute(mapping) for component in self.components),
            label=f"{self.label}∘{inner.label}",
            contact_checked=self.contact_checked and inner.contact_checked,
            guard=guard if has_guard else None,
        )


def identity_map() -> HeisMap:
    return HeisMap(*COORDS, label="id")


def _generator_label(generator: Generator) -> str:
    if isinstance(generator, Translate):
        return "tr({:g},{:g},{:g})".format(*generator.q)
    if isinstance(generator, Dilate):
        return f"dil({generator.r:g})"
    if isinstance(generator, Rotate):
        return f"rot({generator.phi:g})"
    if isinstance(generator, Invert):
        return "inv"
    return "refl"


@dataclass(frozen=True)
class ConformalWord:
    """g1 ∘ g2 ∘ ... ∘ gn; the last generator acts first."""

    generators: tuple[Generator, ...] = ()

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def orientation(self) -> int:
        sign = 1
        for generator in self.generators:
            sign *= generator.orientation
        return sign

    @property
    def reflect_free(self) -> bool:
        return not any(isinstance(g, Reflect) for g in self.generators)

    @property
    def has_inversion(self) -> bool:
        return any(isinstance(g, Invert) for g in self.generators)

    @property
    def label(self) -> str:
        if not self.generators:
            return "id"
        return "∘".join(_generator_label(g) for g in self.generators)

    def apply(self, p: Sequence[float]) -> Point:
        point = Point.of(p)
        for generator in reversed(self.generators):
            point = generator.apply(point)
        return point

    def check(self, p: Sequence[float]) -> None:
        point = Point.of(p)
        for generator in reversed(self.generators):
            generator.check(point)
            point = generator.apply(point)

    def to_map(self) -> HeisMap:
        return word_to_map(self)

    def to_json(self) -> list[dict[str, Any]]:
        return word_to_json(self)


def word_to_map(word: ConformalWord | Iterable[Generator]) -> HeisMap:
    if not isinstance(word, ConformalWord):
        word = ConformalWord(tuple(word))
    a, b, c = COORDS
    for generator in reversed(word.generators):
        a, b, c = generator.exprs(a, b, c)
    guard = word.check if word.has_inversion else None
    return HeisMap(
        wrap(a),
        wrap(b),
        wrap(c),
        label=word.label,
        contact_checked=True,
        guard=guard,
    )


def make_type1(p: Sequence[float], phi: float, r: float, q: Sequence[float]) -> ConformalWord:
    """τ_p ∘ r_φ ∘ δ_r ∘ τ_q; fixes the point at infinity."""
    return ConformalWord(
        (Translate(Point.of(p)), Rotate(phi), Dilate(r), Translate(Point.of(q)))
    )


def make_type2(p: Sequence[float], phi: float, r: float, q: Sequence[float]) -> ConformalWord:
    """τ_p ∘ ι ∘ r_φ ∘ δ_r ∘ τ_q."""
    return ConformalWord(
        (
            Translate(Point.of(p)),
            Invert(),
            Rotate(phi),
            Dilate(r),
            Translate(Point.of(q)),
        )
    )


def make_sl2(a: float, b: float, c: float, d: float) -> HeisMap:
    """(z, t) -> ((ax + by) + i(cx + dy), t) for a matrix of determinant one."""
    if abs(a * d - b * c - 1.0) > 1e-12:
        raise ValueError(f"SL(2,R) matrix needs ad - bc = 1, got {a * d - b * c}")
    x, y, t = COORDS
    return HeisMap(
        a * x + b * y,
        c * x + d * y,
        t,
        label=f"sl2({a:g},{b:g},{c:g},{d:g})",
    )


def make_affine(
    a: complex, b: complex, c: complex, d: float, e: float
) -> HeisMap:
    """(z, t) -> (az + b conj(z) + c, dt + e); not contact in general."""
    a, b, c = complex(a), complex(b), complex(c)
    x, y, t = COORDS
    return HeisMap(
        (a.real + b.real) * x + (b.imag - a.imag) * y + c.real,
        (a.imag + b.imag) * x + (a.real - b.real) * y + c.imag,
        float(d) * t + float(e),
        label=f"affine({a:g},{b:g},{c:g},{d:g},{e:g})",
        contact_checked=False,
    )


def random_generator(rng: np.random.Generator, allow_reflect: bool = False) -> Generator:
    kinds = ["translate", "dilate", "rotate", "invert"]
    if allow_reflect:
        kinds.append("reflect")
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "translate":
        return Translate(Point.of(rng.uniform(-1.0, 1.0, size=3)))
    if kind == "dilate":
        return Dilate(float(math.exp(rng.uniform(-0.7, 0.7))))
    if kind == "rotate":
        return Rotate(float(rng.uniform(-math.pi, math.pi)))
    if kind == "invert":
        return Invert()
    return Reflect()


def random_word(
    rng: np.random.Generator,
    max_length: int,
    allow_reflect: bool = False,
) -> ConformalWord:
    if max_length < 1:
        raise ValueError(f"word length must be >= 1, got {max_length}")
    length = int(rng.integers(1, max_length + 1))
    return ConformalWord(
        tuple(random_generator(rng, allow_reflect) for _ in range(length))
    )


def word_is_regular_at(
    word: ConformalWord, p: Sequence[float], min_norm: float = 0.1
) -> bool:
    """True when every intermediate image stays in [min_norm, 1/min_norm]."""
    point = Point.of(p)
    for generator in reversed(word.generators):
        if isinstance(generator, Invert) and not (
            min_norm <= koranyi_norm(point) <= 1.0 / min_norm
        ):
            return False
        point = generator.apply(point)
    return koranyi_norm(point) <= 1.0 / min_norm**2


def random_point(
    rng: np.random.Generator, norm_low: float = 0.1, norm_high: float = 3.0
) -> Point:
    """Dilate a unit-sphere point with z != 0 to a norm in [norm_low, norm_high]."""
    return dilate(unit_sphere_point(rng), float(rng.uniform(norm_low, norm_high)))


def unit_sphere_point(rng: np.random.Generator) -> Point:
    a = rng.uniform(-1.4, 1.4)
    theta = rng.uniform(-math.pi, math.pi)
    radius = math.sqrt(math.cos(a))
    return Point(radius * math.cos(theta), radius * math.sin(theta), math.sin(a))


def translate(p: Sequence[float], q: Sequence[float]) -> Point:
    return Translate(Point.of(q)).apply(p)


def dilate(p: Sequence[float], r: float) -> Point:
    return Dilate(r).apply(p)


def rotate(p: Sequence[float], phi: float) -> Point:
    return Rotate(phi).apply(p)


def invert(p: Sequence[float]) -> Point:
    return Invert().apply(p)


def reflect(p: Sequence[float]) -> Point:
    return Reflect().apply(p)


def radial_curve(r: float, p: Sequence[float]) -> Point:
    """γ(r, (z, t)) = (r z e^{-i (t/|z|^2) log r}, r^2 t)."""
    if not r > 0:
        raise DomainError(f"radial curve needs r > 0, got {r}")
    z = complex(p[0], p[1])
    if z == 0:
        raise DomainError("radial curves are undefined where z = 0")
    turned = r * z * complex(math.cos(p[2] / abs(z) ** 2 * math.log(r)),
                             -math.sin(p[2] / abs(z) ** 2 * math.log(r)))
    return Point(turned.real, turned.imag, r * r * p[2])


def contact_form(p: Sequence[float], v: Sequence[float]) -> float:
    """θ_p(v) for θ = dt - 2y dx + 2x dy."""
    return v[2] - 2.0 * p[1] * v[0] + 2.0 * p[0] * v[1]


def curve_tangent(r: float, p: Sequence[float], h: float | None = None) -> Point:
    step = 1e-6 * r if h is None else h
    ahead = radial_curve(r + step, p)
    behind = radial_curve(r - step, p)
    return Point(*((a - b) / (2.0 * step) for a, b in zip(ahead, behind)))


def point_to_json(p: Sequence[float]) -> list[float]:
    return [float(c) for c in p]


def point_from_json(value: Any) -> Point:
    if not isinstance(value, (list, tuple)):
        raise ValueError(f"a point serializes as [x, y, t], got {value!r}")
    return Point.of(value)


def word_to_json(word: ConformalWord) -> list[dict[str, Any]]:
    return [generator.to_json() for generator in word.generators]


def word_from_json(items: Iterable[dict[str, Any]]) -> ConformalWord:
    generators: list[Generator] = []
    for item in items:
        kind = item.get("type")
        if kind == "translate":
            generators.append(Translate(point_from_json(item["p"])))
        elif kind == "dilate":
            generators.append(Dilate(float(item["r"])))
        elif kind == "rotate":
            generators.append(Rotate(float(item["phi"])))
        elif kind == "invert":
            generators.append(Invert())
        elif kind == "reflect":
            generators.append(Reflect())
        else:
            raise ValueError(f"unknown generator type {kind!r}")
    return ConformalWord(tuple(generators))
