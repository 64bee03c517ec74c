"""Left-invariant derivatives X, Y, T, Z, Zbar and contact diagnostics.

Operator words are applied first letter first: ``apply_word(["Zbar", "Z"], f, p)``
is Z(Zbar f).  A length-L word applied to an order-K jet leaves an order
K - L jet.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import NotContact, NotPositive, OrderError, SingularError
from .expr import Expr
from .group import HeisMap, Point
from .jets import Jet, jet_eval, jet_seed
from .tolerance import DEFAULT_TOLERANCE, Residual, Tolerance


logger = logging.getLogger(__name__)

LETTERS = ("X", "Y", "T", "Z", "Zbar")
COMPONENTS = ("f1", "f2", "f3", "F", "Fbar")


def scalar(value: Any) -> float | complex:
    if np.iscomplexobj(value):
        return complex(value)
    return float(value)


def derive_jet(op: str, jet: Jet) -> Jet:
    """Apply one left-invariant field; the coefficients 2y, -2x enter as jets."""
    if op not in LETTERS:
        raise ValueError(f"unknown operator {op!r}; expected one of {LETTERS}")
    if jet.order < 1:
        raise OrderError(f"cannot apply {op} to an order-0 jet")
    dx, dy, dt = (jet.partial(axis) for axis in range(3))
    if op == "T":
        return dt
    x, y, _ = jet_seed(jet.base, jet.order - 1)
    xf = dx + 2.0 * (y * dt)
    yf = dy - 2.0 * (x * dt)
    if op == "X":
        return xf
    if op == "Y":
        return yf
    if op == "Z":
        return 0.5 * (xf - 1j * yf)
    return 0.5 * (xf + 1j * yf)


def apply_word_jet(word: Sequence[str], jet: Jet) -> Jet:
    if len(word) > jet.order:
        raise OrderError(
            f"word of length {len(word)} needs jet order >= {len(word)}, "
            f"got {jet.order}"
        )
    for op in word:
        jet = derive_jet(op, jet)
    return jet


def apply_word(
    word: Sequence[str],
    e: Expr,
    p: Sequence[float],
    order: int | None = None,
) -> float | complex:
    """Value at ``p`` of the iterated left-invariant derivative of ``e``."""
    order = len(word) if order is None else order
    if order < len(word):
        raise OrderError(f"word of length {len(word)} needs order >= {len(word)}")
    return scalar(apply_word_jet(word, jet_eval(e, Point.of(p), order)).value)


def sublaplacian_jet(jet: Jet) -> Jet:
    return apply_word_jet(("X", "X"), jet) + apply_word_jet(("Y", "Y"), jet)


def sublaplacian(e: Expr, p: Sequence[float]) -> float | complex:
    """Δ_H e(p) with Δ_H = X^2 + Y^2."""
    return scalar(sublaplacian_jet(jet_eval(e, Point.of(p), 2)).value)


def horizontal_gradient(e: Expr, p: Sequence[float]) -> tuple[Any, Any]:
    jet = jet_eval(e, Point.of(p), 1)
    return scalar(derive_jet("X", jet).value), scalar(derive_jet("Y", jet).value)


class MapJets:
    """Jets of a map's components at one point, with cached word derivatives."""

    def __init__(self, f: HeisMap, p: Sequence[float], order: int):
        self.map = f
        self.point = Point.of(p)
        self.order = order
        self.f1, self.f2, self.f3 = f.jets(self.point, order)
        self._cache: dict[tuple[str, tuple[str, ...]], Jet] = {
            ("f1", ()): self.f1,
            ("f2", ()): self.f2,
            ("f3", ()): self.f3,
            ("F", ()): self.f1 + 1j * self.f2,
            ("Fbar", ()): self.f1 - 1j * self.f2,
        }
        self._lam: Jet | None = None

    def jet(self, component: str, word: str | Sequence[str] = ()) -> Jet:
        if component not in COMPONENTS:
            raise ValueError(f"unknown component {component!r}")
        key = (component, (word,) if isinstance(word, str) else tuple(word))
        if key not in self._cache:
            parent = self.jet(component, key[1][:-1])
            self._cache[key] = derive_jet(key[1][-1], parent)
        return self._cache[key]

    def value(self, component: str, word: str | Sequence[str] = ()) -> float | complex:
        return scalar(self.jet(component, word).value)

    def lam(self) -> Jet:
        """Jet of the horizontal Jacobian Xf1 Yf2 - Yf1 Xf2 (order K - 1)."""
        if self._lam is None:
            self._lam = self.jet("f1", "X") * self.jet("f2", "Y") - self.jet(
                "f1", "Y"
            ) * self.jet("f2", "X")
        return self._lam

    def image(self) -> Point:
        return Point(float(self.f1.value), float(self.f2.value), float(self.f3.value))


@dataclass(frozen=True)
class ContactAssessment:
    point: Point
    dh: tuple[tuple[float, float], tuple[float, float]]
    lam: float
    r1: float
    r2: float
    r_z: complex
    zf: complex
    zbar_f: complex
    mu: complex | None
    k: float
    orientation: int
    vertical_jacobian: float
    scale: float

    @property
    def contact_residual(self) -> float:
        return max(abs(self.r1), abs(self.r2))

    def is_contact(self, tolerance: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return tolerance.small(self.contact_residual, self.scale)

    def is_conformal(self, tolerance: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return self.is_contact(tolerance) and tolerance.small(
            self.zbar_f, abs(self.zf) + abs(self.zbar_f)
        )

    def beltrami(self) -> complex:
        if self.mu is None:
            raise SingularError(f"ZF = 0 at {tuple(self.point)}; μ_f undefined")
        return self.mu

    def to_json(self) -> dict[str, Any]:
        return {
            "point": list(self.point),
            "dh": [list(row) for row in self.dh],
            "lambda": self.lam,
            "contact_residuals": [self.r1, self.r2],
            "r_z": [self.r_z.real, self.r_z.imag],
            "zf": [self.zf.real, self.zf.imag],
            "zbar_f": [self.zbar_f.real, self.zbar_f.imag],
            "mu": None if self.mu is None else [self.mu.real, self.mu.imag],
            "k": self.k,
            "orientation": self.orientation,
            "vertical_jacobian": self.vertical_jacobian,
        }


# Coefficient c in Zf3 = c (f2 Zf1 - f1 Zf2); ledger entry "complex_contact".
COMPLEX_CONTACT_FACTOR = 2.0


def assess_jets(
    mj: MapJets, tolerance: Tolerance = DEFAULT_TOLERANCE
) -> ContactAssessment:
    f1, f2 = float(mj.f1.value), float(mj.f2.value)
    xf1, yf1 = mj.value("f1", "X"), mj.value("f1", "Y")
    xf2, yf2 = mj.value("f2", "X"), mj.value("f2", "Y")
    xf3, yf3 = mj.value("f3", "X"), mj.value("f3", "Y")
    tf1, tf2, tf3 = (mj.value(c, "T") for c in ("f1", "f2", "f3"))
    r1 = xf3 - 2.0 * f2 * xf1 + 2.0 * f1 * xf2
    r2 = yf3 - 2.0 * f2 * yf1 + 2.0 * f1 * yf2
    zf1, zf2, zf3 = (mj.value(c, "Z") for c in ("f1", "f2", "f3"))
    r_z = zf3 - COMPLEX_CONTACT_FACTOR * (f2 * zf1 - f1 * zf2)
    zf = complex(mj.value("F", "Z"))
    zbar_f = complex(mj.value("F", "Zbar"))
    lam = xf1 * yf2 - yf1 * xf2
    scale = max(
        abs(xf3) + 2.0 * abs(f2 * xf1) + 2.0 * abs(f1 * xf2),
        abs(yf3) + 2.0 * abs(f2 * yf1) + 2.0 * abs(f1 * yf2),
    )
    if abs(zf) > tolerance.abs:
        mu: complex | None = zbar_f / zf
        k = (1.0 + abs(mu)) / (1.0 - abs(mu)) if abs(mu) < 1.0 else float("inf")
    else:
        # K_f = 1 at nonregular points.
        mu, k = None, 1.0
    return ContactAssessment(
        point=mj.point,
        dh=((xf1, yf1), (xf2, yf2)),
        lam=lam,
        r1=r1,
        r2=r2,
        r_z=complex(r_z),
        zf=zf,
        zbar_f=zbar_f,
        mu=mu,
        k=k,
        orientation=int(np.sign(lam)),
        vertical_jacobian=tf3 - 2.0 * f2 * tf1 + 2.0 * f1 * tf2,
        scale=scale,
    )


def assess_contact(
    f: HeisMap, p: Sequence[float], tolerance: Tolerance = DEFAULT_TOLERANCE
) -> ContactAssessment:
    return assess_jets(MapJets(f, p, 1), tolerance)


def require_contact(
    mj: MapJets,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
    positive: bool = False,
) -> ContactAssessment:
    assessment = assess_jets(mj, tolerance)
    if not assessment.is_contact(tolerance):
        raise NotContact(
            f"{mj.map.label} is not contact at {tuple(mj.point)}: "
            f"residual {assessment.contact_residual:.3e}"
        )
    if positive and not assessment.lam > 0:
        raise NotPositive(
            f"{mj.map.label} has λ_f = {assessment.lam:.6g} <= 0 at {tuple(mj.point)}"
        )
    return assessment


def chain_rule_residual(
    f: HeisMap, g: HeisMap, letter: str, p: Sequence[float]
) -> Residual:
    """V(F∘g) - [(ZF∘g) VG + (Zbar F∘g) V conj(G)] for horizontal V."""
    if letter not in ("X", "Y", "Z", "Zbar"):
        raise ValueError(f"chain rule needs a horizontal field, got {letter!r}")
    lhs = MapJets(f.compose(g), p, 1).value("F", [letter])
    inner = MapJets(g, p, 1)
    outer = MapJets(f, inner.image(), 1)
    zf, zbar_f = outer.value("F", "Z"), outer.value("F", "Zbar")
    vg, vg_bar = inner.value("F", [letter]), inner.value("Fbar", [letter])
    rhs = zf * vg + zbar_f * vg_bar
    return Residual(lhs - rhs, abs(lhs) + abs(zf * vg) + abs(zbar_f * vg_bar))


def jacobian_product_residual(
    f: HeisMap, g: HeisMap, p: Sequence[float]
) -> Residual:
    """λ_{f∘g} - (λ_f∘g) λ_g."""
    inner = MapJets(g, p, 1)
    lhs = float(MapJets(f.compose(g), p, 1).lam().value)
    lam_f = float(MapJets(f, inner.image(), 1).lam().value)
    lam_g = float(inner.lam().value)
    return Residual(lhs - lam_f * lam_g, abs(lhs) + abs(lam_f * lam_g))
