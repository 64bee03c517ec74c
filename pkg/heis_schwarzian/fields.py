"""Contact and conformal vector fields, their flows and pushforward potentials."""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields as dataclass_fields
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import BadPotential, SingularError
from .expr import COORDS, Expr, wrap
from .group import HeisMap, Point
from .horizontal import (
    ContactAssessment,
    MapJets,
    apply_word,
    derive_jet,
    require_contact,
)
from .schwarzian import schwarzian_values
from .tolerance import DEFAULT_TOLERANCE, Tolerance


logger = logging.getLogger(__name__)


class ContactVF:
    """V = v1 X + v2 Y - 4 v0 T with v1 = Y v0 and v2 = -X v0."""

    def __init__(self, v0: Expr, label: str = ""):
        self.v0 = wrap(v0)
        self.label = label or f"V[{self.v0}]"
        dt = self.v0.diff("t")
        x, y, _ = COORDS
        self.v1 = self.v0.diff("y") - 2 * x * dt
        self.v2 = -(self.v0.diff("x") + 2 * y * dt)
        self._t_component = 2 * y * self.v1 - 2 * x * self.v2 - 4 * self.v0

    def coordinate_field(self, p: Sequence[float]) -> np.ndarray:
        """Components along ∂x, ∂y, ∂t at ``p``."""
        env = {"x": float(p[0]), "y": float(p[1]), "t": float(p[2])}
        values = (
            self.v1.evaluate(env),
            self.v2.evaluate(env),
            self._t_component.evaluate(env),
        )
        return np.real(np.array(values, dtype=complex))

    def __repr__(self) -> str:
        return f"ContactVF({self.label})"


@dataclass(frozen=True)
class ConformalVFCoeffs:
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    c4: float = 0.0
    c5: float = 0.0
    c6: float = 0.0
    c7: float = 0.0
    c8: float = 0.0

    @classmethod
    def of(cls, values: Sequence[float]) -> "ConformalVFCoeffs":
        if len(values) != 8:
            raise ValueError(f"a conformal field needs 8 coefficients, got {len(values)}")
        return cls(*(float(v) for v in values))

    @classmethod
    def unit(cls, index: int) -> "ConformalVFCoeffs":
        if not 1 <= index <= 8:
            raise ValueError(f"coefficient index must be 1..8, got {index}")
        values = [0.0] * 8
        values[index - 1] = 1.0
        return cls.of(values)

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in dataclass_fields(self))


def _potential_basis(x: Any, y: Any, t: Any) -> tuple[Any, ...]:
    r2 = x * x + y * y
    return (
        r2 * r2 + t * t,
        t * y - x * r2,
        t * x + y * r2,
        r2,
        x,
        y,
        t,
        1,
    )


def conformal_v0(c: ConformalVFCoeffs) -> Expr:
    """The eight-parameter polynomial potential of a conformal field."""
    total: Expr = wrap(0)
    for coefficient, term in zip(c.as_tuple(), _potential_basis(*COORDS)):
        if coefficient:
            total = total + coefficient * wrap(term)
    return total


@dataclass(frozen=True)
class ConformalResidual:
    z2: complex
    xx_minus_yy: float
    xy_plus_yx: float

    @property
    def from_real_pair(self) -> complex:
        """¼[(X² - Y²) - i(XY + YX)] v0, which equals Z²v0."""
        return 0.25 * complex(self.xx_minus_yy, -self.xy_plus_yx)

    def vanishes(self, tolerance: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return tolerance.small(self.z2) and tolerance.small(
            abs(self.xx_minus_yy) + abs(self.xy_plus_yx)
        )


def conformal_residual(v0: Expr, p: Sequence[float]) -> ConformalResidual:
    xx = apply_word(("X", "X"), v0, p)
    yy = apply_word(("Y", "Y"), v0, p)
    xy = apply_word(("Y", "X"), v0, p)
    yx = apply_word(("X", "Y"), v0, p)
    return ConformalResidual(
        z2=complex(apply_word(("Z", "Z"), v0, p)),
        xx_minus_yy=float(np.real(xx - yy)),
        xy_plus_yx=float(np.real(xy + yx)),
    )


PUSHFORWARD_CASES = tuple(range(1, 9))
# Cases 1, 2, 3 and 7 are implied by the primary four.
PRIMARY_PUSHFORWARD_CASES = (4, 5, 6, 8)
REDUNDANT_PUSHFORWARD_CASES = (1, 2, 3, 7)


def _pushforward_jets(
    f: HeisMap, p: Sequence[float], tolerance: Tolerance
) -> tuple[MapJets, list[Any]]:
    mj = MapJets(f, p, 3)
    require_contact(mj, tolerance)
    lam = mj.lam()
    if lam.value == 0:
        raise SingularError(f"λ_f = 0 at {tuple(mj.point)}")
    inverse = 1.0 / lam
    terms = _potential_basis(mj.f1, mj.f2, mj.f3)
    return mj, [inverse * term for term in terms]


def pushforward_w0(
    f: HeisMap,
    case: int,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> complex:
    """w0 = λ_f⁻¹ v0∘f for the fundamental potential ``case`` (1..8)."""
    if case not in PUSHFORWARD_CASES:
        raise ValueError(f"pushforward case must be 1..8, got {case}")
    _, potentials = _pushforward_jets(f, p, tolerance)
    return complex(potentials[case - 1].value)


def pushforward_residuals(
    f: HeisMap, p: Sequence[float], tolerance: Tolerance = DEFAULT_TOLERANCE
) -> dict[int, complex]:
    """Z²w0 for every fundamental case."""
    _, potentials = _pushforward_jets(f, p, tolerance)
    return {
        case: complex(derive_jet("Z", derive_jet("Z", w0)).value)
        for case, w0 in zip(PUSHFORWARD_CASES, potentials)
    }


def antiholomorphic_product(f: HeisMap, p: Sequence[float]) -> complex:
    """ZF · Z(F̄)."""
    mj = MapJets(f, p, 1)
    return complex(mj.value("F", "Z")) * complex(mj.value("Fbar", "Z"))


# Flows.


def _check_potential(h: Expr) -> None:
    extra = h.variables() - {"x"}
    if not extra:
        return
    rng = np.random.default_rng(0)
    for _ in range(5):
        x, y, t = rng.uniform(-1.0, 1.0, size=3)
        env = {"x": float(x), "y": float(y), "t": float(t)}
        for name in sorted(extra):
            if abs(h.diff(name).evaluate(env)) > 1e-12:
                raise BadPotential(f"flow potential {h} depends on {name}")


def flow_closed_form(h: Expr, s: float) -> HeisMap:
    """Time-s map (z - i s h'(x), t + s(2x h'(x) - 4h(x))) of the field with v0 = h."""
    h = wrap(h)
    _check_potential(h)
    x, y, t = COORDS
    dh = h.diff("x")
    return HeisMap(
        x,
        y - s * dh,
        t + s * (2 * x * dh - 4 * h),
        label=f"flow(h={h},s={s:g})",
    )


def _rk4_step(vf: ContactVF, y0: np.ndarray, step: float) -> np.ndarray:
    k = np.empty((4, 3))
    k[0] = vf.coordinate_field(y0)
    k[1] = vf.coordinate_field(y0 + 0.5 * step * k[0])
    k[2] = vf.coordinate_field(y0 + 0.5 * step * k[1])
    k[3] = vf.coordinate_field(y0 + step * k[2])
    return y0 + step * (k[0] / 6 + k[1] / 3 + k[2] / 3 + k[3] / 6)


def flow_integrate(
    vf: ContactVF, p: Sequence[float], s: float, steps: int = 64
) -> Point:
    """Classical RK4 on ṗ = V(p) with a fixed number of steps."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    state = np.array(Point.of(p), dtype=float)
    if s == 0:
        return Point(*state)
    step = float(s) / steps
    for _ in range(steps):
        state = _rk4_step(vf, state, step)
    return Point(*(float(c) for c in state))


class TabulatedFlowMap:
    """Time-s map of a contact field by integration, differentiated by central differences."""

    def __init__(
        self, vf: ContactVF, s: float, steps: int = 64, h: float = 1e-5
    ):
        if h <= 0:
            raise ValueError(f"difference step must be positive, got {h}")
        self.vf = vf
        self.s = float(s)
        self.steps = steps
        self.h = h
        self.label = f"{vf.label}@s={self.s:g}"

    def at(self, p: Sequence[float]) -> Point:
        return flow_integrate(self.vf, p, self.s, self.steps)

    def jacobian(self, p: Sequence[float]) -> np.ndarray:
        """3x3 matrix of ∂f_i/∂(x, y, t)."""
        base = np.array(Point.of(p), dtype=float)
        columns = []
        for axis in range(3):
            offset = np.zeros(3)
            offset[axis] = self.h
            ahead = np.array(self.at(base + offset))
            behind = np.array(self.at(base - offset))
            columns.append((ahead - behind) / (2.0 * self.h))
        return np.column_stack(columns)

    def assess(
        self, p: Sequence[float], tolerance: Tolerance = Tolerance(rel=1e-6, abs=1e-6)
    ) -> ContactAssessment:
        point = Point.of(p)
        f1, f2, f3 = self.at(point)
        d = self.jacobian(point)
        # Rows f1, f2, f3; X = ∂x + 2y ∂t, Y = ∂y - 2x ∂t, T = ∂t.
        xf = d[:, 0] + 2.0 * point.y * d[:, 2]
        yf = d[:, 1] - 2.0 * point.x * d[:, 2]
        tf = d[:, 2]
        zf_comp = 0.5 * (xf - 1j * yf)
        zbar_comp = 0.5 * (xf + 1j * yf)
        r1 = xf[2] - 2.0 * f2 * xf[0] + 2.0 * f1 * xf[1]
        r2 = yf[2] - 2.0 * f2 * yf[0] + 2.0 * f1 * yf[1]
        zf = complex(zf_comp[0] + 1j * zf_comp[1])
        zbar_f = complex(zbar_comp[0] + 1j * zbar_comp[1])
        lam = float(xf[0] * yf[1] - yf[0] * xf[1])
        mu = zbar_f / zf if abs(zf) > tolerance.abs else None
        k = 1.0 if mu is None else (
            (1.0 + abs(mu)) / (1.0 - abs(mu)) if abs(mu) < 1.0 else float("inf")
        )
        return ContactAssessment(
            point=point,
            dh=((float(xf[0]), float(yf[0])), (float(xf[1]), float(yf[1]))),
            lam=lam,
            r1=float(r1),
            r2=float(r2),
            r_z=complex(zf_comp[2] - 2.0 * (f2 * zf_comp[0] - f1 * zf_comp[1])),
            zf=zf,
            zbar_f=zbar_f,
            mu=mu,
            k=k,
            orientation=int(np.sign(lam)),
            vertical_jacobian=float(tf[2] - 2.0 * f2 * tf[0] + 2.0 * f1 * tf[1]),
            scale=float(
                np.max(np.abs(d)) * (1.0 + abs(f1) + abs(f2))
            ),
        )


def scl_flow_derivative(v0: Expr, p: Sequence[float]) -> complex:
    """d/ds S_CL(f_s) at s = 0, that is -2i Z³Z̄ v0."""
    return -2j * complex(apply_word(("Zbar", "Z", "Z", "Z"), v0, p))


TRAJECTORY_COLUMNS = (
    "s",
    "x",
    "y",
    "t",
    "lambda",
    "s_cr_re",
    "s_cr_im",
    "s_cl_re",
    "s_cl_im",
)


def trajectory_rows(
    h: Expr,
    s_values: Iterable[float],
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> list[dict[str, Any]]:
    """One row per s of the closed-form flow of v0 = h applied to ``p``."""
    rows = []
    for s in s_values:
        f = flow_closed_form(h, float(s))
        image = f.at(p)
        values = schwarzian_values(f, p, tolerance)
        row: dict[str, Any] = {
            "s": float(s),
            "x": image.x,
            "y": image.y,
            "t": image.t,
            "lambda": values.lam,
        }
        for name, value in (("s_cr", values.s_cr), ("s_cl", values.s_cl)):
            if value is None:
                row[f"{name}_re"] = row[f"{name}_im"] = "singular"
            else:
                row[f"{name}_re"] = value.real
                row[f"{name}_im"] = value.imag
        rows.append(row)
    return rows

