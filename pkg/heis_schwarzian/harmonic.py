"""Subelliptic harmonic polynomials, gradient harmonic maps and their identity battery."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np
import sympy

from .errors import NotContact, NotHarmonic, NotPolynomial
from .exact import (
    RatPoly,
    apply_word_exact,
    graded_kernel,
    fit_constant,
    in_span,
    sublaplacian_exact,
)
from .expr import COORDS, Expr, wrap
from .group import HeisMap, Point, contact_form, curve_tangent, koranyi_norm, radial_curve
from .horizontal import (
    MapJets,
    apply_word_jet,
    assess_jets,
    derive_jet,
    sublaplacian_jet,
)
from .jets import Jet, jet_eval
from .tolerance import DEFAULT_TOLERANCE, Tolerance


logger = logging.getLogger(__name__)

# Δ_H f1 = 8 T f2 and Δ_H f2 = -8 T f1 for f = (Xu, Yu, Tu).
HARMONIC_SYSTEM_CONSTANT = 8
# Δ_H Δ_H f_i = -64 T² f_i.
BILAPLACE_CONSTANT = -64
# ½Δ_H|∇_H u|² = ‖Hess_H u‖² + κ (Xu TYu - Yu TXu).
BOCHNER_CONSTANT = 8
# Tf3 - 2f2 Tf1 + 2f1 Tf2 = T²u + c (Xu TYu - Yu TXu).
GROWTH_JACOBIAN_CONSTANT = 2


@dataclass(frozen=True)
class HarmonicBasis:
    degree: int
    basis: tuple[RatPoly, ...]

    def __len__(self) -> int:
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def contains(self, p: RatPoly | Expr | str) -> bool:
        poly = p if isinstance(p, RatPoly) else RatPoly.from_expr(p)
        return in_span(poly, self.basis)


def harmonic_poly_basis(degree: int) -> HarmonicBasis:
    """Exact kernel of Δ_H on polynomials of weighted degree <= ``degree``."""
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    basis = graded_kernel(sublaplacian_exact, degree)
    logger.debug("harmonic polynomials up to degree %d: %d", degree, len(basis))
    return HarmonicBasis(degree, tuple(basis))


def gradient_exprs(u: Expr) -> tuple[Expr, Expr, Expr]:
    """(Xu, Yu, Tu) as expressions."""
    x, y, _ = COORDS
    ut = u.diff("t")
    return (u.diff("x") + 2 * y * ut, u.diff("y") - 2 * x * ut, ut)


def gradient_exact(u: RatPoly) -> tuple[RatPoly, RatPoly, RatPoly]:
    return tuple(u.derive(op) for op in ("X", "Y", "T"))  # type: ignore[return-value]


@dataclass(frozen=True)
class GradientHarmonicMap:
    u: Expr
    map: HeisMap
    exact: RatPoly | None = None

    @property
    def F(self) -> Expr:
        return self.map.F

    def u_jet(self, p: Sequence[float], order: int) -> Jet:
        return jet_eval(self.u, Point.of(p), order)


def _sample_points(count: int = 8) -> list[Point]:
    rng = np.random.default_rng(12345)
    return [Point(*rng.uniform(-1.0, 1.0, size=3)) for _ in range(count)]


def gradient_harmonic(
    u: Expr | str, tolerance: Tolerance = DEFAULT_TOLERANCE
) -> GradientHarmonicMap:
    """f = (Xu, Yu, Tu) for a Δ_H-harmonic u."""
    if isinstance(u, str):
        exact = RatPoly.from_expr(u)
        u = exact.to_expr()
    else:
        u = wrap(u)
        try:
            exact = RatPoly.from_expr(u)
        except NotPolynomial:
            exact = None
    if exact is not None:
        laplacian = sublaplacian_exact(exact)
        if not laplacian.is_zero:
            raise NotHarmonic(f"Δ_H u = {laplacian} for u = {exact}")
    else:
        for p in _sample_points():
            value = sublaplacian_jet(jet_eval(u, p, 2)).value
            if abs(value) > tolerance.abs:
                raise NotHarmonic(f"Δ_H u = {value:.3e} at {tuple(p)} for u = {u}")
    f1, f2, f3 = gradient_exprs(u)
    return GradientHarmonicMap(
        u=u,
        map=HeisMap(f1, f2, f3, label=f"grad({u})", contact_checked=False),
        exact=exact,
    )


@dataclass(frozen=True)
class HarmonicSystemResiduals:
    r1: float
    r2: float
    r3: float
    rb1: float
    rb2: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.r1, self.r2, self.r3, self.rb1, self.rb2)


def harmonic_system_residuals(
    m: GradientHarmonicMap, p: Sequence[float]
) -> HarmonicSystemResiduals:
    """Δ_H f1 - 8Tf2, Δ_H f2 + 8Tf1, Δ_H f3, and the bi-Laplace residuals."""
    u = m.u_jet(p, 5)
    f1, f2, f3 = (derive_jet(op, u) for op in ("X", "Y", "T"))
    lap1, lap2, lap3 = (sublaplacian_jet(f) for f in (f1, f2, f3))
    c, b = HARMONIC_SYSTEM_CONSTANT, BILAPLACE_CONSTANT
    return HarmonicSystemResiduals(
        r1=float(lap1.value - c * derive_jet("T", f2).value),
        r2=float(lap2.value + c * derive_jet("T", f1).value),
        r3=float(lap3.value),
        rb1=float(
            sublaplacian_jet(lap1).value
            - b * apply_word_jet(("T", "T"), f1).value
        ),
        rb2=float(
            sublaplacian_jet(lap2).value
            - b * apply_word_jet(("T", "T"), f2).value
        ),
    )


def harmonic_system_exact(u: RatPoly) -> tuple[RatPoly, ...]:
    """Exact counterparts of the five harmonic-system residuals."""
    f1, f2, f3 = gradient_exact(u)
    lap1, lap2 = sublaplacian_exact(f1), sublaplacian_exact(f2)
    c, b = HARMONIC_SYSTEM_CONSTANT, BILAPLACE_CONSTANT
    return (
        lap1 - f2.derive("T") * c,
        lap2 + f1.derive("T") * c,
        sublaplacian_exact(f3),
        sublaplacian_exact(lap1) - apply_word_exact(("T", "T"), f1) * b,
        sublaplacian_exact(lap2) - apply_word_exact(("T", "T"), f2) * b,
    )


@dataclass(frozen=True)
class HessianReport:
    det_hess: float
    det_hess_sym: float
    jacobian: float
    gap: float


def hessian_report(u: Expr, p: Sequence[float]) -> HessianReport:
    """det Hess_H u, its symmetrized version, J_F of (Xu, Yu, Tu) and J_F - det Hess*."""
    jet = jet_eval(u, Point.of(p), 2)
    xx = float(apply_word_jet(("X", "X"), jet).value)
    yy = float(apply_word_jet(("Y", "Y"), jet).value)
    yx = float(apply_word_jet(("X", "Y"), jet).value)  # Y(Xu)
    xy = float(apply_word_jet(("Y", "X"), jet).value)  # X(Yu)
    f1, f2, f3 = gradient_exprs(wrap(u))
    lam = float(MapJets(HeisMap(f1, f2, f3), p, 1).lam().value)
    det_sym = xx * yy - 0.25 * (xy + yx) ** 2
    return HessianReport(
        det_hess=xx * yy - yx * xy,
        det_hess_sym=det_sym,
        jacobian=lam,
        gap=lam - det_sym,
    )


def _geometric_jet(u: Jet) -> Jet:
    """Xu TYu - Yu TXu."""
    xu, yu = derive_jet("X", u), derive_jet("Y", u)
    return xu * derive_jet("T", yu) - yu * derive_jet("T", xu)


@dataclass(frozen=True)
class BochnerTerms:
    half_laplacian: float
    hessian_norm2: float
    geometric: float

    def residual(self, kappa: float = BOCHNER_CONSTANT) -> float:
        return self.half_laplacian - self.hessian_norm2 - kappa * self.geometric


def bochner_terms(u: Expr, p: Sequence[float]) -> BochnerTerms:
    jet = jet_eval(u, Point.of(p), 3)
    xu, yu = derive_jet("X", jet), derive_jet("Y", jet)
    grad2 = xu * xu + yu * yu
    hess = [
        derive_jet(op, first).value for first in (xu, yu) for op in ("X", "Y")
    ]
    return BochnerTerms(
        half_laplacian=0.5 * float(sublaplacian_jet(grad2).value),
        hessian_norm2=float(sum(h * h for h in hess)),
        geometric=float(_geometric_jet(jet).value),
    )


def bochner_residual(
    u: Expr, p: Sequence[float], kappa: float = BOCHNER_CONSTANT
) -> float:
    return bochner_terms(u, p).residual(kappa)


def bochner_exact(u: RatPoly) -> tuple[RatPoly, RatPoly]:
    """(½Δ_H|∇_H u|² - ‖Hess_H u‖², Xu TYu - Yu TXu) as exact polynomials."""
    xu, yu = u.derive("X"), u.derive("Y")
    hess = [first.derive(op) for first in (xu, yu) for op in ("X", "Y")]
    lhs = sublaplacian_exact(xu * xu + yu * yu) * sympy.Rational(1, 2) - sum(
        (h * h for h in hess), RatPoly()
    )
    return lhs, xu * yu.derive("T") - yu * xu.derive("T")


def determine_kappa(degree: int = 5) -> Any:
    """Exact Bochner constant fitted over the harmonic basis."""
    basis = harmonic_poly_basis(degree)
    return fit_constant("bochner", (bochner_exact(u) for u in basis))


def vertical_jacobian_exact(f: Sequence[RatPoly]) -> RatPoly:
    f1, f2, f3 = f
    return f3.derive("T") - f2 * f1.derive("T") * 2 + f1 * f2.derive("T") * 2


def horizontal_jacobian_exact(f: Sequence[RatPoly]) -> RatPoly:
    f1, f2, _ = f
    return f1.derive("X") * f2.derive("Y") - f1.derive("Y") * f2.derive("X")


# Sign scans.


def _nonpositive(value: float, scale: float, tolerance: Tolerance) -> bool:
    return value <= tolerance.bound(scale)


def _nonnegative(value: float, scale: float, tolerance: Tolerance) -> bool:
    return value >= -tolerance.bound(scale)


# Claims whose conclusion must hold wherever the hypothesis does.
ENFORCED_CLAIMS = (
    "lemma_log_zf",
    "lemma_zf",
    "gradient_zf_subharmonic",
    "gradient_log_zf_superharmonic",
    "contact_harmonic_cond1",
    "gradient_geometric_laplacian",
    "corollary_gradient_norm",
)
# Reported with their counts only.
REPORTED_CLAIMS = (
    "contact_harmonic_cond2",
    "contact_harmonic_cond3",
    "contact_harmonic_cond4",
)

SIGN_COLUMNS = (
    "x",
    "y",
    "t",
    "zf_abs2",
    "lap_zf_abs2",
    "lap_log_zf_abs2",
    "jacobian",
    "lap_jacobian",
    "lap_log_jacobian",
    "geometric",
    "lap_grad_u2",
    "qc",
)


@dataclass
class SignReport:
    label: str
    points: list[dict[str, Any]] = field(default_factory=list)
    hypothesis_counts: dict[str, int] = field(
        default_factory=lambda: {c: 0 for c in ENFORCED_CLAIMS + REPORTED_CLAIMS}
    )
    violation_counts: dict[str, int] = field(
        default_factory=lambda: {c: 0 for c in ENFORCED_CLAIMS + REPORTED_CLAIMS}
    )
    first_violation: dict[str, Any] | None = None

    def record(
        self, claim: str, hypothesis: bool, conclusion: bool, point: Point
    ) -> None:
        if not hypothesis:
            return
        self.hypothesis_counts[claim] += 1
        if conclusion:
            return
        self.violation_counts[claim] += 1
        if claim in ENFORCED_CLAIMS and self.first_violation is None:
            self.first_violation = {"claim": claim, "point": list(point)}

    @property
    def violations(self) -> int:
        return sum(self.violation_counts[c] for c in ENFORCED_CLAIMS)

    def rows(self) -> list[dict[str, Any]]:
        return [{column: row.get(column, "") for column in SIGN_COLUMNS} for row in self.points]

    def summary(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "points": len(self.points),
            "singular_points": sum(1 for row in self.points if row.get("singular")),
            "hypothesis_counts": dict(self.hypothesis_counts),
            "violation_counts": dict(self.violation_counts),
            "enforced": list(ENFORCED_CLAIMS),
            "violations": self.violations,
            "first_violation": self.first_violation,
        }


def _grad(jet: Jet) -> tuple[Any, Any]:
    return derive_jet("X", jet).value, derive_jet("Y", jet).value


def _dot(a: tuple[Any, Any], b: tuple[Any, Any]) -> float:
    return float(np.real(a[0] * b[0] + a[1] * b[1]))


def _norm2(a: tuple[Any, Any]) -> float:
    return _dot(a, a)


def _scan_point(
    report: SignReport,
    target: GradientHarmonicMap | HeisMap,
    p: Sequence[float],
    tolerance: Tolerance,
) -> dict[str, Any]:
    gradient = isinstance(target, GradientHarmonicMap)
    f = target.map if gradient else target
    point = Point.of(p)
    mj = MapJets(f, point, 3)
    row: dict[str, Any] = {"x": point.x, "y": point.y, "t": point.t}

    zf = mj.jet("F", "Z")
    zf_abs2 = (zf * zf.conj()).real()
    lap_zf = sublaplacian_jet(zf)
    lap_zf_abs2 = float(sublaplacian_jet(zf_abs2).value)
    zf0 = complex(zf.value)
    row["zf_abs2"] = float(zf_abs2.value)
    row["lap_zf_abs2"] = lap_zf_abs2
    pairing = float((zf0 * np.conj(lap_zf.value)).real)
    scale = 1.0 + abs(zf0) ** 2 + abs(zf0) * abs(lap_zf.value) + abs(lap_zf_abs2)

    report.record(
        "lemma_zf",
        _nonnegative(pairing, scale, tolerance),
        _nonnegative(lap_zf_abs2, scale, tolerance),
        point,
    )
    if abs(zf0) > tolerance.abs:
        lap_log = float(sublaplacian_jet(zf_abs2.log()).value)
        row["lap_log_zf_abs2"] = lap_log
        z2f = complex(mj.value("F", ("Z", "Z")))
        zbar_zf = complex(mj.value("F", ("Z", "Zbar")))
        second = float((np.conj(zf0) / zf0 * z2f * zbar_zf).real)
        log_scale = 1.0 + abs(lap_log)
        report.record(
            "lemma_log_zf",
            _nonpositive(pairing, scale, tolerance)
            and _nonnegative(second, 1.0 + abs(z2f * zbar_zf), tolerance),
            _nonpositive(lap_log, log_scale, tolerance),
            point,
        )
    else:
        row["lap_log_zf_abs2"] = "singular"
        row["singular"] = True
        lap_log = None

    lam = mj.lam()
    lam0 = float(lam.value)
    lap_lam = float(sublaplacian_jet(lam).value)
    row["jacobian"] = lam0
    row["lap_jacobian"] = lap_lam
    lap_log_lam = None
    if lam0 > tolerance.abs:
        lap_log_lam = float(sublaplacian_jet(lam.log()).value)
        row["lap_log_jacobian"] = lap_log_lam
    else:
        row["lap_log_jacobian"] = "undefined"

    if gradient:
        _scan_gradient(report, target, point, row, lap_zf_abs2, lap_log, scale, tolerance)
    else:
        _scan_contact_harmonic(report, mj, point, lap_lam, lap_log_lam, tolerance)
    report.points.append(row)
    return row


def _scan_gradient(
    report: SignReport,
    m: GradientHarmonicMap,
    point: Point,
    row: dict[str, Any],
    lap_zf_abs2: float,
    lap_log: float | None,
    scale: float,
    tolerance: Tolerance,
) -> None:
    report.record(
        "gradient_zf_subharmonic",
        True,
        _nonnegative(lap_zf_abs2, scale, tolerance),
        point,
    )
    if lap_log is not None:
        report.record(
            "gradient_log_zf_superharmonic",
            True,
            _nonpositive(lap_log, 1.0 + abs(lap_log), tolerance),
            point,
        )
    u = m.u_jet(point, 4)
    geometric = _geometric_jet(u)
    geo0 = float(geometric.value)
    row["geometric"] = geo0
    xu, yu = derive_jet("X", u), derive_jet("Y", u)
    lap_grad = float(sublaplacian_jet(xu * xu + yu * yu).value)
    row["lap_grad_u2"] = lap_grad
    report.record(
        "corollary_gradient_norm",
        _nonnegative(geo0, 1.0 + abs(geo0), tolerance),
        _nonnegative(lap_grad, 1.0 + abs(lap_grad), tolerance),
        point,
    )
    f1, f2, f3 = (derive_jet(op, u) for op in ("X", "Y", "T"))
    vertical = (
        derive_jet("T", f3)
        - 2.0 * (f2 * derive_jet("T", f1))
        + 2.0 * (f1 * derive_jet("T", f2))
    )
    lap_vertical = float(sublaplacian_jet(vertical).value)
    lap_geo = float(sublaplacian_jet(geometric).value)
    report.record(
        "gradient_geometric_laplacian",
        _nonpositive(lap_geo, 1.0 + abs(lap_geo), tolerance),
        _nonpositive(lap_vertical, 1.0 + abs(lap_geo), tolerance),
        point,
    )
    row["qc"] = qc_equivalence(m, point, tolerance)["status"]


def _scan_contact_harmonic(
    report: SignReport,
    mj: MapJets,
    point: Point,
    lap_lam: float,
    lap_log_lam: float | None,
    tolerance: Tolerance,
) -> None:
    assessment = assess_jets(mj, tolerance)
    lap_f1 = sublaplacian_jet(mj.f1).value
    lap_f2 = sublaplacian_jet(mj.f2).value
    harmonic = tolerance.small(lap_f1, 1.0) and tolerance.small(lap_f2, 1.0)
    if not (harmonic and assessment.is_contact(tolerance) and assessment.lam >= 0):
        return
    g1, g2 = _grad(mj.f1), _grad(mj.f2)
    gt1, gt2 = _grad(mj.jet("f1", "T")), _grad(mj.jet("f2", "T"))
    n1, n2, nt1, nt2 = (math.sqrt(_norm2(g)) for g in (g1, g2, gt1, gt2))
    conditions = {
        "contact_harmonic_cond1": _dot(g1, gt2) <= _dot(g2, gt1),
        "contact_harmonic_cond2": n1**2 + nt2**2 <= n2**2 + nt1**2,
        "contact_harmonic_cond3": n1 <= n2 and nt2 <= nt1,
        "contact_harmonic_cond4": n1 <= nt1 and nt2 <= n2,
    }
    scale = 1.0 + abs(lap_lam)
    conclusion = _nonpositive(lap_lam, scale, tolerance) and (
        lap_log_lam is None
        or _nonpositive(lap_log_lam, 1.0 + abs(lap_log_lam), tolerance)
    )
    for claim, hypothesis in conditions.items():
        report.record(claim, hypothesis, conclusion, point)


def subharmonicity_scan(
    target: GradientHarmonicMap | HeisMap,
    points: Iterable[Sequence[float]],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> SignReport:
    """Signs of Δ_H|ZF|², Δ_H ln|ZF|², Δ_H J_F and Δ_H|∇_H u|² with hypothesis flags."""
    label = target.map.label if isinstance(target, GradientHarmonicMap) else target.label
    report = SignReport(label)
    for p in points:
        _scan_point(report, target, p, tolerance)
    logger.debug(
        "%s: %d points, %d violations", label, len(report.points), report.violations
    )
    return report


def qc_equivalence(
    m: GradientHarmonicMap, p: Sequence[float], tolerance: Tolerance = DEFAULT_TOLERANCE
) -> dict[str, Any]:
    """|μ_f| < 1 exactly where det Hess_H u > 0; |J_F| within tolerance is borderline."""
    mj = MapJets(m.map, p, 1)
    zf = complex(mj.value("F", "Z"))
    zbar_f = complex(mj.value("F", "Zbar"))
    det = hessian_report(m.u, p).det_hess
    mu_abs = abs(zbar_f) / abs(zf) if abs(zf) > tolerance.abs else math.inf
    scale = abs(zf) ** 2 + abs(zbar_f) ** 2
    if tolerance.small(det, scale):
        status = "borderline"
    elif (mu_abs < 1.0) == (det > 0.0):
        status = "ok"
    else:
        status = "violation"
    return {"mu_abs": mu_abs, "det_hess": det, "status": status}


# Growth-bound ingredients.


GROWTH_COLUMNS = (
    "r",
    "x",
    "y",
    "t",
    "norm",
    "weighted_pf",
    "jacobian",
    "vertical_jacobian",
    "t2u",
    "geometric",
    "hypothesis",
    "stated_hypothesis",
    "bound_holds",
)


@dataclass
class GrowthReport:
    label: str
    alpha: float
    points: list[dict[str, Any]] = field(default_factory=list)
    curve_norm_error: float = 0.0
    horizontality_error: float = 0.0

    def rows(self) -> list[dict[str, Any]]:
        return [{c: row.get(c, "") for c in GROWTH_COLUMNS} for row in self.points]

    @property
    def weighted_sup(self) -> float:
        values = [
            row["weighted_pf"]
            for row in self.points
            if isinstance(row.get("weighted_pf"), float)
        ]
        return max(values, default=0.0)

    @property
    def bound_failures(self) -> int:
        return sum(1 for row in self.points if row["bound_holds"] is False)

    def summary(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "alpha": self.alpha,
            "points": len(self.points),
            "weighted_sup": self.weighted_sup,
            "hypothesis_points": sum(1 for row in self.points if row["hypothesis"]),
            "stated_hypothesis_points": sum(
                1 for row in self.points if row["stated_hypothesis"]
            ),
            "nonpositive_jacobian": sum(1 for row in self.points if row["jacobian"] <= 0),
            "bound_failures": self.bound_failures,
            "curve_norm_error": self.curve_norm_error,
            "horizontality_error": self.horizontality_error,
        }


def growth_ingredients(
    m: GradientHarmonicMap,
    p: Sequence[float],
    r_values: Iterable[float],
    alpha: float = 1.0,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> GrowthReport:
    """Radial-curve samples of |Pf|(1 - N⁴)^α and the bound J_F <= T²u.

    Where Xu TYu - Yu TXu <= 0 the vertical Jacobian is at most T²u; the
    opposite sign condition is counted separately as ``stated_hypothesis``.
    """
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    base = Point.of(p)
    base_norm = koranyi_norm(base)
    report = GrowthReport(m.map.label, float(alpha))
    for r in r_values:
        q = radial_curve(float(r), base)
        norm = koranyi_norm(q)
        report.curve_norm_error = max(
            report.curve_norm_error, abs(norm - float(r) * base_norm)
        )
        tangent = curve_tangent(float(r), base)
        report.horizontality_error = max(
            report.horizontality_error, abs(contact_form(q, tangent))
        )
        u = m.u_jet(q, 3)
        f1, f2, f3 = (derive_jet(op, u) for op in ("X", "Y", "T"))
        vertical = float(
            (
                derive_jet("T", f3)
                - 2.0 * (f2 * derive_jet("T", f1))
                + 2.0 * (f1 * derive_jet("T", f2))
            ).value
        )
        t2u = float(apply_word_jet(("T", "T"), u).value)
        geometric = float(_geometric_jet(u).value)
        mj = MapJets(m.map, q, 2)
        lam = float(mj.lam().value)
        weighted: Any = "undefined"
        if lam > 0 and norm < 1.0:
            pf = derive_jet("Z", mj.lam().log()).value
            weighted = float(abs(pf) * (1.0 - norm**4) ** alpha)
        hypothesis = geometric <= 0.0
        report.points.append(
            {
                "r": float(r),
                "x": q.x,
                "y": q.y,
                "t": q.t,
                "norm": norm,
                "weighted_pf": weighted,
                "jacobian": lam,
                "vertical_jacobian": vertical,
                "t2u": t2u,
                "geometric": geometric,
                "hypothesis": hypothesis,
                "stated_hypothesis": geometric >= 0.0,
                "bound_holds": (
                    vertical <= t2u + tolerance.bound(abs(t2u)) if hypothesis else None
                ),
            }
        )
    return report


# Harmonic contact maps.


def contact_harmonic_closure(f: HeisMap) -> RatPoly:
    """Δ_H f3 for a polynomial contact map with Δ_H f1 = Δ_H f2 = 0."""
    f1, f2, f3 = (RatPoly.from_expr(c) for c in f.components)
    for name, component in (("f1", f1), ("f2", f2)):
        laplacian = sublaplacian_exact(component)
        if not laplacian.is_zero:
            raise NotHarmonic(f"Δ_H {name} = {laplacian}")
    for op in ("X", "Y"):
        residual = f3.derive(op) - f2 * f1.derive(op) * 2 + f1 * f2.derive(op) * 2
        if not residual.is_zero:
            raise NotContact(f"{f.label}: contact residual along {op} is {residual}")
    return sublaplacian_exact(f3)


def harmonic_jacobian_laplacian_residual(f: HeisMap, p: Sequence[float]) -> float:
    """Δ_H J_F - 4(∇f1·∇Tf2 - ∇f2·∇Tf1) with J_F = Tf3 - 2f2Tf1 + 2f1Tf2."""
    mj = MapJets(f, p, 3)
    tf1, tf2 = mj.jet("f1", "T"), mj.jet("f2", "T")
    vertical = mj.jet("f3", "T") - 2.0 * (mj.f2 * tf1) + 2.0 * (mj.f1 * tf2)
    lap = float(sublaplacian_jet(vertical).value)
    cross = _dot(_grad(mj.f1), _grad(tf2)) - _dot(_grad(mj.f2), _grad(tf1))
    return lap - 4.0 * cross
