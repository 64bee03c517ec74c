"""CR Schwarzian, classical-type Schwarzian, Preschwarzian and their composition rules."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .errors import NotHarmonic, NotPolynomial, NotPositive, OrderError, SingularError
from .exact import RatPoly
from .expr import Expr
from .group import ConformalWord, HeisMap, Point, koranyi_norm
from .horizontal import (
    MapJets,
    apply_word,
    assess_jets,
    derive_jet,
    require_contact,
    scalar,
)
from .jets import Jet
from .tolerance import DEFAULT_TOLERANCE, Residual, Tolerance


logger = logging.getLogger(__name__)

# S_CR = CR_TENSOR_SIGN * (Z²φ - 2(Zφ)²) with φ = ½ ln λ_f.
CR_TENSOR_SIGN = -1
# S_CR(ι∘α) = CLAIM3_CONSTANT * |G|² ZG ZḠ / N(α)⁴ for α in SL(2, R).
CLAIM3_CONSTANT = 6
# Coefficient of (ZḠ-type) Q·Z²F/ZF in the left cocycle of S_CL.
LEFT_COCYCLE_COEFFICIENT = 1


def as_map(f: HeisMap | ConformalWord) -> HeisMap:
    return f.to_map() if isinstance(f, ConformalWord) else f


def _phi(mj: MapJets) -> Jet:
    return 0.5 * mj.lam().log()


def _s_cr(mj: MapJets) -> complex:
    lam = mj.lam()
    second = derive_jet("Z", derive_jet("Z", 1.0 / lam))
    return complex(0.5 * lam.value * second.value)


def _tensor(phi: Jet) -> complex:
    z_phi = derive_jet("Z", phi)
    return complex(derive_jet("Z", z_phi).value - 2.0 * z_phi.value**2)


def _positive_jets(
    f: HeisMap, p: Sequence[float], order: int, tolerance: Tolerance
) -> MapJets:
    mj = MapJets(f, p, order)
    require_contact(mj, tolerance, positive=True)
    return mj


def s_cr(
    f: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> complex:
    """½ λ_f Z²(λ_f⁻¹) at ``p`` for a positively oriented contact map."""
    return _s_cr(_positive_jets(as_map(f), p, 3, tolerance))


def cr_coefficient(
    f: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> complex:
    """Z²φ - 2(Zφ)², the dz⊗dz coefficient of the Schwarzian tensor over two."""
    return _tensor(_phi(_positive_jets(as_map(f), p, 3, tolerance)))


def _cl(mj: MapJets, tolerance: Tolerance) -> tuple[complex, float]:
    z1 = complex(mj.value("F", "Z"))
    if abs(z1) <= tolerance.abs:
        raise SingularError(
            f"ZF = 0 at {tuple(mj.point)}; S_CL of {mj.map.label} undefined"
        )
    z2 = complex(mj.value("F", ("Z", "Z")))
    z3 = complex(mj.value("F", ("Z", "Z", "Z")))
    value = z3 / z1 - 1.5 * (z2 / z1) ** 2
    return value, abs(z3 / z1) + 1.5 * abs(z2 / z1) ** 2


def s_cl(
    f: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> complex:
    """Z³F/ZF - (3/2)(Z²F/ZF)² at ``p``."""
    mj = MapJets(as_map(f), p, 3)
    require_contact(mj, tolerance)
    return _cl(mj, tolerance)[0]


def _pf(mj: MapJets) -> complex:
    lam = mj.lam()
    if not lam.value > 0:
        raise NotPositive(
            f"J_F = {float(lam.value):.6g} <= 0 at {tuple(mj.point)}; "
            f"Pf of {mj.map.label} undefined"
        )
    return complex(derive_jet("Z", lam.log()).value)


def preschwarzian(f: HeisMap | ConformalWord, p: Sequence[float]) -> complex:
    """Z ln J_F at ``p``."""
    return _pf(MapJets(as_map(f), p, 2))


def preschwarzian_gradient_ratio(
    f: HeisMap | ConformalWord, p: Sequence[float]
) -> float:
    """|Pf| J_F / |∇_H J_F|; undefined where the gradient vanishes."""
    mj = MapJets(as_map(f), p, 2)
    pf = _pf(mj)
    lam = mj.lam()
    gradient = math.hypot(
        float(derive_jet("X", lam).value), float(derive_jet("Y", lam).value)
    )
    if gradient == 0.0:
        raise SingularError(f"∇_H J_F = 0 at {tuple(mj.point)}")
    return abs(pf) * float(lam.value) / gradient


@dataclass(frozen=True)
class SchwarzianValue:
    point: Point
    lam: float
    s_cr: complex | None
    s_cl: complex | None
    pf: complex | None
    phi: float | None
    b_theta_coeff: complex | None
    contact_residuals: tuple[float, float]
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        def pair(value: complex | None, missing: str) -> Any:
            return missing if value is None else [value.real, value.imag]

        return {
            "point": list(self.point),
            "lambda": self.lam,
            "s_cr": pair(self.s_cr, "undefined"),
            "s_cl": pair(self.s_cl, "singular"),
            "pf": pair(self.pf, "undefined"),
            "phi": self.phi,
            "b_theta_coeff": pair(self.b_theta_coeff, "undefined"),
            "contact_residuals": list(self.contact_residuals),
            "notes": list(self.notes),
        }


def schwarzian_values(
    f: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
    order: int = 3,
) -> SchwarzianValue:
    """All three operators at once; undefined entries are None with a note."""
    if order < 3:
        raise OrderError(f"the Schwarzian operators need jets of order >= 3, got {order}")
    mj = MapJets(as_map(f), p, order)
    assessment = assess_jets(mj, tolerance)
    notes: list[str] = []
    contact = assessment.is_contact(tolerance)
    if not contact:
        notes.append(f"not contact: residual {assessment.contact_residual:.3e}")
    lam = assessment.lam
    s_cr_value = phi = b_theta = None
    if contact and lam > 0:
        s_cr_value = _s_cr(mj)
        phi = 0.5 * math.log(lam)
        b_theta = 2.0 * _tensor(_phi(mj))
    elif contact:
        notes.append(f"λ_f = {lam:.6g} <= 0")
    s_cl_value = None
    if contact:
        try:
            s_cl_value = _cl(mj, tolerance)[0]
        except SingularError as exc:
            notes.append(str(exc))
    pf = None
    try:
        pf = _pf(mj)
    except NotPositive as exc:
        notes.append(str(exc))
    return SchwarzianValue(
        point=mj.point,
        lam=lam,
        s_cr=s_cr_value,
        s_cl=s_cl_value,
        pf=pf,
        phi=phi,
        b_theta_coeff=b_theta,
        contact_residuals=(assessment.r1, assessment.r2),
        notes=tuple(notes),
    )


def pluriharmonic_residual(u: Expr, p: Sequence[float]) -> complex:
    """Z²Z̄u(p); vanishes exactly for CR-pluriharmonic u."""
    return complex(apply_word(("Zbar", "Z", "Z"), u, p))


def annihilation_residuals(
    f: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> dict[str, Residual]:
    """S_CR and S_CL as residuals scaled by the size of their terms."""
    mj = _positive_jets(as_map(f), p, 3, tolerance)
    z_phi = derive_jet("Z", _phi(mj))
    cr_scale = abs(derive_jet("Z", z_phi).value) + 2.0 * abs(z_phi.value) ** 2
    cl_value, cl_scale = _cl(mj, tolerance)
    return {
        "s_cr": Residual(_s_cr(mj), float(cr_scale)),
        "s_cl": Residual(cl_value, cl_scale),
    }


def s_cl_scan(
    f: HeisMap | ConformalWord,
    points: Iterable[Sequence[float]],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> list[dict[str, Any]]:
    f = as_map(f)
    rows = []
    for p in points:
        mj = MapJets(f, p, 3)
        try:
            value: complex | None = _cl(mj, tolerance)[0]
        except SingularError:
            logger.debug("S_CL singular at %s", tuple(mj.point))
            value = None
        rows.append({"point": mj.point, "s_cl": value, "singular": value is None})
    return rows


# Composition rules.


def cocycle_residual_right(
    f: HeisMap | ConformalWord,
    g: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> Residual:
    """S_CL(f∘g) - [S_CL(f)∘g (ZG)² + S_CL(g)] for conformal g."""
    f, g = as_map(f), as_map(g)
    inner = MapJets(g, p, 3)
    outer = MapJets(f, inner.image(), 3)
    lhs, lhs_scale = _cl(MapJets(f.compose(g), p, 3), tolerance)
    s_f, f_scale = _cl(outer, tolerance)
    s_g, g_scale = _cl(inner, tolerance)
    zg2 = complex(inner.value("F", "Z")) ** 2
    return Residual(
        lhs - (s_f * zg2 + s_g), lhs_scale + f_scale * abs(zg2) + g_scale
    )


def left_cocycle_terms(
    g: HeisMap | ConformalWord,
    f: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> dict[str, complex]:
    """Each summand of the expansion of S_CL(g∘f) for conformal g.

    With a, b, c the derivatives ZG, Z²G, Z̄ZG at f(p) and P, Q the
    derivatives ZF, Z(F̄) at p, the expansion reads
    S_CL(G)∘f P² + ((Z̄Z²G + ZZ̄ZG)/a - 3bc/a²) PQ + (Z̄²ZG/a - 3c²/2a²) Q²
    + (c/a)(Z²F̄ - κ Q Z²F/P) + S_CL(f); the entry "correction" holds the
    Q Z²F/P product that κ multiplies.
    """
    g, f = as_map(g), as_map(f)
    inner = MapJets(f, p, 3)
    outer = MapJets(g, inner.image(), 3)
    a = complex(outer.value("F", ("Z",)))
    b = complex(outer.value("F", ("Z", "Z")))
    c = complex(outer.value("F", ("Z", "Zbar")))
    e = complex(outer.value("F", ("Z", "Z", "Zbar")))
    k = complex(outer.value("F", ("Z", "Zbar", "Z")))
    m = complex(outer.value("F", ("Z", "Zbar", "Zbar")))
    if abs(a) <= tolerance.abs:
        raise SingularError(f"ZG = 0 at {tuple(outer.point)}")
    big_p = complex(inner.value("F", ("Z",)))
    big_p2 = complex(inner.value("F", ("Z", "Z")))
    big_q = complex(inner.value("Fbar", ("Z",)))
    big_q2 = complex(inner.value("Fbar", ("Z", "Z")))
    return {
        "outer": _cl(outer, tolerance)[0] * big_p**2,
        "mixed": ((e + k) / a - 3.0 * b * c / a**2) * big_p * big_q,
        "antiholomorphic": (m / a - 1.5 * c**2 / a**2) * big_q**2,
        "second": (c / a) * big_q2,
        "correction": -(c / a) * big_q * big_p2 / big_p,
        "inner": _cl(inner, tolerance)[0],
    }


def cocycle_residual_left(
    g: HeisMap | ConformalWord,
    f: HeisMap | ConformalWord,
    p: Sequence[float],
    kappa: float = LEFT_COCYCLE_COEFFICIENT,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> Residual:
    """S_CL(g∘f) minus the full left-cocycle right-hand side."""
    g, f = as_map(g), as_map(f)
    lhs, lhs_scale = _cl(MapJets(g.compose(f), p, 3), tolerance)
    terms = left_cocycle_terms(g, f, p, tolerance)
    terms["correction"] = kappa * terms["correction"]
    rhs = sum(terms.values())
    return Residual(lhs - rhs, lhs_scale + sum(abs(v) for v in terms.values()))


def cr_chain_residual(
    f: HeisMap | ConformalWord,
    g: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> Residual:
    """Four-line chain rule for the tensor coefficient S' = Z²φ - 2(Zφ)².

    S'(f∘g) = S'(f)∘g (ZG)² + conj(S'(f))∘g (ZḠ)²
      + [λ_f(Z̄Z + ZZ̄)λ_f - 4Zλ_f Z̄λ_f]∘g ZG ZḠ / (2λ_f²∘g)
      + (Z²G λ_g - 2ZG Zλ_g) Z ln λ_f∘g / (2λ_g)
      + (Z²Ḡ λ_g - 2ZḠ Zλ_g) Z̄ ln λ_f∘g / (2λ_g) + S'(g)
    """
    f, g = as_map(f), as_map(g)
    inner = _positive_jets(g, p, 3, tolerance)
    outer = _positive_jets(f, inner.image(), 3, tolerance)
    lhs = _tensor(_phi(_positive_jets(f.compose(g), p, 3, tolerance)))

    phi_f = _phi(outer)
    tensor_f = _tensor(phi_f)
    z_phi_bar = derive_jet("Zbar", phi_f)
    tensor_f_bar = complex(derive_jet("Zbar", z_phi_bar).value - 2.0 * z_phi_bar.value**2)
    lam_f = outer.lam()
    z_lam, zbar_lam = derive_jet("Z", lam_f), derive_jet("Zbar", lam_f)
    laplace_pair = derive_jet("Zbar", z_lam).value + derive_jet("Z", zbar_lam).value
    lam_f0 = float(lam_f.value)
    z_log_f = complex(z_lam.value) / lam_f0
    zbar_log_f = complex(zbar_lam.value) / lam_f0

    lam_g = inner.lam()
    lam_g0 = float(lam_g.value)
    z_lam_g = complex(derive_jet("Z", lam_g).value)
    zg = complex(inner.value("F", ("Z",)))
    zg_bar = complex(inner.value("Fbar", ("Z",)))
    z2g = complex(inner.value("F", ("Z", "Z")))
    z2g_bar = complex(inner.value("Fbar", ("Z", "Z")))

    terms = (
        tensor_f * zg**2,
        tensor_f_bar * zg_bar**2,
        (lam_f0 * laplace_pair - 4.0 * z_lam.value * zbar_lam.value)
        * zg
        * zg_bar
        / (2.0 * lam_f0**2),
        (z2g * lam_g0 - 2.0 * zg * z_lam_g) * z_log_f / (2.0 * lam_g0),
        (z2g_bar * lam_g0 - 2.0 * zg_bar * z_lam_g) * zbar_log_f / (2.0 * lam_g0),
        _tensor(_phi(inner)),
    )
    rhs = complex(sum(terms))
    return Residual(lhs - rhs, abs(lhs) + sum(abs(term) for term in terms))


def conformal_factor_identity(
    g: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> Residual:
    """Z²G λ_g - 2 ZG Zλ_g; zero for conformal g."""
    mj = _positive_jets(as_map(g), p, 3, tolerance)
    lam = mj.lam()
    z2g = complex(mj.value("F", ("Z", "Z")))
    zg = complex(mj.value("F", ("Z",)))
    z_lam = complex(derive_jet("Z", lam).value)
    first = z2g * float(lam.value)
    second = 2.0 * zg * z_lam
    return Residual(first - second, abs(first) + abs(second))


def claim1_residual(
    f: HeisMap | ConformalWord,
    g: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> Residual:
    """S_CR(f∘g) - S_CR(f)∘g (ZG)² for contact f and conformal g."""
    f, g = as_map(f), as_map(g)
    inner = _positive_jets(g, p, 3, tolerance)
    lhs = _s_cr(_positive_jets(f.compose(g), p, 3, tolerance))
    outer = _s_cr(_positive_jets(f, inner.image(), 3, tolerance))
    rhs = outer * complex(inner.value("F", ("Z",))) ** 2
    return Residual(lhs - rhs, abs(lhs) + abs(rhs))


def claim2_residual(
    f: HeisMap | ConformalWord,
    g: HeisMap | ConformalWord,
    p: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> Residual:
    """S_CR(f∘g) - S_CR(g) for inversion-free conformal f and contact g."""
    f, g = as_map(f), as_map(g)
    lhs = _s_cr(_positive_jets(f.compose(g), p, 3, tolerance))
    rhs = _s_cr(_positive_jets(g, p, 3, tolerance))
    return Residual(lhs - rhs, abs(lhs) + abs(rhs))


def claim3_value(
    alpha: HeisMap, p: Sequence[float], constant: float = CLAIM3_CONSTANT
) -> complex:
    """Closed form of S_CR(ι∘α) for an SL(2, R) action α."""
    mj = MapJets(alpha, p, 1)
    image = mj.image()
    norm4 = koranyi_norm(image) ** 4
    if norm4 == 0.0:
        raise SingularError(f"α({tuple(mj.point)}) is the origin")
    g_abs2 = image.x**2 + image.y**2
    zg = complex(mj.value("F", ("Z",)))
    zg_bar = complex(mj.value("Fbar", ("Z",)))
    return constant * g_abs2 * zg * zg_bar / norm4


def preschwarzian_chain_residual(
    f: HeisMap | ConformalWord,
    g: HeisMap | ConformalWord,
    p: Sequence[float],
) -> Residual:
    """P(f∘g) - [(Pf∘g) ZG + Pg] for conformal g."""
    f, g = as_map(f), as_map(g)
    inner = MapJets(g, p, 2)
    lhs = _pf(MapJets(f.compose(g), p, 2))
    first = _pf(MapJets(f, inner.image(), 2)) * complex(inner.value("F", ("Z",)))
    second = _pf(inner)
    return Residual(lhs - first - second, abs(lhs) + abs(first) + abs(second))


def preschwarzian_affine_residual(
    affine: HeisMap, f: HeisMap | ConformalWord, p: Sequence[float]
) -> Residual:
    """P(A∘f) - Pf for an affine A(z, t) = (az + b z̄ + c, dt + e)."""
    f = as_map(f)
    lhs = preschwarzian(affine.compose(f), p)
    rhs = preschwarzian(f, p)
    return Residual(lhs - rhs, abs(lhs) + abs(rhs))


def jacobian_ratio_spread(
    f: HeisMap | ConformalWord,
    g: HeisMap | ConformalWord,
    points: Iterable[Sequence[float]],
) -> float:
    """Relative spread (max - min) / mean of J_F / J_G over the points."""
    f, g = as_map(f), as_map(g)
    ratios = []
    for p in points:
        lam_f = float(MapJets(f, p, 1).lam().value)
        lam_g = float(MapJets(g, p, 1).lam().value)
        if lam_g == 0.0:
            raise SingularError(f"J_G = 0 at {tuple(p)}")
        ratios.append(lam_f / lam_g)
    if not ratios:
        raise ValueError("jacobian_ratio_spread needs at least one point")
    mean = sum(ratios) / len(ratios)
    return (max(ratios) - min(ratios)) / abs(mean)


# Solutions of ZH = 1.


def zh_one_polynomial(Q: Expr | str, c1: float, c2: float, c3: float) -> RatPoly:
    """H = h1 + i h2 with ZH = 1, built from a real harmonic Q(x, y).

    ψ = Q - C1(x² + y²), h2 = ψ + C3 and
    h1 = C1(t + 2xy) + 2x + C2 + ∫₀^y ∂ψ/∂x dy - ∫₀^x ∂ψ/∂y(x, 0) dx.
    """
    try:
        q = RatPoly.from_expr(Q)
    except NotPolynomial as exc:
        raise NotHarmonic(f"Q must be a harmonic polynomial, got {Q}") from exc
    if not q.is_real or q.degree_in("t") > 0:
        raise NotHarmonic(f"Q must be a real polynomial in x, y, got {q}")
    if not q.euclidean_laplacian().is_zero:
        raise NotHarmonic(f"ΔQ = {q.euclidean_laplacian()} is not zero")
    x, y, t = (RatPoly.coordinate(name) for name in ("x", "y", "t"))
    psi = q - (x * x + y * y) * c1
    h1 = (
        (t + x * y * 2) * c1
        + x * 2
        + RatPoly.constant(c2)
        + psi.partial("x").integrate("y")
        - psi.partial("y").substitute_zero("y").integrate("x")
    )
    h2 = psi + RatPoly.constant(c3)
    return h1 + h2 * 1j


def zh_one_builder(Q: Expr | str, c1: float, c2: float, c3: float) -> Expr:
    return zh_one_polynomial(Q, c1, c2, c3).to_expr()


def zh_residual(H: Expr, p: Sequence[float]) -> complex:
    return complex(scalar(apply_word(("Z",), H, p))) - 1.0
