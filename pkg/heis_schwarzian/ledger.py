"""Constants ledger: every constant-bearing identity refitted by the engine."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
import sympy

from .errors import EvalError, NoConsistentConstant, NotPositive, SingularError
from .exact import (
    RatPoly,
    apply_word_exact,
    fit_constant,
    sublaplacian_exact,
    weighted_monomials,
)
from .expr import COORDS, exp
from .fields import flow_closed_form, scl_flow_derivative
from .group import (
    Dilate,
    Invert,
    Translate,
    Point,
    make_sl2,
    make_type2,
    random_point,
    word_to_map,
)
from .harmonic import (
    bochner_exact,
    gradient_exact,
    harmonic_poly_basis,
    horizontal_jacobian_exact,
    vertical_jacobian_exact,
)
from .schwarzian import (
    claim3_value,
    cr_coefficient,
    left_cocycle_terms,
    preschwarzian_gradient_ratio,
    s_cl,
    s_cr,
)
from .tolerance import DEFAULT_TOLERANCE, Tolerance


logger = logging.getLogger(__name__)

I = sympy.I

# Constants as they are usually quoted; the ledger compares each fit against them.
STATED_CONSTANTS: dict[str, sympy.Expr] = {
    "harmonic_system": sympy.Integer(8),
    "bilaplace": sympy.Integer(-64),
    "bochner": sympy.Rational(1, 2),
    "log_jacobian": sympy.Integer(8),
    "sublaplacian_normalization": sympy.Integer(1),
    "exp_flow": -I / 8,
    "cr_tensor_sign": sympy.Integer(1),
    "claim3_constant": sympy.Integer(-6),
    "left_cocycle_coefficient": sympy.Integer(2),
    "complex_contact": sympy.Integer(1),
    "preschwarzian_gradient": sympy.Integer(1),
    "growth_jacobian": sympy.Integer(-2),
}

VERDICTS = ("confirmed", "rescaled", "mismatch")
SNAP_DENOMINATOR = 64


@dataclass(frozen=True)
class LedgerEntry:
    id: str
    stated_constant: sympy.Expr
    fitted_constant: sympy.Expr
    verdict: str
    witness: str
    method: str = "exact"

    @property
    def fitted_value(self) -> complex:
        return complex(self.fitted_constant)

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "stated_constant": sympy.sstr(self.stated_constant),
            "fitted_constant": sympy.sstr(self.fitted_constant),
            "verdict": self.verdict,
            "witness": self.witness,
            "method": self.method,
        }


def _verdict(stated: sympy.Expr, fitted: sympy.Expr) -> str:
    return "confirmed" if sympy.expand(fitted - stated) == 0 else "rescaled"


def _entry(
    identity: str, fitted: sympy.Expr, witness: str, method: str = "exact"
) -> LedgerEntry:
    stated = STATED_CONSTANTS[identity]
    entry = LedgerEntry(identity, stated, fitted, _verdict(stated, fitted), witness, method)
    logger.debug("ledger %s: %s (%s)", identity, sympy.sstr(fitted), entry.verdict)
    return entry


def _snap(value: float) -> sympy.Rational:
    fraction = Fraction(value).limit_denominator(SNAP_DENOMINATOR)
    return sympy.Rational(fraction.numerator, fraction.denominator)


def fit_ratio(
    identity: str,
    samples: Sequence[tuple[complex, complex]],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> sympy.Expr:
    """Snap the common ratio numerator/denominator of numeric samples to a small fraction."""
    ratios = [complex(num) / complex(den) for num, den in samples if abs(den) > 1e-8]
    if not ratios:
        raise NoConsistentConstant(identity, ["every denominator vanishes"])
    first = ratios[0]
    for ratio in ratios[1:]:
        if not tolerance.close(ratio, first, max(1.0, abs(ratio), abs(first))):
            raise NoConsistentConstant(identity, [repr(first), repr(ratio)])
    mean = sum(ratios) / len(ratios)
    fitted = _snap(mean.real) + I * _snap(mean.imag)
    if abs(complex(fitted) - mean) > 1e-6 * max(1.0, abs(mean)):
        raise NoConsistentConstant(identity, [repr(mean), sympy.sstr(fitted)])
    return fitted


def _first_nonzero(basis: Sequence[RatPoly], rhs: Callable[[RatPoly], RatPoly]) -> str:
    for u in basis:
        if not rhs(u).is_zero:
            return f"u = {u}"
    return "no basis element with a nonzero right-hand side"


# Exact entries over the harmonic basis.


def _harmonic_system(basis: Sequence[RatPoly]) -> LedgerEntry:
    def pair(u: RatPoly) -> tuple[RatPoly, RatPoly]:
        f1, f2, _ = gradient_exact(u)
        return sublaplacian_exact(f1), f2.derive("T")

    fitted = fit_constant("harmonic_system", (pair(u) for u in basis))
    return _entry("harmonic_system", fitted, _first_nonzero(basis, lambda u: pair(u)[1]))


def _bilaplace(basis: Sequence[RatPoly]) -> LedgerEntry:
    def pair(u: RatPoly) -> tuple[RatPoly, RatPoly]:
        f1 = gradient_exact(u)[0]
        return (
            sublaplacian_exact(sublaplacian_exact(f1)),
            apply_word_exact(("T", "T"), f1),
        )

    fitted = fit_constant("bilaplace", (pair(u) for u in basis))
    return _entry("bilaplace", fitted, _first_nonzero(basis, lambda u: pair(u)[1]))


def _bochner(basis: Sequence[RatPoly]) -> LedgerEntry:
    fitted = fit_constant("bochner", (bochner_exact(u) for u in basis))
    return _entry("bochner", fitted, _first_nonzero(basis, lambda u: bochner_exact(u)[1]))


def _log_jacobian_pair(u: RatPoly) -> tuple[RatPoly, RatPoly]:
    """Numerators of Δ_H ln ψ and Re(Z̄(Zψ/ψ)) over ψ² for ψ = J_F."""
    psi = horizontal_jacobian_exact(gradient_exact(u))
    xpsi, ypsi = psi.derive("X"), psi.derive("Y")
    n1 = psi * sublaplacian_exact(psi) - (xpsi * xpsi + ypsi * ypsi)
    z_psi = psi.derive("Z")
    n2 = (psi * z_psi.derive("Zbar") - z_psi * psi.derive("Zbar")).real_part()
    return n1, n2


def _log_jacobian(basis: Sequence[RatPoly]) -> LedgerEntry:
    pairs = [_log_jacobian_pair(u) for u in basis]
    fitted = fit_constant("log_jacobian", pairs)
    witness = next(
        (f"u = {u}" for u, (_, n2) in zip(basis, pairs) if not n2.is_zero),
        "no basis element with a nonconstant Jacobian",
    )
    return _entry("log_jacobian", fitted, witness)


def _sublaplacian_normalization(degree: int = 4) -> LedgerEntry:
    def pair(p: RatPoly) -> tuple[RatPoly, RatPoly]:
        pair_sum = apply_word_exact(("Z", "Zbar"), p) + apply_word_exact(("Zbar", "Z"), p)
        return pair_sum * 4, sublaplacian_exact(p)

    monomials = [RatPoly.monomial(m) for m in weighted_monomials(degree)]
    fitted = fit_constant("sublaplacian_normalization", (pair(p) for p in monomials))
    return _entry(
        "sublaplacian_normalization",
        fitted,
        f"{len(monomials)} monomials of weighted degree <= {degree}",
    )


def _growth_jacobian(basis: Sequence[RatPoly]) -> LedgerEntry:
    def pair(u: RatPoly) -> tuple[RatPoly, RatPoly]:
        vertical = vertical_jacobian_exact(gradient_exact(u))
        return vertical - apply_word_exact(("T", "T"), u), bochner_exact(u)[1]

    fitted = fit_constant("growth_jacobian", (pair(u) for u in basis))
    return _entry("growth_jacobian", fitted, _first_nonzero(basis, lambda u: pair(u)[1]))


def _complex_contact() -> LedgerEntry:
    """Zf3 = c (f2 Zf1 - f1 Zf2) over polynomial contact maps."""
    x = COORDS[0]
    maps = [
        flow_closed_form(x * x, 0.5),
        flow_closed_form(x**3 - 2 * x, 0.25),
        word_to_map([Translate(Point(1.0, -2.0, 3.0)), Dilate(2.0)]),
        word_to_map([Dilate(0.5), Translate(Point(0.5, 0.25, -1.0))]),
    ]

    def pair(components: Sequence[RatPoly]) -> tuple[RatPoly, RatPoly]:
        f1, f2, f3 = components
        return f3.derive("Z"), f2 * f1.derive("Z") - f1 * f2.derive("Z")

    exact_maps = [[RatPoly.from_expr(c) for c in f.components] for f in maps]
    fitted = fit_constant("complex_contact", (pair(c) for c in exact_maps))
    return _entry("complex_contact", fitted, ", ".join(f.label for f in maps))


# Numeric entries.


def _inverted_sl2(rng: np.random.Generator) -> tuple[Any, Any]:
    a = float(np.exp(rng.uniform(-0.7, 0.7)))
    b = float(rng.uniform(-1.0, 1.0))
    alpha = make_sl2(a, b, 0.0, 1.0 / a)
    return alpha, word_to_map([Invert()]).compose(alpha)


def _cr_tensor_sign(
    rng: np.random.Generator, tolerance: Tolerance, cases: int
) -> LedgerEntry:
    samples = []
    for _ in range(cases):
        _, f = _inverted_sl2(rng)
        p = random_point(rng, 0.5, 2.0)
        try:
            samples.append((s_cr(f, p, tolerance), cr_coefficient(f, p, tolerance)))
        except (SingularError, NotPositive):
            continue
    fitted = fit_ratio("cr_tensor_sign", samples, tolerance)
    return _entry("cr_tensor_sign", fitted, f"{len(samples)} points of ι∘SL(2,R)", "numeric")


def _claim3(rng: np.random.Generator, tolerance: Tolerance, cases: int) -> LedgerEntry:
    samples = []
    for _ in range(cases):
        alpha, f = _inverted_sl2(rng)
        p = random_point(rng, 0.5, 2.0)
        try:
            samples.append((s_cr(f, p, tolerance), claim3_value(alpha, p, 1.0)))
        except (SingularError, NotPositive):
            continue
    fitted = fit_ratio("claim3_constant", samples, tolerance)
    return _entry("claim3_constant", fitted, f"{len(samples)} points of ι∘SL(2,R)", "numeric")


def _left_cocycle(
    rng: np.random.Generator, tolerance: Tolerance, cases: int
) -> LedgerEntry:
    f = flow_closed_form(exp(COORDS[0]), 0.3)
    samples = []
    for _ in range(cases):
        g = make_type2(
            rng.uniform(-1.0, 1.0, size=3),
            float(rng.uniform(-math.pi, math.pi)),
            float(np.exp(rng.uniform(-0.5, 0.5))),
            rng.uniform(-1.0, 1.0, size=3),
        )
        p = random_point(rng, 0.5, 2.0)
        try:
            lhs = s_cl(g.to_map().compose(f), p, tolerance)
            terms = left_cocycle_terms(g, f, p, tolerance)
        except (SingularError, EvalError):
            continue
        correction = terms.pop("correction")
        samples.append((lhs - sum(terms.values()), correction))
    fitted = fit_ratio("left_cocycle_coefficient", samples, tolerance)
    return _entry(
        "left_cocycle_coefficient",
        fitted,
        f"{len(samples)} pairs (type-2 word, e^x flow at s = 0.3)",
        "numeric",
    )


def _preschwarzian_gradient(
    rng: np.random.Generator, tolerance: Tolerance, cases: int
) -> LedgerEntry:
    samples = []
    for _ in range(cases):
        _, f = _inverted_sl2(rng)
        p = random_point(rng, 0.5, 2.0)
        try:
            samples.append((preschwarzian_gradient_ratio(f, p), 1.0))
        except (SingularError, NotPositive):
            continue
    fitted = fit_ratio("preschwarzian_gradient", samples, tolerance)
    return _entry(
        "preschwarzian_gradient", fitted, f"{len(samples)} points of ι∘SL(2,R)", "numeric"
    )


def exp_flow_reference(x: float, s: float) -> complex:
    """Closed form quoted for S_CL of the time-s flow of v0 = e^x."""
    w = s * math.exp(x)
    w2 = w * w
    denominator = (16.0 + 8.0 * w2 + w2 * w2) ** 2
    real = w2 * (272.0 + 104.0 * w2 + 17.0 * w2 * w2) / (8.0 * denominator)
    imag = w * (-256.0 - 32.0 * w2 + 8.0 * w2 * w2 + 4.0 * w2**3) / (8.0 * denominator)
    return complex(real, imag)


def exp_flow_engine(x: float, s: float) -> complex:
    """S_CL of the e^x flow at (x, 0, 0) as computed by the jet engine."""
    return s_cl(flow_closed_form(exp(COORDS[0]), s), (x, 0.0, 0.0))


def _exp_flow(
    rng: np.random.Generator,
    tolerance: Tolerance,
    cases: int = 20,
    grid: int = 21,
    epsilon: float = 1e-4,
) -> LedgerEntry:
    h = exp(COORDS[0])
    samples = []
    for x in rng.uniform(-1.0, 1.0, size=cases):
        p = (float(x), 0.0, 0.0)
        central = (
            s_cl(flow_closed_form(h, epsilon), p) - s_cl(flow_closed_form(h, -epsilon), p)
        ) / (2.0 * epsilon)
        predicted = scl_flow_derivative(h, p)
        if abs(central - predicted) > 1e-6:
            raise NoConsistentConstant(
                "exp_flow", [f"x = {x:.6g}", repr(central), repr(predicted)]
            )
        samples.append((central, math.exp(x)))
    fitted = fit_ratio("exp_flow", samples, Tolerance(rel=1e-6, abs=tolerance.abs))

    discrepancy = 0.0
    for x in np.linspace(-1.0, 1.0, grid):
        for s in np.linspace(0.0, 2.0, grid + 1)[1:]:
            engine = exp_flow_engine(float(x), float(s))
            reference = exp_flow_reference(float(x), float(s))
            discrepancy = max(discrepancy, abs(engine - reference))
    engine, reference = exp_flow_engine(0.0, 1.0), exp_flow_reference(0.0, 1.0)
    witness = (
        f"x = 0, s = 1: engine {engine.real:.6g}{engine.imag:+.6g}i, "
        f"reference {reference.real:.6g}{reference.imag:+.6g}i; "
        f"max discrepancy {discrepancy:.3e} on a {grid}x{grid} grid"
    )
    entry = _entry("exp_flow", fitted, witness, "closed form")
    if not tolerance.small(discrepancy, 1.0):
        entry = LedgerEntry(
            entry.id,
            entry.stated_constant,
            entry.fitted_constant,
            "mismatch",
            entry.witness,
            entry.method,
        )
    return entry


def iter_ledger(
    tolerance: Tolerance = DEFAULT_TOLERANCE,
    seed: int = 0,
    degree: int = 5,
    cases: int = 12,
) -> Iterator[LedgerEntry]:
    """Entries in order; exact ones over the harmonic basis up to ``degree``."""
    if degree < 3:
        raise ValueError(f"the harmonic basis needs degree >= 3, got {degree}")
    rng = np.random.default_rng(seed)
    basis = list(harmonic_poly_basis(degree))
    yield _harmonic_system(basis)
    yield _bilaplace(basis)
    yield _bochner(basis)
    yield _log_jacobian(basis)
    yield _sublaplacian_normalization()
    yield _exp_flow(rng, tolerance)
    yield _cr_tensor_sign(rng, tolerance, cases)
    yield _claim3(rng, tolerance, cases)
    yield _left_cocycle(rng, tolerance, cases)
    yield _complex_contact()
    yield _preschwarzian_gradient(rng, tolerance, cases)
    yield _growth_jacobian(basis)


def ledger_run(
    tolerance: Tolerance = DEFAULT_TOLERANCE, seed: int = 0, degree: int = 5
) -> list[LedgerEntry]:
    return list(iter_ledger(tolerance, seed, degree))
