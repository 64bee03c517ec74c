"""Verification suites streamed as event dictionaries."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
import sympy

from .config import RunConfig
from .errors import HeisError, NoConsistentConstant
from .exact import (
    RatPoly,
    apply_word_exact,
    appendix_identities,
    vzerosol_nullspace,
    weighted_monomials,
)
from .expr import COORDS, exp, parse_expr
from .fields import (
    PRIMARY_PUSHFORWARD_CASES,
    PUSHFORWARD_CASES,
    REDUNDANT_PUSHFORWARD_CASES,
    ContactVF,
    ConformalVFCoeffs,
    TabulatedFlowMap,
    antiholomorphic_product,
    conformal_residual,
    conformal_v0,
    flow_closed_form,
    flow_integrate,
    pushforward_residuals,
    scl_flow_derivative,
)
from .group import (
    ConformalWord,
    Dilate,
    HeisMap,
    Invert,
    Point,
    Translate,
    dilate,
    make_affine,
    make_sl2,
    make_type1,
    make_type2,
    random_point,
    random_word,
    unit_sphere_point,
    word_is_regular_at,
    word_to_map,
)
from .harmonic import (
    bochner_terms,
    contact_harmonic_closure,
    gradient_harmonic,
    growth_ingredients,
    harmonic_jacobian_laplacian_residual,
    harmonic_poly_basis,
    harmonic_system_exact,
    hessian_report,
    subharmonicity_scan,
)
from .horizontal import apply_word, assess_contact, chain_rule_residual
from .jets import fd_oracle, jet_eval, jet_partial, multi_indices
from .ledger import iter_ledger
from .mapspec import parse_grid
from .schwarzian import (
    annihilation_residuals,
    claim1_residual,
    claim2_residual,
    claim3_value,
    cocycle_residual_left,
    cocycle_residual_right,
    conformal_factor_identity,
    cr_chain_residual,
    jacobian_ratio_spread,
    preschwarzian_affine_residual,
    preschwarzian_chain_residual,
    s_cl,
    s_cr,
    zh_one_builder,
    zh_residual,
)
from .tolerance import Residual, Tolerance


logger = logging.getLogger(__name__)

Event = dict[str, Any]

CASE_COLUMNS = ("suite", "check", "case", "passed", "residual", "point", "detail")

HARMONIC_TEST_FUNCTIONS = (
    "t",
    "x*y",
    "t^2 - (2/3)*(x^4 + y^4)",
    "x^3 - 3*x*y^2",
    "x*t - (1/2)*y*(x^2 + y^2)",
)

# Smooth test functions for the jet-versus-finite-difference comparison.
ENGINE_CORPUS = (
    "x",
    "x*y*t",
    "x^3 - 2*y^2*t + 5",
    "(x + y + t)^4",
    "x^2*y^2 - t^3",
    "exp(x)",
    "exp(x*y - t)",
    "exp(-(x^2 + y^2))",
    "sin(x)",
    "cos(y*t)",
    "sin(x + 2*y) * cos(t)",
    "log(2 + x^2)",
    "log(3 + x + y^2 + t^2)",
    "sqrt(1 + x^2 + y^2)",
    "sqrt(4 + t)",
    "1/(2 + x)",
    "1/(1 + x^2 + y^2 + t^2)",
    "x/(3 + y^2)",
    "exp(x) * sin(y)",
    "exp(t) / (2 + cos(x))",
    "(x^2 + y^2)^2 + t^2",
    "t*y - x*(x^2 + y^2)",
    "log(1 + exp(x))",
    "sqrt(2 + sin(x*y))",
    "cos(x)^2 - sin(y)^3",
    "exp(sin(t))",
    "x*exp(-y)*cos(t)",
    "(1 + x*y)^3 / (2 + t^2)",
    "x*y/(1 + t^2)",
    "t^2 - (2/3)*(x^4 + y^4)",
)


@dataclass
class SuiteTally:
    suite: str
    tolerance: Tolerance
    cases: int = 0
    failures: int = 0
    first_failure: dict[str, Any] | None = None

    def _row(
        self,
        check: str,
        passed: bool,
        residual: float | None,
        point: Sequence[float] | None,
        detail: str,
    ) -> dict[str, Any]:
        self.cases += 1
        row = {
            "suite": self.suite,
            "check": check,
            "case": self.cases,
            "passed": bool(passed),
            "residual": residual,
            "point": "" if point is None else " ".join(repr(float(c)) for c in point),
            "detail": detail,
        }
        if not passed:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = row
        return row

    def case(
        self,
        check: str,
        passed: bool,
        residual: Any = None,
        point: Sequence[float] | None = None,
        detail: str = "",
    ) -> Event:
        value = None if residual is None else float(abs(residual))
        row = self._row(check, passed, value, point, detail)
        return {"type": "case", "content": row}

    def residual(
        self,
        check: str,
        residual: Residual,
        point: Sequence[float] | None = None,
        detail: str = "",
    ) -> Event:
        return self.case(check, residual.ok(self.tolerance), residual, point, detail)

    def error(
        self, check: str, exc: BaseException, point: Sequence[float] | None = None
    ) -> Event:
        row = self._row(check, False, None, point, f"{type(exc).__name__}: {exc}")
        return {"type": "error", "content": f"{self.suite}/{check}: {exc}", "row": row}

    def attempt(
        self,
        check: str,
        compute: Callable[[], Residual | tuple[bool, Any, str]],
        point: Sequence[float] | None = None,
    ) -> Event:
        try:
            outcome = compute()
        except (HeisError, ArithmeticError) as exc:
            return self.error(check, exc, point)
        if isinstance(outcome, Residual):
            return self.residual(check, outcome, point)
        passed, residual, detail = outcome
        return self.case(check, passed, residual, point, detail)

    def complete(self, **summary: Any) -> Event:
        return {
            "type": "complete",
            "content": f"{self.suite}: {self.cases} cases, {self.failures} failures",
            "suite": self.suite,
            "passed": self.failures == 0,
            "cases": self.cases,
            "failures": self.failures,
            "first_failure": self.first_failure,
            "summary": summary,
        }


def _status(message: str) -> Event:
    return {"type": "status", "content": message}


def _regular_samples(
    rng: np.random.Generator, config: RunConfig, count: int, min_norm: float = 0.3
) -> Iterator[tuple[ConformalWord, Point]]:
    """Random Reflect-free words with points away from every inversion singularity."""
    produced = attempts = 0
    while produced < count:
        attempts += 1
        if attempts > 50 * count:
            raise RuntimeError(f"could not draw {count} regular word/point pairs")
        word = random_word(rng, config.word_max_length)
        p = random_point(rng)
        if word_is_regular_at(word, p, min_norm):
            produced += 1
            yield word, p


def _random_flow(rng: np.random.Generator) -> HeisMap:
    x = COORDS[0]
    s = float(rng.uniform(0.1, 0.8))
    kind = int(rng.integers(3))
    if kind == 0:
        return flow_closed_form(exp(x), s)
    a, b = (float(v) for v in rng.uniform(-1.0, 1.0, size=2))
    if kind == 1:
        return flow_closed_form(a * x * x + b * x, s)
    return flow_closed_form(x**3 + a * x * x + b * x, s)


def _inverted_sl2(rng: np.random.Generator) -> tuple[HeisMap, HeisMap]:
    a = float(math.exp(rng.uniform(-0.7, 0.7)))
    b = float(rng.uniform(-1.0, 1.0))
    alpha = make_sl2(a, b, 0.0, 1.0 / a)
    return alpha, word_to_map([Invert()]).compose(alpha)


def _random_type1(rng: np.random.Generator) -> ConformalWord:
    return make_type1(
        rng.uniform(-1.0, 1.0, size=3),
        float(rng.uniform(-math.pi, math.pi)),
        float(math.exp(rng.uniform(-0.7, 0.7))),
        rng.uniform(-1.0, 1.0, size=3),
    )


def _random_type2(rng: np.random.Generator) -> ConformalWord:
    return make_type2(
        rng.uniform(-1.0, 1.0, size=3),
        float(rng.uniform(-math.pi, math.pi)),
        float(math.exp(rng.uniform(-0.5, 0.5))),
        rng.uniform(-1.0, 1.0, size=3),
    )


# Suites.


def conformal_suite(config: RunConfig) -> Iterator[Event]:
    """S_CR = S_CL = 0 and Z̄F = 0 for random conformal words."""
    tolerance = config.tolerance()
    tally = SuiteTally("conformal", tolerance)
    rng = np.random.default_rng(config.seed)
    yield _status(f"正在检验 {config.conformal_cases} 个共形映射…")
    for word, p in _regular_samples(rng, config, config.conformal_cases):
        try:
            residuals = annihilation_residuals(word, p, tolerance)
        except (HeisError, ArithmeticError) as exc:
            yield tally.error("annihilation", exc, p)
            continue
        detail = word.label
        yield tally.residual("s_cr", residuals["s_cr"], p, detail)
        yield tally.residual("s_cl", residuals["s_cl"], p, detail)

        def conformal() -> tuple[bool, Any, str]:
            assessment = assess_contact(word.to_map(), p, config.contact_tolerance())
            return (
                assessment.is_conformal(config.contact_tolerance()),
                assessment.zbar_f,
                f"λ = {assessment.lam:.6g}",
            )

        yield tally.attempt("conformal", conformal, p)

    yield _status("正在检验水平链式法则…")
    for word, p in _regular_samples(rng, config, min(20, config.conformal_cases)):
        outer = random_word(rng, 2, allow_reflect=False).to_map()
        for letter in ("X", "Y", "Z", "Zbar"):
            yield tally.attempt(
                f"chain_rule_{letter}",
                lambda: chain_rule_residual(outer, word.to_map(), letter, p),
                p,
            )

    yield _status("正在检验 SL(2,R) 作用…")
    sl2 = make_sl2(2.0, 0.0, 0.0, 0.5)
    for _ in range(10):
        p = random_point(rng)

        def sl2_kernel() -> tuple[bool, Any, str]:
            value = s_cr(sl2, p, tolerance)
            assessment = assess_contact(sl2, p, tolerance)
            passed = (
                tolerance.small(value, 1.0)
                and assessment.is_contact(tolerance)
                and not assessment.is_conformal(tolerance)
            )
            return passed, value, f"Z̄F = {assessment.zbar_f:.6g}"

        yield tally.attempt("sl2_kernel", sl2_kernel, p)
    yield tally.complete(conformal_cases=config.conformal_cases)


def cocycles_suite(config: RunConfig) -> Iterator[Event]:
    """Composition rules of S_CL, S_CR and the Preschwarzian."""
    tolerance = config.tolerance()
    tally = SuiteTally("cocycles", tolerance)
    rng = np.random.default_rng(config.seed)
    cases = config.pair_cases

    yield _status(f"正在检验右余循环（{cases} 对）…")
    for g, p in _regular_samples(rng, config, cases):
        f = _random_flow(rng)
        detail = f"{f.label} ∘ {g.label}"
        yield tally.attempt("right_cocycle", lambda: cocycle_residual_right(f, g, p, tolerance), p)
        yield tally.attempt("conformal_factor", lambda: conformal_factor_identity(g, p, tolerance), p)
        alpha, contact = _inverted_sl2(rng)
        yield tally.attempt("cr_chain_rule", lambda: cr_chain_residual(contact, g, p, tolerance), p)
        yield tally.attempt("claim1", lambda: claim1_residual(contact, g, p, tolerance), p)
        logger.debug("right cocycle pair %s", detail)

    yield _status("正在检验无反演共形映射的左作用…")
    for _ in range(cases):
        word = _random_type1(rng)
        _, contact = _inverted_sl2(rng)
        p = random_point(rng, 0.5, 2.0)
        yield tally.attempt("claim2", lambda: claim2_residual(word, contact, p, tolerance), p)

    yield _status("正在检验 ι∘SL(2,R) 的闭式…")
    for _ in range(50):
        alpha, contact = _inverted_sl2(rng)
        p = random_point(rng, 0.5, 2.0)

        def claim3() -> Residual:
            direct = s_cr(contact, p, tolerance)
            closed = claim3_value(alpha, p)
            return Residual(direct - closed, abs(direct) + abs(closed))

        yield tally.attempt("claim3", claim3, p)

    yield _status("正在检验非共形内映射的链式法则…")
    for index in range(min(cases, 50)):
        _, g = _inverted_sl2(rng)
        p = random_point(rng, 0.5, 2.0)
        outer: HeisMap | ConformalWord
        if index % 2:
            _, outer = _inverted_sl2(rng)
        else:
            outer = _random_type2(rng)
            if not word_is_regular_at(outer, g.at(p), 0.3):
                continue
        yield tally.attempt(
            "cr_chain_contact", lambda: cr_chain_residual(outer, g, p, tolerance), p
        )

    yield _status("正在检验左余循环…")
    nontrivial = generic = 0
    for _ in range(cases):
        f = _random_flow(rng)
        p = random_point(rng, 0.5, 2.0)
        type1 = _random_type1(rng)

        def left_type1() -> Residual:
            lhs = s_cl(type1.to_map().compose(f), p, tolerance)
            rhs = s_cl(f, p, tolerance)
            return Residual(lhs - rhs, abs(lhs) + abs(rhs))

        yield tally.attempt("left_cocycle_type1", left_type1, p)

        type2 = _random_type2(rng)
        flow = flow_closed_form(exp(COORDS[0]), float(rng.uniform(0.2, 0.8)))
        yield tally.attempt(
            "left_cocycle_type2",
            lambda: cocycle_residual_left(type2, flow, p, tolerance=tolerance),
            p,
        )
        try:
            gap = abs(s_cl(type2.to_map().compose(flow), p, tolerance) - s_cl(flow, p, tolerance))
        except HeisError:
            continue
        generic += 1
        nontrivial += gap > 1e-3
    yield tally.case(
        "left_cocycle_nontrivial",
        generic > 0 and 2 * nontrivial >= generic,
        None,
        None,
        f"{nontrivial} of {generic} type-2 compositions change S_CL by more than 1e-3",
    )

    yield _status("正在检验 Preschwarzian 的复合规则…")
    for g, p in _regular_samples(rng, config, min(cases, 50)):
        outer, _ = next(_regular_samples(rng, config, 1))
        try:
            image = g.apply(p)
        except HeisError as exc:
            yield tally.error("preschwarzian_chain", exc, p)
            continue
        if not word_is_regular_at(outer, image):
            continue
        yield tally.attempt(
            "preschwarzian_chain", lambda: preschwarzian_chain_residual(outer, g, p), p
        )
        a = complex(*rng.uniform(0.5, 1.5, size=2))
        b = 0.3 * abs(a) * complex(*rng.uniform(-1.0, 1.0, size=2)) / math.sqrt(2.0)
        affine = make_affine(a, b, complex(*rng.uniform(-1.0, 1.0, size=2)), 1.0, 0.0)
        yield tally.attempt(
            "preschwarzian_affine", lambda: preschwarzian_affine_residual(affine, g, p), p
        )

        def spread() -> tuple[bool, Any, str]:
            points = [p] + [
                point
                for point in (random_point(rng) for _ in range(8))
                if word_is_regular_at(g, point)
            ]
            value = jacobian_ratio_spread(affine.compose(g.to_map()), g, points)
            return tolerance.small(value, 1.0), value, f"{len(points)} points"

        yield tally.attempt("jacobian_ratio", spread, p)

    yield _status("正在构造 ZH = 1 的解…")
    for _ in range(10):
        q = _random_harmonic_q(rng)
        c1, c2, c3 = (float(v) for v in rng.integers(-3, 4, size=3))
        try:
            h = zh_one_builder(q, c1, c2, c3)
        except HeisError as exc:
            yield tally.error("zh_one", exc)
            continue
        worst = 0.0
        for p in rng.uniform(-1.0, 1.0, size=(100, 3)):
            worst = max(worst, abs(zh_residual(h, p)))
        yield tally.case("zh_one", worst <= 1e-10, worst, None, f"Q = {q}")
    yield tally.complete(pair_cases=cases)


def _random_harmonic_q(rng: np.random.Generator) -> sympy.Expr:
    x, y = sympy.Symbol("x", real=True), sympy.Symbol("y", real=True)
    total = sympy.Integer(0)
    for k in range(1, 5):
        power = sympy.expand((x + sympy.I * y) ** k)
        re_part, im_part = power.as_real_imag()
        a, b = (sympy.Rational(int(v), 2) for v in rng.integers(-4, 5, size=2))
        total += a * re_part + b * im_part
    return sympy.expand(total)


def vfields_suite(config: RunConfig) -> Iterator[Event]:
    """Conformal potentials, flows of v0 = h(x) and pushforward potentials."""
    tolerance = config.tolerance()
    tally = SuiteTally("vfields", tolerance)
    rng = np.random.default_rng(config.seed)

    yield _status("正在检验八个基本共形势…")
    for index in range(1, 9):
        v0 = conformal_v0(ConformalVFCoeffs.unit(index))
        for p in rng.uniform(-1.0, 1.0, size=(5, 3)):

            def potential() -> tuple[bool, Any, str]:
                residual = conformal_residual(v0, p)
                agree = tolerance.close(residual.z2, residual.from_real_pair, 1.0)
                return residual.vanishes(tolerance) and agree, residual.z2, f"c{index}"

            yield tally.attempt(f"conformal_potential_c{index}", potential, p)

    yield _status("正在检验二次势流的 S_CL…")
    p = Point(0.3, -0.2, 0.1)
    x = COORDS[0]
    for a in np.linspace(-1.0, 1.0, 10):
        for b in np.linspace(-1.0, 1.0, 10):
            for s in np.linspace(0.2, 1.0, 5):
                flow = flow_closed_form(float(a) * x * x + float(b) * x + 0.5, float(s))

                def quadratic() -> tuple[bool, Any, str]:
                    value = s_cl(flow, p, tolerance)
                    return abs(value) <= 1e-9, value, flow.label

                yield tally.attempt("quadratic_flow", quadratic, p)

    yield _status("正在检验 S_CL 的一阶展开…")
    h = exp(x)
    epsilon = 1e-4
    for x0 in rng.uniform(-1.0, 1.0, size=20):
        point = (float(x0), 0.0, 0.0)

        def first_order() -> tuple[bool, Any, str]:
            central = (
                s_cl(flow_closed_form(h, epsilon), point)
                - s_cl(flow_closed_form(h, -epsilon), point)
            ) / (2.0 * epsilon)
            predicted = scl_flow_derivative(h, point)
            return abs(central - predicted) <= 1e-6, central - predicted, f"x = {x0:.6g}"

        yield tally.attempt("scl_first_order", first_order, point)

    yield _status("正在检验流的 Jacobian 与数值积分…")
    for _ in range(10):
        point = Point(*rng.uniform(-1.0, 1.0, size=3))
        s = float(rng.uniform(0.05, 0.5))
        flow = flow_closed_form(h, s)

        def unit_jacobian() -> tuple[bool, Any, str]:
            lam = assess_contact(flow, point, tolerance).lam
            return tolerance.close(lam, 1.0), lam - 1.0, flow.label

        yield tally.attempt("flow_unit_jacobian", unit_jacobian, point)

        def rk4_exp() -> tuple[bool, Any, str]:
            numeric = flow_integrate(ContactVF(h), point, s, config.rk4_steps)
            exact = flow.at(point)
            gap = max(abs(u - v) for u, v in zip(numeric, exact))
            return gap <= 1e-8, gap, f"{config.rk4_steps} steps"

        yield tally.attempt("rk4_exp_flow", rk4_exp, point)

        def rk4_dilation() -> tuple[bool, Any, str]:
            numeric = flow_integrate(ContactVF(COORDS[2]), point, s, config.rk4_steps)
            exact = dilate(point, math.exp(-2.0 * s))
            gap = max(abs(u - v) for u, v in zip(numeric, exact))
            return gap <= 1e-8, gap, "v0 = t"

        yield tally.attempt("rk4_dilation", rk4_dilation, point)

    tabulated = TabulatedFlowMap(ContactVF(h), 0.25, config.rk4_steps)
    for point in rng.uniform(-0.5, 0.5, size=(3, 3)):

        def tabulated_contact() -> tuple[bool, Any, str]:
            assessment = tabulated.assess(point)
            loose = Tolerance(rel=1e-5, abs=1e-5)
            return (
                assessment.is_contact(loose) and loose.close(assessment.lam, 1.0),
                assessment.contact_residual,
                tabulated.label,
            )

        yield tally.attempt("tabulated_flow", tabulated_contact, point)

    yield _status(f"正在检验 {config.pushforward_cases} 个推前势…")
    for word, point in _regular_samples(rng, config, config.pushforward_cases):

        def pushforward() -> tuple[bool, Any, str]:
            residuals = pushforward_residuals(word.to_map(), point, tolerance)
            scale = 1.0 + max(abs(v) for v in residuals.values())
            worst = max(abs(residuals[case]) for case in PRIMARY_PUSHFORWARD_CASES)
            product = antiholomorphic_product(word.to_map(), point)
            return (
                tolerance.small(worst, scale),
                worst,
                f"{word.label}; ZF·ZF̄ = {abs(product):.3e}",
            )

        yield tally.attempt("pushforward", pushforward, point)

        def pushforward_redundant() -> tuple[bool, Any, str]:
            residuals = pushforward_residuals(word.to_map(), point, tolerance)
            scale = 1.0 + max(abs(v) for v in residuals.values())
            worst = max(abs(residuals[case]) for case in REDUNDANT_PUSHFORWARD_CASES)
            return tolerance.small(worst, scale), worst, word.label

        yield tally.attempt("pushforward_redundant", pushforward_redundant, point)
    yield tally.complete(pushforward_cases=config.pushforward_cases, cases=len(PUSHFORWARD_CASES))


def appendix_suite(config: RunConfig) -> Iterator[Event]:
    """Exact nullspaces and operator identities, then engine cross-checks."""
    tolerance = config.tolerance()
    tally = SuiteTally("appendix", tolerance)
    rng = np.random.default_rng(config.seed)

    yield _status("正在求解 Z²v₀ = 0 的精确零空间…")
    for dmax, expected in ((3, 7), (4, 8), (5, 8), (6, 8), (7, 8)):
        dimension, _ = vzerosol_nullspace(dmax)
        yield tally.case(
            f"nullspace_degree_{dmax}",
            dimension == expected,
            None,
            None,
            f"dimension {dimension}, expected {expected}",
        )

    yield _status("正在检验算子恒等式…")
    report = appendix_identities(6)
    for check in report.checks:
        yield tally.case(
            check.name, check.passed, None, None, check.to_json()["status"]
            + (f" ({check.witness})" if check.witness else "")
        )

    yield _status("正在对照精确多项式与 jet 计算…")
    monomials = weighted_monomials(6)
    letters = ("X", "Y", "T", "Z", "Zbar")
    for _ in range(50):
        picks = rng.choice(len(monomials), size=3, replace=False)
        poly = RatPoly.from_terms(
            {monomials[int(i)]: int(c) for i, c in zip(picks, rng.integers(1, 6, size=3))}
        )
        word = tuple(letters[int(i)] for i in rng.integers(len(letters), size=int(rng.integers(1, 4))))
        point = tuple(float(c) for c in rng.uniform(-1.0, 1.0, size=3))

        def cross_engine() -> tuple[bool, Any, str]:
            exact = complex(apply_word_exact(word, poly).evaluate(point))
            jet = complex(apply_word(word, poly.to_expr(), point))
            scale = max(1.0, abs(exact))
            return abs(exact - jet) <= 1e-12 * scale, exact - jet, f"{'·'.join(word)} on {poly}"

        yield tally.attempt("jet_vs_exact", cross_engine, point)

    yield _status("正在对照 jet 与有限差分…")
    for text in ENGINE_CORPUS:
        e = parse_expr(text)
        point = tuple(float(c) for c in rng.uniform(-0.5, 0.5, size=3))

        def against_fd() -> tuple[bool, Any, str]:
            jet = jet_eval(e, point, 3)
            worst = 0.0
            for alpha in multi_indices(3):
                if sum(alpha) == 0:
                    continue
                exact = complex(jet_partial(jet, alpha))
                estimate = complex(fd_oracle(e, point, alpha, config.fd_step))
                worst = max(worst, abs(exact - estimate) / max(1.0, abs(exact)))
            return worst <= 1e-6, worst, text

        yield tally.attempt("jet_vs_fd", against_fd, point)
    yield tally.complete(dmax=report.dmax)


def harmonic_suite(config: RunConfig) -> Iterator[Event]:
    """Gradient harmonic battery, sign scans and growth ingredients."""
    tolerance = config.tolerance()
    tally = SuiteTally("harmonic", tolerance)
    rng = np.random.default_rng(config.seed)

    yield _status("正在构造次拉普拉斯调和多项式基…")
    basis = harmonic_poly_basis(5)
    for u in basis:
        residuals = harmonic_system_exact(u)
        yield tally.case(
            "harmonic_system",
            all(r.is_zero for r in residuals),
            None,
            None,
            f"u = {u}",
        )

    points = [Point(*p) for p in rng.uniform(-1.0, 1.0, size=(10, 3))]
    for text in HARMONIC_TEST_FUNCTIONS:
        m = gradient_harmonic(text)
        for p in points:

            def hessian() -> tuple[bool, Any, str]:
                report = hessian_report(m.u, p)
                return tolerance.close(report.det_hess, report.jacobian), report.det_hess - report.jacobian, text

            yield tally.attempt("hessian_jacobian", hessian, p)
            def bochner() -> tuple[bool, Any, str]:
                terms = bochner_terms(m.u, p)
                value = terms.residual()
                scale = abs(terms.half_laplacian) + terms.hessian_norm2 + abs(terms.geometric)
                return tolerance.small(value, scale), value, text

            yield tally.attempt("bochner", bochner, p)

    n = config.grid_points
    grid = parse_grid(f"-1:1:{n},-1:1:{n},-1:1:{n}")
    yield _status(f"正在扫描符号（{len(grid)} 个格点 × {len(HARMONIC_TEST_FUNCTIONS)} 个函数）…")
    scans = {}
    for text in HARMONIC_TEST_FUNCTIONS:
        m = gradient_harmonic(text)
        try:
            report = subharmonicity_scan(m, grid, tolerance)
        except HeisError as exc:
            yield tally.error("sign_scan", exc)
            continue
        summary = report.summary()
        scans[text] = summary
        yield tally.case(
            "sign_scan",
            report.violations == 0,
            report.violations,
            None,
            f"u = {text}; first violation {report.first_violation}",
        )
        qc_violations = sum(1 for row in report.points if row.get("qc") == "violation")
        yield tally.case("qc_equivalence", qc_violations == 0, qc_violations, None, f"u = {text}")

    yield _status("正在检验径向水平曲线与增长估计…")
    r_values = [float(r) for r in np.linspace(0.05, 0.95, 10)]
    for _ in range(20):
        base = unit_sphere_point(rng)
        for text in HARMONIC_TEST_FUNCTIONS:
            m = gradient_harmonic(text)

            def growth() -> tuple[bool, Any, str]:
                report = growth_ingredients(m, base, r_values, 1.0, tolerance)
                passed = (
                    report.curve_norm_error <= 1e-9
                    and report.horizontality_error <= 1e-8
                    and report.bound_failures == 0
                )
                return (
                    passed,
                    max(report.curve_norm_error, report.horizontality_error),
                    f"u = {text}; bound failures {report.bound_failures}",
                )

            yield tally.attempt("growth", growth, base)

    yield _status("正在检验调和切触映射…")
    x = COORDS[0]
    maps = [
        flow_closed_form(x * x - 0.5 * x, 0.5),
        flow_closed_form(2.0 * x * x + x, -0.25),
        _random_type1_polynomial(rng),
    ]
    for f in maps:

        def closure() -> tuple[bool, Any, str]:
            laplacian = contact_harmonic_closure(f)
            return laplacian.is_zero, None, f"{f.label}: Δ_H f3 = {laplacian}"

        yield tally.attempt("contact_harmonic_closure", closure)
        for p in rng.uniform(-1.0, 1.0, size=(3, 3)):

            def jacobian_laplacian() -> tuple[bool, Any, str]:
                value = harmonic_jacobian_laplacian_residual(f, p)
                return tolerance.small(value, 1.0), value, f.label

            yield tally.attempt("harmonic_jacobian_laplacian", jacobian_laplacian, p)
    yield tally.complete(sign_scans=scans, grid_points=len(grid))


def _random_type1_polynomial(rng: np.random.Generator) -> HeisMap:
    """A translation-dilation word; its components are polynomials."""
    return word_to_map(
        [
            Translate(Point(*rng.uniform(-1.0, 1.0, size=3))),
            Dilate(float(math.exp(rng.uniform(-0.5, 0.5)))),
        ]
    )


def ledger_suite(config: RunConfig) -> Iterator[Event]:
    """Refit every constant-bearing identity and record the verdicts."""
    tally = SuiteTally("ledger", config.tolerance())
    yield _status("正在重新拟合常数…")
    entries = []
    try:
        for entry in iter_ledger(config.tolerance(), config.seed):
            entries.append(entry.to_json())
            yield tally.case(
                entry.id,
                True,
                None,
                None,
                f"{entry.verdict}: stated {entry.to_json()['stated_constant']}, "
                f"fitted {entry.to_json()['fitted_constant']}",
            )
    except NoConsistentConstant as exc:
        yield tally.error(exc.identity, exc)
    yield tally.complete(ledger=entries)


SUITES: dict[str, Callable[[RunConfig], Iterator[Event]]] = {
    "conformal": conformal_suite,
    "cocycles": cocycles_suite,
    "vfields": vfields_suite,
    "appendix": appendix_suite,
    "harmonic": harmonic_suite,
    "ledger": ledger_suite,
}


def run_suite(name: str, config: RunConfig) -> Iterator[Event]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    logger.debug("running suite %s with seed %d", name, config.seed)
    yield from SUITES[name](config)
