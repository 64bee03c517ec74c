from __future__ import annotations

import pytest
import sympy

from heis_schwarzian.errors import NoConsistentConstant, NotPolynomial
from heis_schwarzian.exact import (
    RatPoly,
    apply_word_exact,
    appendix_identities,
    fit_constant,
    fundamental_potentials,
    same_span,
    sublaplacian_exact,
    vzerosol_nullspace,
    weighted_monomials,
)
from heis_schwarzian.horizontal import apply_word


def poly(text: str) -> RatPoly:
    return RatPoly.from_expr(text)


def test_parse_and_print():
    p = poly("x^2*y + 3*t - 1/2")

    assert p.weighted_degree() == 3
    assert p.degree_in("t") == 1
    assert p.is_real
    assert p.evaluate((1.0, 2.0, 1.0)) == pytest.approx(4.5)
    assert (p - poly("x^2*y") - poly("3*t") + sympy.Rational(1, 2)).is_zero


def test_non_polynomials_are_rejected():
    with pytest.raises(NotPolynomial):
        poly("exp(x)")
    with pytest.raises(NotPolynomial):
        poly("1/x")
    with pytest.raises(NotPolynomial):
        poly("x") ** -1


def test_field_commutators_are_exact():
    for monomial in weighted_monomials(4):
        p = RatPoly.monomial(monomial)
        xy = apply_word_exact(("Y", "X"), p) - apply_word_exact(("X", "Y"), p)
        assert (xy + p.derive("T") * 4).is_zero
        zz = apply_word_exact(("Z", "Zbar"), p) - apply_word_exact(("Zbar", "Z"), p)
        assert (zz - p.derive("T") * 2 * sympy.I).is_zero


def test_exact_and_jet_words_agree():
    p = poly("x^3*t - 2*y^2*t + x*y")
    for word in (("X",), ("Z", "Zbar"), ("Y", "T", "X")):
        exact = apply_word_exact(word, p).evaluate((0.3, -0.4, 0.7))
        assert apply_word(word, p.to_expr(), (0.3, -0.4, 0.7)) == pytest.approx(exact, abs=1e-12)


def test_sublaplacian_of_t_squared():
    assert (sublaplacian_exact(poly("t^2")) - poly("8*(x^2 + y^2)")).is_zero
    assert sublaplacian_exact(poly("x^2 - y^2")).is_zero


def test_weighted_monomials():
    assert weighted_monomials(2, exact=True) == [(2, 0, 0), (1, 1, 0), (0, 2, 0), (0, 0, 1)]
    assert len(weighted_monomials(2)) == 7


@pytest.mark.parametrize(("dmax", "dimension"), [(3, 7), (4, 8), (5, 8), (6, 8)])
def test_conformal_potential_dimension(dmax, dimension):
    assert vzerosol_nullspace(dmax)[0] == dimension


def test_conformal_potentials_span_the_fundamental_eight():
    _, basis = vzerosol_nullspace(4)

    assert same_span(basis, fundamental_potentials())
    with pytest.raises(ValueError, match="degree"):
        vzerosol_nullspace(-1)


def test_appendix_identities_pass():
    report = appendix_identities(6)

    assert report.passed
    payload = report.to_json()
    assert payload["dmax"] == 6
    assert {check["status"] for check in payload["checks"]} == {"exact: pass"}
    assert len(payload["checks"]) == 12


def test_fit_constant():
    pairs = [(poly("6*x"), poly("x")), (poly("6*t^2"), poly("t^2")), (poly("0"), poly("0"))]
    assert fit_constant("six", pairs) == 6

    imaginary = [(poly("x") * (2 * sympy.I), poly("x"))]
    assert fit_constant("imaginary", imaginary) == 2 * sympy.I


def test_fit_constant_reports_inconsistent_pairs():
    with pytest.raises(NoConsistentConstant, match="mixed"):
        fit_constant("mixed", [(poly("2*x"), poly("x")), (poly("3*y"), poly("y"))])
    with pytest.raises(NoConsistentConstant) as info:
        fit_constant("empty", [(poly("x"), poly("0"))])
    assert info.value.witnesses == ["every right-hand side vanishes"]
    with pytest.raises(NoConsistentConstant):
        fit_constant("shape", [(poly("2*x + y"), poly("x"))])
