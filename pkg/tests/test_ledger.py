from __future__ import annotations

import pytest
import sympy

from heis_schwarzian.errors import NoConsistentConstant
from heis_schwarzian.ledger import (
    STATED_CONSTANTS,
    exp_flow_engine,
    exp_flow_reference,
    fit_ratio,
    iter_ledger,
    ledger_run,
)


I = sympy.I

FITTED = {
    "harmonic_system": (sympy.Integer(8), "confirmed"),
    "bilaplace": (sympy.Integer(-64), "confirmed"),
    "bochner": (sympy.Integer(8), "rescaled"),
    "log_jacobian": (sympy.Integer(4), "rescaled"),
    "sublaplacian_normalization": (sympy.Integer(2), "rescaled"),
    "exp_flow": (-I / 8, "mismatch"),
    "cr_tensor_sign": (sympy.Integer(-1), "rescaled"),
    "claim3_constant": (sympy.Integer(6), "rescaled"),
    "left_cocycle_coefficient": (sympy.Integer(1), "rescaled"),
    "complex_contact": (sympy.Integer(2), "rescaled"),
    "preschwarzian_gradient": (sympy.Rational(1, 2), "rescaled"),
    "growth_jacobian": (sympy.Integer(2), "rescaled"),
}


@pytest.fixture(scope="module")
def entries():
    return {entry.id: entry for entry in ledger_run()}


def test_every_stated_constant_gets_an_entry(entries):
    assert list(entries) == list(STATED_CONSTANTS)


@pytest.mark.parametrize("identity", list(FITTED))
def test_fitted_constants(entries, identity):
    fitted, verdict = FITTED[identity]
    entry = entries[identity]

    assert sympy.simplify(entry.fitted_constant - fitted) == 0
    assert entry.verdict == verdict
    assert entry.witness


def test_entry_json(entries):
    payload = entries["claim3_constant"].to_json()

    assert payload["stated_constant"] == "-6"
    assert payload["fitted_constant"] == "6"
    assert payload["verdict"] == "rescaled"
    assert set(payload) == {"id", "stated_constant", "fitted_constant", "verdict", "witness", "method"}


def test_exp_flow_closed_forms_differ():
    engine = exp_flow_engine(0.0, 1.0)
    reference = exp_flow_reference(0.0, 1.0)

    assert engine == pytest.approx(0.095 - 0.04j)
    assert reference == pytest.approx(0.0786 - 0.0552j)


def test_fit_ratio_snaps_to_small_fractions(tolerance):
    samples = [(0.375 * d, d) for d in (1.0, -2.0, 3.5)]

    assert fit_ratio("three eighths", samples, tolerance) == sympy.Rational(3, 8)
    assert fit_ratio("imaginary", [(-0.125j, 1.0)], tolerance) == -I / 8


def test_fit_ratio_rejects_inconsistent_samples(tolerance):
    with pytest.raises(NoConsistentConstant):
        fit_ratio("spread", [(1.0, 1.0), (2.0, 1.0)], tolerance)
    with pytest.raises(NoConsistentConstant):
        fit_ratio("zero", [(1.0, 0.0)], tolerance)
    with pytest.raises(NoConsistentConstant):
        fit_ratio("irrational", [(3.14159265, 1.0)], tolerance)


def test_ledger_needs_cubic_basis():
    with pytest.raises(ValueError, match="degree"):
        list(iter_ledger(degree=2))
