from __future__ import annotations

import pytest

from heis_schwarzian.config import load_config
from heis_schwarzian.errors import SingularError
from heis_schwarzian.suites import CASE_COLUMNS, SUITES, SuiteTally, run_suite
from heis_schwarzian.tolerance import Residual

from .conftest import failing, split_events


def test_tally_counts_and_keeps_the_first_failure(tolerance):
    tally = SuiteTally("demo", tolerance)

    ok = tally.residual("small", Residual(1e-12, 1.0), (0.0, 1.0, 2.0))
    bad = tally.case("large", False, -3.0, None, "too big")
    tally.case("later", False, 1.0)

    assert ok["content"]["passed"] is True
    assert ok["content"]["point"] == "0.0 1.0 2.0"
    assert tuple(bad["content"]) == CASE_COLUMNS
    assert bad["content"]["residual"] == 3.0
    complete = tally.complete(extra=1)
    assert complete["cases"] == 3
    assert complete["failures"] == 2
    assert complete["first_failure"]["check"] == "large"
    assert complete["passed"] is False
    assert complete["summary"] == {"extra": 1}


def test_tally_turns_domain_errors_into_error_events(tolerance):
    tally = SuiteTally("demo", tolerance)

    def singular():
        raise SingularError("ZF = 0")

    event = tally.attempt("singular", singular, (1.0, 0.0, 0.0))

    assert event["type"] == "error"
    assert event["content"] == "demo/singular: ZF = 0"
    assert event["row"]["detail"] == "SingularError: ZF = 0"
    assert event["row"]["passed"] is False
    assert tally.attempt("tuple", lambda: (True, 0.5, "fine"))["content"]["residual"] == 0.5


@pytest.mark.parametrize("name", ["conformal", "cocycles", "vfields", "harmonic"])
def test_small_suites_pass(config_path, name):
    config = load_config(config_path)

    events = list(run_suite(name, config))

    assert events[0]["type"] == "status"
    cases, errors, complete = split_events(events)
    assert errors == []
    assert failing(cases) == []
    assert complete["passed"], complete["first_failure"]
    assert complete["cases"] == len(cases)
    assert {row["suite"] for row in cases} == {name}


def test_suites_are_deterministic(config_path):
    config = load_config(config_path)

    first = [e for e in run_suite("conformal", config) if e["type"] == "case"]
    second = [e for e in run_suite("conformal", config) if e["type"] == "case"]
    assert first == second


def test_appendix_suite(config_path):
    cases, errors, complete = split_events(run_suite("appendix", load_config(config_path)))

    assert errors == []
    assert complete["passed"], complete["first_failure"]
    dims = [row for row in cases if row["check"].startswith("nullspace_degree_")]
    assert len(dims) == 5


def test_unknown_suite():
    assert "ledger" in SUITES
    with pytest.raises(ValueError, match="unknown suite"):
        next(run_suite("nonsense", None))


@pytest.mark.parametrize(
    ("name", "check"),
    [("vfields", "pushforward_redundant"), ("cocycles", "cr_chain_contact")],
)
def test_suites_cover_redundant_cases_and_contact_inner_maps(config_path, name, check):
    cases, errors, _ = split_events(run_suite(name, load_config(config_path)))

    rows = [row for row in cases if row["check"] == check]
    assert rows
    assert all(row["passed"] for row in rows)
    assert errors == []
