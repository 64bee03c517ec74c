from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable

import numpy as np
import pytest
from click.testing import CliRunner

from heis_schwarzian import main
from heis_schwarzian.tolerance import Tolerance


SMALL_RUN = {
    "seed": 3,
    "conformal_cases": 12,
    "pair_cases": 6,
    "pushforward_cases": 5,
    "word_max_length": 4,
    "grid_points": 5,
    "rk4_steps": 64,
}


def write_config(path: Path, **run_config: Any) -> Path:
    path.write_text(
        json.dumps({"run_config": {"output_dir": "reports", **run_config}}),
        encoding="utf-8",
    )
    return path


def write_settings(path: Path, *lines: str) -> Path:
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


def invoke(runner: CliRunner, config_path: Path, *args: str):
    return runner.invoke(main, list(args), obj={"config_path": str(config_path)})


def split_events(events: Iterable[dict[str, Any]]) -> tuple[list[dict], list[dict], dict]:
    cases, errors, complete = [], [], None
    for event in events:
        if event["type"] == "case":
            cases.append(event["content"])
        elif event["type"] == "error":
            errors.append(event)
        elif event["type"] == "complete":
            complete = event
    assert complete is not None
    return cases, errors, complete


def failing(cases: Iterable[dict[str, Any]], check: str | None = None) -> list[dict]:
    return [
        row for row in cases if not row["passed"] and (check is None or row["check"] == check)
    ]


@pytest.fixture()
def tolerance() -> Tolerance:
    return Tolerance(rel=1e-8, abs=1e-10)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture()
def config_path(tmp_path: Path, monkeypatch) -> Path:
    for key in ("CONFIG", *(k.upper() for k in SMALL_RUN), "OUTPUT_DIR", "TOL_REL", "ORDER"):
        monkeypatch.delenv(f"HEIS_{key}", raising=False)
    return write_config(tmp_path / "config.json", **SMALL_RUN)


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()
