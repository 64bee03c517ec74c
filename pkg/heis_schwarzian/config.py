"""Run configuration loading and environment-variable resolution."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from dotenv import dotenv_values

from .tolerance import Tolerance


BASE_DIR = Path(__file__).resolve().parent.parent
ENV_PREFIX = "HEIS_"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    order: int = 6
    tol_rel: float = 1e-8
    tol_abs: float = 1e-10
    contact_tol: float = 1e-8
    output_dir: str = "reports"
    conformal_cases: int = 200
    pair_cases: int = 100
    pushforward_cases: int = 50
    word_max_length: int = 6
    grid_points: int = 21
    rk4_steps: int = 64
    fd_step: float | None = None

    def tolerance(self) -> Tolerance:
        return Tolerance(rel=self.tol_rel, abs=self.tol_abs)

    def contact_tolerance(self) -> Tolerance:
        return Tolerance(rel=self.contact_tol, abs=self.tol_abs)


FIELD_TYPES = {
    "seed": int,
    "order": int,
    "tol_rel": float,
    "tol_abs": float,
    "contact_tol": float,
    "output_dir": str,
    "conformal_cases": int,
    "pair_cases": int,
    "pushforward_cases": int,
    "word_max_length": int,
    "grid_points": int,
    "rk4_steps": int,
    "fd_step": float,
}


def _resolve_path(value: str, base_dir: Path) -> str:
    path = Path(value)
    return str(path if path.is_absolute() else base_dir / path)


def _configured_value(
    env_name: str,
    file_config: Mapping[str, str | None],
    json_value: Any,
) -> str:
    """Resolve a non-empty value as environment > key=value file > config.json."""
    environment_value = str(os.getenv(env_name, "") or "").strip()
    file_value = str(file_config.get(env_name, "") or "").strip()
    if not file_value:
        file_value = str(file_config.get(env_name[len(ENV_PREFIX):].lower(), "") or "").strip()
    if json_value is None:
        json_value = ""
    return environment_value or file_value or str(json_value).strip()


def _coerce(key: str, value: Any) -> Any:
    if key not in FIELD_TYPES:
        raise ValueError(f"unknown run_config key: {key}")
    if value is None or (isinstance(value, str) and not value.strip()):
        if key == "fd_step":
            return None
        raise ValueError(f"{key} must not be empty")
    if isinstance(value, str) and value.strip().lower() in ("none", "null"):
        if key == "fd_step":
            return None
        raise ValueError(f"{key} must not be null")
    kind = FIELD_TYPES[key]
    try:
        number = float(value) if kind is not str else None
        if kind is int and not float(number).is_integer():
            raise ValueError(value)
        return kind(number) if kind is not str else str(value).strip()
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{key} must be {kind.__name__}, got {value!r}") from exc


def _validate(run_config: dict[str, Any]) -> None:
    for key in ("tol_rel", "tol_abs", "contact_tol"):
        if not run_config[key] > 0:
            raise ValueError(f"{key} must be positive, got {run_config[key]}")
    if run_config["order"] < 3:
        raise ValueError(f"order must be >= 3, got {run_config['order']}")
    for key in (
        "conformal_cases",
        "pair_cases",
        "pushforward_cases",
        "word_max_length",
        "grid_points",
        "rk4_steps",
    ):
        if run_config[key] < 1:
            raise ValueError(f"{key} must be >= 1, got {run_config[key]}")
    if run_config["fd_step"] is not None and not run_config["fd_step"] > 0:
        raise ValueError(f"fd_step must be positive, got {run_config['fd_step']}")


def load_config(
    config_path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
    settings_path: str | Path | None = None,
) -> RunConfig:
    """Load run_config from config.json, a key=value file, the environment and overrides."""
    path = Path(config_path or os.getenv("HEIS_CONFIG", BASE_DIR / "config.json"))
    with path.open("r", encoding="utf-8") as handle:
        config = json.load(handle)
    if not isinstance(config.get("run_config", {}), dict):
        raise ValueError("config.json run_config must be an object")
    json_config = dict(config.get("run_config", {}))
    for key in json_config:
        if key not in FIELD_TYPES:
            raise ValueError(f"unknown run_config key: {key}")

    file_config: Mapping[str, str | None] = {}
    if settings_path is not None:
        settings = Path(settings_path)
        if not settings.is_file():
            raise ValueError(f"config file not found: {settings}")
        file_config = dotenv_values(settings, interpolate=False)
        for key in file_config:
            name = key[len(ENV_PREFIX):].lower() if key.startswith(ENV_PREFIX) else key
            if name not in FIELD_TYPES:
                raise ValueError(f"unknown run_config key: {key}")

    defaults = {f.name: f.default for f in fields(RunConfig)}
    run_config: dict[str, Any] = {}
    for key, default in defaults.items():
        value = _configured_value(
            ENV_PREFIX + key.upper(), file_config, json_config.get(key)
        )
        if value:
            run_config[key] = _coerce(key, value)
        run_config.setdefault(key, default)

    for key, value in (overrides or {}).items():
        if value is not None:
            run_config[key] = _coerce(key, value)

    run_config["output_dir"] = _resolve_path(
        run_config["output_dir"], path.resolve().parent
    )
    _validate(run_config)
    return RunConfig(**run_config)
