"""Schwarzian derivatives of contact and quasiconformal maps on the Heisenberg group."""

from .cli import main
from .config import RunConfig, load_config
from .mapspec import parse_map

__all__ = ["RunConfig", "load_config", "main", "parse_map"]
