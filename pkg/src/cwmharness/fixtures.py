"""Access to the scenario fixtures shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Optional

from .tiers.scenarios import ScenarioFile, parse_scenarios

SCENARIO_SUFFIX = ".scenarios.json"


def builtin_scenarios_path(game: str) -> Optional[Path]:
    """Filesystem path of the shipped scenario file for a game, if any."""
    package_dir = resources.files("cwmharness") / "scenarios"
    candidate = package_dir / f"{game}{SCENARIO_SUFFIX}"
    path = Path(str(candidate))
    return path if path.is_file() else None


def load_builtin_scenarios(game: str) -> ScenarioFile:
    path = builtin_scenarios_path(game)
    if path is None:
        raise FileNotFoundError(f"no shipped scenario file for game {game!r}")
    return parse_scenarios(path.read_bytes())
