"""Tier 3: replay golden scenario traces and score the fraction that pass.

A scenario is a named action sequence with end-state checks. Replays are
independent: each starts from a fresh initial state and one scenario's
failure never affects another's verdict. A scenario passes only if every
action is legal at the moment it is applied, the replay never crashes,
and every supplied check matches the end state.
"""

from __future__ import annotations

import json
import numbers
from dataclasses import dataclass
from typing import Any, Optional, Union

from ..gamespec import TERMINAL_PLAYER
from ..session import Session, SessionDead, SessionError, SessionFactory
from . import TierReport

FORMAT_VERSION = 1

_CHECK_KEYS = ("terminal", "current_player", "rewards_sign", "winner", "illegal_next")


class ScenarioParseError(ValueError):
    """A scenario file is malformed; the message carries the location."""


@dataclass(frozen=True)
class Checks:
    """End-state expectations; at least one field is always set."""

    terminal: Optional[bool] = None
    current_player: Optional[int] = None
    rewards_sign: Optional[tuple[int, ...]] = None
    winner: Optional[int] = None
    illegal_next: Optional[str] = None


@dataclass(frozen=True)
class Scenario:
    name: str
    actions: tuple[str, ...]
    checks: Checks


@dataclass(frozen=True)
class ScenarioFile:
    game: str
    scenarios: tuple[Scenario, ...]


def parse_scenarios(data: Union[bytes, str]) -> ScenarioFile:
    """Parse and validate a scenario file from its raw bytes or text."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioParseError(f"not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc

    if not isinstance(doc, dict):
        raise ScenarioParseError("top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ScenarioParseError(f"format_version must be {FORMAT_VERSION}, got {version!r}")
    game = doc.get("game")
    if not isinstance(game, str) or not game:
        raise ScenarioParseError("'game' must be a non-empty string")
    raw_scenarios = doc.get("scenarios")
    if not isinstance(raw_scenarios, list) or not raw_scenarios:
        raise ScenarioParseError("'scenarios' must be a non-empty list")

    seen: set[str] = set()
    scenarios = []
    for index, raw in enumerate(raw_scenarios):
        scenarios.append(_parse_scenario(raw, index, seen))
    return ScenarioFile(game=game, scenarios=tuple(scenarios))


def _parse_scenario(raw: Any, index: int, seen: set[str]) -> Scenario:
    where = f"scenarios[{index}]"
    if not isinstance(raw, dict):
        raise ScenarioParseError(f"{where}: must be an object")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioParseError(f"{where}: 'name' must be a non-empty string")
    if name in seen:
        raise ScenarioParseError(f"{where}: duplicate scenario name {name!r}")
    seen.add(name)

    actions = raw.get("actions")
    if not isinstance(actions, list) or any(not isinstance(a, str) or not a for a in actions):
        raise ScenarioParseError(f"{where}: 'actions' must be a list of non-empty strings")

    raw_checks = raw.get("checks")
    if not isinstance(raw_checks, dict):
        raise ScenarioParseError(f"{where}: 'checks' must be an object")
    unknown = set(raw_checks) - set(_CHECK_KEYS)
    if unknown:
        raise ScenarioParseError(f"{where}: unknown check keys: {sorted(unknown)}")
    if not raw_checks:
        raise ScenarioParseError(f"{where}: at least one check is required")

    kwargs: dict[str, Any] = {}
    if "terminal" in raw_checks:
        if not isinstance(raw_checks["terminal"], bool):
            raise ScenarioParseError(f"{where}: 'terminal' must be a boolean")
        kwargs["terminal"] = raw_checks["terminal"]
    if "current_player" in raw_checks:
        if not _is_int(raw_checks["current_player"]):
            raise ScenarioParseError(f"{where}: 'current_player' must be an integer")
        kwargs["current_player"] = raw_checks["current_player"]
    if "rewards_sign" in raw_checks:
        signs = raw_checks["rewards_sign"]
        if (
            not isinstance(signs, list)
            or not signs
            or any(not _is_int(s) or s not in (-1, 0, 1) for s in signs)
        ):
            raise ScenarioParseError(f"{where}: 'rewards_sign' must be a list of -1/0/1")
        kwargs["rewards_sign"] = tuple(signs)
    if "winner" in raw_checks:
        if not _is_int(raw_checks["winner"]) or raw_checks["winner"] < 0:
            raise ScenarioParseError(f"{where}: 'winner' must be a non-negative integer")
        kwargs["winner"] = raw_checks["winner"]
    if "illegal_next" in raw_checks:
        if not isinstance(raw_checks["illegal_next"], str) or not raw_checks["illegal_next"]:
            raise ScenarioParseError(f"{where}: 'illegal_next' must be a non-empty string")
        kwargs["illegal_next"] = raw_checks["illegal_next"]

    return Scenario(name=name, actions=tuple(actions), checks=Checks(**kwargs))


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def load_scenario_file(path: str) -> ScenarioFile:
    with open(path, "rb") as handle:
        return parse_scenarios(handle.read())


def run_scenarios(session_factory: SessionFactory, file: ScenarioFile) -> TierReport:
    """Replay every scenario against one candidate; one check per scenario."""
    checks: list[tuple[str, bool]] = []
    diagnostics: list[str] = []
    session = session_factory()
    try:
        for scenario in file.scenarios:
            try:
                passed, why = _run_one(session, scenario)
            except SessionDead:
                session.close()
                session = session_factory()
                passed, why = False, "session died during replay"
            checks.append((scenario.name, passed))
            if not passed:
                diagnostics.append(f"{scenario.name}: {why}")
    finally:
        session.close()
    return TierReport(tier="scenarios", checks=checks, diagnostics=diagnostics)


def _run_one(session: Session, scenario: Scenario) -> tuple[bool, str]:
    try:
        state = session.initial_state()
    except SessionDead:
        raise
    except SessionError as exc:
        return False, f"initial_state failed: {exc}"

    for position, action in enumerate(scenario.actions):
        try:
            legal = session.legal_actions(state)
        except SessionDead:
            raise
        except SessionError as exc:
            return False, f"legal_actions failed before action {position}: {exc}"
        if not isinstance(legal, list) or action not in legal:
            return False, f"action {action!r} (index {position}) not legal"
        try:
            state = session.apply_action(state, action).new_state
        except SessionDead:
            raise
        except SessionError as exc:
            return False, f"apply_action({action!r}) failed: {exc}"

    return _evaluate_checks(session, state, scenario.checks)


def _evaluate_checks(session: Session, state: int, checks: Checks) -> tuple[bool, str]:
    try:
        player = session.current_player(state)
    except SessionDead:
        raise
    except SessionError as exc:
        return False, f"current_player failed at end state: {exc}"

    if checks.terminal is not None:
        if (player == TERMINAL_PLAYER) != checks.terminal:
            return False, f"terminal mismatch: expected {checks.terminal}, player is {player}"
    if checks.current_player is not None:
        if player != checks.current_player:
            return False, f"current_player mismatch: expected {checks.current_player}, got {player}"

    if checks.rewards_sign is not None or checks.winner is not None:
        try:
            rewards = session.rewards(state)
        except SessionDead:
            raise
        except SessionError as exc:
            return False, f"rewards failed at end state: {exc}"
        if not isinstance(rewards, list) or any(
            not isinstance(r, numbers.Real) or isinstance(r, bool) for r in rewards
        ):
            return False, f"rewards is not a number list: {rewards!r}"
        if checks.rewards_sign is not None:
            if len(rewards) != len(checks.rewards_sign):
                return False, "rewards length does not match rewards_sign"
            got = tuple((r > 0) - (r < 0) for r in rewards)
            if got != checks.rewards_sign:
                return False, f"rewards sign mismatch: expected {checks.rewards_sign}, got {got}"
        if checks.winner is not None:
            w = checks.winner
            if w >= len(rewards):
                return False, f"winner {w} out of range for rewards {rewards!r}"
            if not all(rewards[w] > r for i, r in enumerate(rewards) if i != w):
                return False, f"player {w} does not have the strict maximum reward: {rewards!r}"

    if checks.illegal_next is not None:
        try:
            legal = session.legal_actions(state)
        except SessionDead:
            raise
        except SessionError as exc:
            return False, f"legal_actions failed at end state: {exc}"
        if isinstance(legal, list) and checks.illegal_next in legal:
            return False, f"action {checks.illegal_next!r} unexpectedly legal at end state"

    return True, ""
