"""Tier 1: syntax, API completeness and return-shape verification.

Seven binary checks with a cascading abort chain: a load failure fails
everything, an incomplete API fails the five probes behind it, and an
unavailable initial state fails the four shape probes behind it. The
shape probes themselves do not cascade: a non-dict initial state is still
probed, matching how the checks behave on a live engine.
"""

from __future__ import annotations

import numbers
from typing import Any

from ..session import Session, SessionError
from . import TierReport

STATIC_CHECKS = (
    "syntax_ok",
    "api_complete",
    "initial_is_map",
    "legal_actions_is_string_list",
    "rewards_is_number_list",
    "observations_is_list",
    "current_player_is_int",
)


def _is_number(value: Any) -> bool:
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def run_static(session: Session) -> TierReport:
    """Run the seven static checks against one candidate session."""
    diagnostics: list[str] = []
    results: dict[str, bool] = {name: False for name in STATIC_CHECKS}

    try:
        info = session.info()
    except SessionError as exc:
        diagnostics.append(f"session unavailable: {exc}")
        return _report(results, diagnostics)

    results["syntax_ok"] = info.load_ok
    if not info.load_ok:
        diagnostics.append(f"load failed: {info.load_error or 'unknown error'}")
        return _report(results, diagnostics)

    results["api_complete"] = info.core_api_complete()
    if not results["api_complete"]:
        missing = [n for n, ok in info.api_present.items() if not ok]
        diagnostics.append(f"missing functions: {', '.join(missing)}")
        return _report(results, diagnostics)

    try:
        state = session.initial_state()
        results["initial_is_map"] = session.state_is_map(state)
        unavailable = session.state_is_none(state)
    except SessionError as exc:
        diagnostics.append(f"initial_state failed: {exc}")
        return _report(results, diagnostics)
    if unavailable:
        diagnostics.append("initial state is null")
        return _report(results, diagnostics)
    if not results["initial_is_map"]:
        diagnostics.append("initial state is not a map")

    try:
        actions = session.legal_actions(state)
        results["legal_actions_is_string_list"] = isinstance(actions, list) and all(
            isinstance(a, str) for a in actions
        )
    except SessionError as exc:
        diagnostics.append(f"legal_actions failed: {exc}")

    try:
        rewards = session.rewards(state)
        results["rewards_is_number_list"] = isinstance(rewards, list) and all(
            _is_number(r) for r in rewards
        )
    except SessionError as exc:
        diagnostics.append(f"rewards failed: {exc}")

    try:
        results["observations_is_list"] = isinstance(session.observations(state), list)
    except SessionError as exc:
        diagnostics.append(f"observations failed: {exc}")

    try:
        player = session.current_player(state)
        results["current_player_is_int"] = isinstance(player, int) and not isinstance(player, bool)
    except SessionError as exc:
        diagnostics.append(f"current_player failed: {exc}")

    return _report(results, diagnostics)


def _report(results: dict[str, bool], diagnostics: list[str]) -> TierReport:
    return TierReport(
        tier="static",
        checks=[(name, results[name]) for name in STATIC_CHECKS],
        diagnostics=diagnostics,
    )


def static_gate(report: TierReport) -> bool:
    """True iff later tiers can run: load, API and initial state are sound."""
    if report.tier != "static":
        raise ValueError("static_gate expects a static-tier report")
    by_name = dict(report.checks)
    return by_name["syntax_ok"] and by_name["api_complete"] and by_name["initial_is_map"]
