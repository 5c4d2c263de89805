"""Shared paths, factories and independent oracles for the test suite."""

from __future__ import annotations

import functools
from fractions import Fraction
from pathlib import Path
from typing import Callable

from cwmharness import FunctionSession
from cwmharness.canon import fingerprint_native

REPO_ROOT = Path(__file__).resolve().parent.parent
DOCS_DIR = REPO_ROOT / "docs"


def session_factory_for(engine_builder: Callable[[], object], probe_mutation: bool = True):
    def factory():
        return FunctionSession(engine_builder(), probe_mutation=probe_mutation)

    return factory


# ---------------------------------------------------------------------------
# Independent oracles (deliberately brute force; never reuse harness logic).
# ---------------------------------------------------------------------------


def minimax_rewards(engine, state) -> tuple[float, float]:
    """Game-theoretic reward vector under optimal two-player play."""

    @functools.lru_cache(maxsize=None)
    def solve(key: str) -> tuple[float, float]:
        native = states[key]
        player = engine.get_current_player(native)
        if player == -4:
            r = engine.get_rewards(native)
            return (float(r[0]), float(r[1]))
        best: tuple[float, float] | None = None
        for action in engine.get_legal_actions(native):
            child = engine.apply_action(native, action)
            ckey = fingerprint_native(child)
            states.setdefault(ckey, child)
            value = solve(ckey)
            if best is None or value[player] > best[player]:
                best = value
        assert best is not None
        return best

    states: dict[str, object] = {}
    key = fingerprint_native(state)
    states[key] = state
    return solve(key)


def random_play_outcome_distribution(engine) -> dict[str, Fraction]:
    """Exact outcome probabilities when both players act uniformly at random."""

    def walk(state, probability: Fraction, acc: dict[str, Fraction]) -> None:
        player = engine.get_current_player(state)
        if player == -4:
            rewards = engine.get_rewards(state)
            if rewards[0] > rewards[1]:
                acc["p0_win"] += probability
            elif rewards[1] > rewards[0]:
                acc["p1_win"] += probability
            else:
                acc["draw"] += probability
            return
        actions = engine.get_legal_actions(state)
        share = probability / len(actions)
        for action in actions:
            walk(engine.apply_action(state, action), share, acc)

    acc = {"p0_win": Fraction(0), "p1_win": Fraction(0), "draw": Fraction(0)}
    walk(engine.get_initial_state(), Fraction(1), acc)
    assert sum(acc.values()) == 1
    return acc
