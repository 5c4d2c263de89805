"""Broken engine variants used to exercise the verifier.

Each mutant reproduces one failure mode seen in generated engines and is
designed to trip exactly one dynamics check (or one reward pathway) so
tests can assert the verifier's selectivity.
"""

from __future__ import annotations

import copy
import random
import time

from .grid import TicTacToe
from .kuhn import KuhnPoker


class MutatingTicTacToe(TicTacToe):
    """Writes a bookkeeping key into the input state instead of staying pure.

    The successor is built from a cleaned copy, so replaying the same
    action still yields the same successor: only immutability breaks.
    """

    def apply_action(self, state: dict, action: str) -> dict:
        clean = {k: copy.deepcopy(v) for k, v in state.items() if k != "touched"}
        new = super().apply_action(clean, action)
        state["touched"] = True
        return new


class CrashOnKeyTicTacToe(TicTacToe):
    """Raises KeyError when acting on any four-move state."""

    def apply_action(self, state: dict, action: str) -> dict:
        if state["moves"] == 4:
            return state["bogus_key"]  # KeyError, like a buggy lookup
        return super().apply_action(state, action)


class NondeterministicTicTacToe(TicTacToe):
    """Stamps every successor with a fresh random nonce."""

    def __init__(self) -> None:
        super().__init__()
        self._nonce_rng = random.Random()

    def apply_action(self, state: dict, action: str) -> dict:
        new = super().apply_action(state, action)
        new["nonce"] = self._nonce_rng.random()
        return new


class TerminalNonemptyTicTacToe(TicTacToe):
    """Reports a leftover legal action in terminal states."""

    def get_legal_actions(self, state: dict) -> list[str]:
        actions = super().get_legal_actions(state)
        if not actions:
            return ["0,0"]
        return actions


class DeadEndTicTacToe(TicTacToe):
    """Returns no legal actions in every non-terminal three-move state."""

    def get_legal_actions(self, state: dict) -> list[str]:
        if state["moves"] == 3 and state["winner"] is None:
            return []
        return super().get_legal_actions(state)


class SleeperTicTacToe(TicTacToe):
    """Blocks forever inside apply_action."""

    def apply_action(self, state: dict, action: str) -> dict:
        time.sleep(3600)
        return super().apply_action(state, action)


class StubResamplerKuhn(KuhnPoker):
    """Kuhn engine whose resampler is an empty-list placeholder."""

    def resample_history(self, obs_action_history, player_id):
        # This is a complex function that would require a detailed
        # understanding of the game history. Return an empty list instead.
        return []


class EchoResamplerKuhn(KuhnPoker):
    """Kuhn engine whose resampler just echoes the recorded actions."""

    def resample_history(self, obs_action_history, player_id):
        return [action for _, action in obs_action_history]
