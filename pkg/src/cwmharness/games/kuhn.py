"""Kuhn poker with explicit deal actions at chance nodes.

Three-card deck (J, Q, K), one private card each, ante 1. Deals are the
chance actions "deal:J" / "deal:Q" / "deal:K"; the first deal goes to
player 0. One betting round with a single raise cap: with no raise
outstanding the actor may Call (check) or Raise (bet 1); facing a raise
the actor may Fold or Call. This yields exactly five betting lines
(CC, CRF, CRC, RF, RC), hence 6 x 5 = 30 terminal histories.

Imperfect information: a player observes only their own card and the
betting history. resample_history reconstructs a full trajectory by
sampling the opponent's card among the unseen ones and verifying the
observer's recorded observations replay exactly.
"""

from __future__ import annotations

import random
from typing import Optional

from ..gamespec import CHANCE_PLAYER, TERMINAL_PLAYER

RANKS = ("J", "Q", "K")
RANK_VALUE = {"J": 0, "Q": 1, "K": 2}


class KuhnPoker:
    def __init__(self, seed: Optional[int] = None):
        # Randomness is only consumed by resample_history.
        self._rng = random.Random(seed)

    # -- engine contract --------------------------------------------------

    def get_initial_state(self) -> dict:
        return {"cards": [None, None], "history": []}

    def apply_action(self, state: dict, action: str) -> dict:
        legal = self.get_legal_actions(state)
        if action not in legal:
            raise ValueError(f"illegal action {action!r}; legal: {legal}")
        new = {"cards": list(state["cards"]), "history": list(state["history"])}
        if action.startswith("deal:"):
            rank = action.split(":", 1)[1]
            new["cards"][0 if new["cards"][0] is None else 1] = rank
        else:
            new["history"].append(action)
        return new

    def get_current_player(self, state: dict) -> int:
        if state["cards"][0] is None or state["cards"][1] is None:
            return CHANCE_PLAYER
        if self._is_terminal(state):
            return TERMINAL_PLAYER
        return len(state["history"]) % 2

    def get_player_name(self, player_id: int) -> str:
        return f"Player {player_id}"

    def get_rewards(self, state: dict) -> list[float]:
        if not self._is_terminal(state):
            return [0.0, 0.0]
        history = state["history"]
        if history[-1] == "Fold":
            folder = (len(history) - 1) % 2
            return [-1.0, 1.0] if folder == 0 else [1.0, -1.0]
        stake = 2.0 if "Raise" in history else 1.0
        winner = 0 if RANK_VALUE[state["cards"][0]] > RANK_VALUE[state["cards"][1]] else 1
        return [stake, -stake] if winner == 0 else [-stake, stake]

    def get_legal_actions(self, state: dict) -> list[str]:
        cards = state["cards"]
        if cards[0] is None:
            return [f"deal:{r}" for r in RANKS]
        if cards[1] is None:
            return [f"deal:{r}" for r in RANKS if r != cards[0]]
        if self._is_terminal(state):
            return []
        if state["history"] and state["history"][-1] == "Raise":
            return ["Fold", "Call"]
        return ["Call", "Raise"]

    def get_observations(self, state: dict) -> list[dict]:
        return [self._observation(state, 0), self._observation(state, 1)]

    def resample_history(
        self, obs_action_history: list[tuple[dict, Optional[str]]], player_id: int
    ) -> list[str]:
        """Sample a full trajectory consistent with the observer's history.

        The opponent's card is the only hidden information; candidates are
        tried in random order and verified by replaying the observer's own
        recorded observations.
        """
        if not obs_action_history:
            return []
        last_obs, last_action = obs_action_history[-1]
        own = last_obs["card"]
        bets = list(last_obs["history"])
        if last_action is not None:
            bets.append(last_action)
        candidates = [r for r in RANKS if r != own]
        self._rng.shuffle(candidates)
        for opponent in candidates:
            cards = [own, opponent] if player_id == 0 else [opponent, own]
            trajectory = [f"deal:{cards[0]}", f"deal:{cards[1]}", *bets]
            if self._replays_consistently(trajectory, obs_action_history, player_id):
                return trajectory
        return []

    # -- internals --------------------------------------------------------

    def _is_terminal(self, state: dict) -> bool:
        history = state["history"]
        if state["cards"][0] is None or state["cards"][1] is None:
            return False
        if not history:
            return False
        return history[-1] == "Fold" or (len(history) >= 2 and history[-1] == "Call")

    def _observation(self, state: dict, player: int) -> dict:
        return {
            "player": player,
            "card": state["cards"][player],
            "history": list(state["history"]),
        }

    def _replays_consistently(
        self,
        trajectory: list[str],
        obs_action_history: list[tuple[dict, Optional[str]]],
        player_id: int,
    ) -> bool:
        state = self.get_initial_state()
        index = 0
        for action in trajectory:
            if self.get_current_player(state) == player_id:
                if index >= len(obs_action_history):
                    return False
                obs, recorded = obs_action_history[index]
                if self._observation(state, player_id) != obs:
                    return False
                if recorded is not None and recorded != action:
                    return False
                index += 1
            if action not in self.get_legal_actions(state):
                return False
            state = self.apply_action(state, action)
        if self.get_current_player(state) == player_id and index < len(obs_action_history):
            obs, recorded = obs_action_history[index]
            if recorded is None and self._observation(state, player_id) == obs:
                index += 1
        return index == len(obs_action_history)
