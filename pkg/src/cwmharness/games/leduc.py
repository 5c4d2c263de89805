"""Leduc poker with explicit deal actions at chance nodes.

Six-card deck (two each of J, Q, K), one private card per player, one
public card, ante 1. Betting actions are Fold / Call / Raise in both
rounds; Call with no raise outstanding is a check, Fold is always
available, and each round allows at most one raise (size 2 in round one,
4 in round two). At showdown a private card pairing the public card beats
any non-pair, otherwise higher rank wins and equal ranks split the pot.

Observations reveal the player's own card, the public card once dealt,
and the public action history (betting plus the public deal); private
deals are never visible to the opponent.
"""

from __future__ import annotations

import random
from typing import Optional

from ..gamespec import CHANCE_PLAYER, TERMINAL_PLAYER

RANKS = ("J", "Q", "K")
RANK_VALUE = {"J": 0, "Q": 1, "K": 2}
COPIES_PER_RANK = 2
RAISE_SIZE = {1: 2, 2: 4}
ANTE = 1


class LeducPoker:
    def __init__(self, seed: Optional[int] = None):
        # Randomness is only consumed by resample_history.
        self._rng = random.Random(seed)

    # -- engine contract --------------------------------------------------

    def get_initial_state(self) -> dict:
        return {
            "cards": [None, None],
            "public": None,
            "round1": [],
            "round2": [],
            "contrib": [ANTE, ANTE],
            "folded": None,
        }

    def apply_action(self, state: dict, action: str) -> dict:
        legal = self.get_legal_actions(state)
        if action not in legal:
            raise ValueError(f"illegal action {action!r}; legal: {legal}")
        new = {
            "cards": list(state["cards"]),
            "public": state["public"],
            "round1": list(state["round1"]),
            "round2": list(state["round2"]),
            "contrib": list(state["contrib"]),
            "folded": state["folded"],
        }
        phase = self._phase(state)
        if phase == "deal_p0":
            new["cards"][0] = action.split(":", 1)[1]
        elif phase == "deal_p1":
            new["cards"][1] = action.split(":", 1)[1]
        elif phase == "deal_public":
            new["public"] = action.split(":", 1)[1]
        else:
            round_no = 1 if phase == "bet1" else 2
            seq = new["round1"] if round_no == 1 else new["round2"]
            actor = len(seq) % 2
            if action == "Fold":
                new["folded"] = actor
            elif action == "Raise":
                new["contrib"][actor] += RAISE_SIZE[round_no]
            elif action == "Call" and seq and seq[-1] == "Raise":
                new["contrib"][actor] += RAISE_SIZE[round_no]
            seq.append(action)
        return new

    def get_current_player(self, state: dict) -> int:
        phase = self._phase(state)
        if phase in ("deal_p0", "deal_p1", "deal_public"):
            return CHANCE_PLAYER
        if phase == "done":
            return TERMINAL_PLAYER
        seq = state["round1"] if phase == "bet1" else state["round2"]
        return len(seq) % 2

    def get_player_name(self, player_id: int) -> str:
        return f"Player {player_id}"

    def get_rewards(self, state: dict) -> list[float]:
        if self._phase(state) != "done":
            return [0.0, 0.0]
        if state["folded"] is not None:
            loser = state["folded"]
            stake = float(state["contrib"][loser])
        else:
            v0 = self._showdown_value(state["cards"][0], state["public"])
            v1 = self._showdown_value(state["cards"][1], state["public"])
            if v0 == v1:
                return [0.0, 0.0]
            loser = 1 if v0 > v1 else 0
            stake = float(state["contrib"][loser])
        rewards = [0.0, 0.0]
        rewards[loser] = -stake
        rewards[1 - loser] = stake
        return rewards

    def get_legal_actions(self, state: dict) -> list[str]:
        phase = self._phase(state)
        if phase == "done":
            return []
        if phase in ("deal_p0", "deal_p1", "deal_public"):
            remaining = self._remaining_ranks(state)
            return [f"deal:{r}" for r in RANKS if remaining[r] > 0]
        seq = state["round1"] if phase == "bet1" else state["round2"]
        if seq and seq[-1] == "Raise":
            return ["Fold", "Call"]
        return ["Fold", "Call", "Raise"]

    def get_observations(self, state: dict) -> list[dict]:
        return [self._observation(state, 0), self._observation(state, 1)]

    def resample_history(
        self, obs_action_history: list[tuple[dict, Optional[str]]], player_id: int
    ) -> list[str]:
        """Sample a full trajectory consistent with the observer's history.

        Only the opponent's private card is hidden; candidates are drawn
        from the ranks still available given the observer's card and the
        public card, then verified by replay.
        """
        if not obs_action_history:
            return []
        last_obs, last_action = obs_action_history[-1]
        own = last_obs["card"]
        public_actions = list(last_obs["history"])
        if last_action is not None:
            public_actions.append(last_action)
        remaining = {r: COPIES_PER_RANK for r in RANKS}
        remaining[own] -= 1
        if last_obs["public_card"] is not None:
            remaining[last_obs["public_card"]] -= 1
        candidates = [r for r in RANKS if remaining[r] > 0]
        self._rng.shuffle(candidates)
        for opponent in candidates:
            cards = [own, opponent] if player_id == 0 else [opponent, own]
            trajectory = [f"deal:{cards[0]}", f"deal:{cards[1]}", *public_actions]
            if self._replays_consistently(trajectory, obs_action_history, player_id):
                return trajectory
        return []

    # -- internals --------------------------------------------------------

    @staticmethod
    def _round_complete(seq: list[str]) -> bool:
        if not seq:
            return False
        return seq[-1] == "Fold" or (len(seq) >= 2 and seq[-1] == "Call")

    def _phase(self, state: dict) -> str:
        if state["folded"] is not None:
            return "done"
        if state["cards"][0] is None:
            return "deal_p0"
        if state["cards"][1] is None:
            return "deal_p1"
        if not self._round_complete(state["round1"]):
            return "bet1"
        if state["public"] is None:
            return "deal_public"
        if not self._round_complete(state["round2"]):
            return "bet2"
        return "done"

    def _remaining_ranks(self, state: dict) -> dict[str, int]:
        remaining = {r: COPIES_PER_RANK for r in RANKS}
        for card in (*state["cards"], state["public"]):
            if card is not None:
                remaining[card] -= 1
        return remaining

    @staticmethod
    def _showdown_value(card: str, public: str) -> int:
        pair_bonus = 100 if card == public else 0
        return pair_bonus + RANK_VALUE[card]

    def _observation(self, state: dict, player: int) -> dict:
        history = list(state["round1"])
        if state["public"] is not None:
            history.append(f"deal:{state['public']}")
        history.extend(state["round2"])
        return {
            "player": player,
            "card": state["cards"][player],
            "public_card": state["public"],
            "history": history,
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
