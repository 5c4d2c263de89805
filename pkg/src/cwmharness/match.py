"""Head-to-head matches between agents on one engine.

Agents are specified with a small grammar: "random",
"mcts:sims=N[,c=X]" or "ismcts:sims=N[,c=X]". Seats alternate between
games so both agents play first equally often, and every source of
randomness derives from the master seed.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Optional

from .gamespec import GameSpec, TERMINAL_PLAYER, derive_seed, is_chance_state
from .session import Session, SessionError, SessionFactory, WalkRecord, WalkStep
from .solver import SearchConfig, SearchError, ismcts_choose, mcts_choose

AGENT_KINDS = ("random", "mcts", "ismcts")

# Defensive cap so a non-terminating engine cannot wedge a match.
MAX_GAME_STEPS = 1000


@dataclass(frozen=True)
class AgentSpec:
    kind: str
    n_simulations: int = 1000
    exploration_constant: Optional[float] = None

    def search_config(self, seed: int) -> SearchConfig:
        kwargs: dict = {"n_simulations": self.n_simulations, "rng_seed": seed}
        if self.exploration_constant is not None:
            kwargs["exploration_constant"] = self.exploration_constant
        return SearchConfig(**kwargs)


def parse_agent_spec(text: str) -> AgentSpec:
    """Parse the CLI agent grammar; raises ValueError on bad input."""
    if text == "random":
        return AgentSpec(kind="random")
    match = re.fullmatch(r"(mcts|ismcts):([a-z0-9=.,]+)", text)
    if not match:
        raise ValueError(f"bad agent spec {text!r}; expected random, mcts:sims=N or ismcts:sims=N")
    kind, args_text = match.groups()
    sims: Optional[int] = None
    c: Optional[float] = None
    for part in args_text.split(","):
        key, _, value = part.partition("=")
        if key == "sims":
            sims = int(value)
        elif key == "c":
            c = float(value)
        else:
            raise ValueError(f"bad agent spec {text!r}: unknown key {key!r}")
    if sims is None or sims < 1:
        raise ValueError(f"bad agent spec {text!r}: sims must be a positive integer")
    return AgentSpec(kind=kind, n_simulations=sims, exploration_constant=c)


def validate_agent_for_game(agent: AgentSpec, spec: GameSpec) -> None:
    if agent.kind == "mcts" and spec.imperfect:
        raise ValueError(f"mcts cannot play imperfect-information {spec.name}; use ismcts")
    if agent.kind == "ismcts" and not spec.imperfect:
        raise ValueError(f"ismcts needs an imperfect-information game; {spec.name} is perfect")


@dataclass
class MatchReport:
    games_requested: int
    games_played: int = 0
    wins: int = 0  # agent0 strictly ahead of agent1
    draws: int = 0
    losses: int = 0
    mean_rewards: list = field(default_factory=lambda: [0.0, 0.0])  # per agent
    first_mover_wins: int = 0
    incomplete: bool = False
    failure: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "games_requested": self.games_requested,
            "games_played": self.games_played,
            "wins": self.wins,
            "draws": self.draws,
            "losses": self.losses,
            "mean_rewards": list(self.mean_rewards),
            "first_mover_wins": self.first_mover_wins,
            "incomplete": self.incomplete,
            "failure": self.failure,
        }


def play_match(
    session_factory: SessionFactory,
    spec: GameSpec,
    agent0: AgentSpec,
    agent1: AgentSpec,
    n_games: int,
    seed: int = 0,
) -> MatchReport:
    """Play n_games with alternating seats; report from agent0's perspective."""
    validate_agent_for_game(agent0, spec)
    validate_agent_for_game(agent1, spec)
    report = MatchReport(games_requested=n_games)
    totals = [0.0, 0.0]
    record_walks = "ismcts" in (agent0.kind, agent1.kind)

    for game_index in range(n_games):
        seat_of_agent0 = game_index % 2
        agents_by_seat = {
            seat_of_agent0: agent0,
            1 - seat_of_agent0: agent1,
        }
        try:
            seat_rewards = _play_one(
                session_factory,
                spec,
                agents_by_seat,
                derive_seed(seed, "game", game_index),
                record_walks,
            )
        except (SessionError, SearchError, RuntimeError) as exc:
            report.incomplete = True
            report.failure = f"game {game_index}: {exc}"
            break
        reward0 = seat_rewards[seat_of_agent0]
        reward1 = seat_rewards[1 - seat_of_agent0]
        totals[0] += reward0
        totals[1] += reward1
        report.games_played += 1
        if reward0 > reward1:
            report.wins += 1
        elif reward0 < reward1:
            report.losses += 1
        else:
            report.draws += 1
        if seat_rewards[0] > seat_rewards[1]:
            report.first_mover_wins += 1

    if report.games_played:
        report.mean_rewards = [t / report.games_played for t in totals]
    return report


def _play_one(
    session_factory: SessionFactory,
    spec: GameSpec,
    agents_by_seat: dict[int, AgentSpec],
    game_seed: int,
    record_walk: bool,
) -> list[float]:
    chance_rng = random.Random(derive_seed(game_seed, "chance"))
    with session_factory() as session:
        state = session.initial_state()
        walk = WalkRecord()
        for step_index in range(MAX_GAME_STEPS):
            player = session.current_player(state)
            if player == TERMINAL_PLAYER:
                rewards = session.rewards(state)
                return [float(r) for r in rewards]
            actions = session.legal_actions(state)
            if not isinstance(actions, list) or not actions:
                raise RuntimeError("dead end: non-terminal state with no legal actions")
            if record_walk:
                session.observations(state)  # populate the native cache for resampling
            if is_chance_state(player, actions, spec):
                action = chance_rng.choice(actions)
            else:
                agent = agents_by_seat[player]
                action = _agent_action(
                    agent, session, spec, state, player, walk,
                    derive_seed(game_seed, "seat", player, step_index),
                )
                if action not in actions:
                    raise RuntimeError(f"agent chose illegal action {action!r}")
            if record_walk:
                walk.steps.append(WalkStep(state=state, acting_player=player, action=action))
            state = session.apply_action(state, action).new_state
        raise RuntimeError(f"game exceeded {MAX_GAME_STEPS} steps")


def _agent_action(
    agent: AgentSpec,
    session: Session,
    spec: GameSpec,
    state: int,
    player: int,
    walk: WalkRecord,
    seed: int,
) -> str:
    if agent.kind == "random":
        actions = session.legal_actions(state)
        return random.Random(seed).choice(actions)
    if agent.kind == "mcts":
        return mcts_choose(session, state, agent.search_config(seed), spec)
    walk.final_state = state
    walk.final_player = player
    return ismcts_choose(session, walk, player, agent.search_config(seed), spec)
