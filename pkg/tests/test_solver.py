"""Search behavior pinned against exhaustive oracles."""

from __future__ import annotations

import pytest

from cwmharness import SearchConfig, SearchError, builtin_candidate, make_game
from cwmharness.session import WalkRecord, WalkStep
from cwmharness.solver import ismcts_choose, ismcts_search, mcts_choose, mcts_search

from oracle_helpers import minimax_rewards


def advance(session, actions):
    state = session.initial_state()
    for action in actions:
        state = session.apply_action(state, action).new_state
    return state


# X: 0,0 0,1 / O: 1,0 1,1; X to move. Only 0,2 wins immediately.
WINNING_LINE = ["0,0", "1,0", "0,1", "1,1"]
# X: 0,0 2,2 / O: 1,0 1,1 threatening 1,2; X must block at 1,2.
BLOCKING_LINE = ["0,0", "1,0", "2,2", "1,1"]


def test_minimax_oracle_confirms_the_winning_cell(ttt_game):
    engine = ttt_game.build_engine()
    state = engine.get_initial_state()
    for action in WINNING_LINE:
        state = engine.apply_action(state, action)
    winning = [
        action
        for action in engine.get_legal_actions(state)
        if minimax_rewards(engine, engine.apply_action(state, action))[0] == 1.0
    ]
    assert winning == ["0,2"]


def test_mcts_finds_the_winning_cell(ttt_game):
    session = ttt_game.make_session(probe_mutation=False)
    root = advance(session, WINNING_LINE)
    action = mcts_choose(session, root, SearchConfig(n_simulations=1000, rng_seed=3), ttt_game.spec)
    assert action == "0,2"


def test_mcts_blocks_the_opponent_threat(ttt_game):
    engine = ttt_game.build_engine()
    state = engine.get_initial_state()
    for action in BLOCKING_LINE:
        state = engine.apply_action(state, action)
    # oracle: blocking is the only non-losing reply
    survivors = [
        action
        for action in engine.get_legal_actions(state)
        if minimax_rewards(engine, engine.apply_action(state, action))[0] >= 0.0
    ]
    assert survivors == ["1,2"]

    session = ttt_game.make_session(probe_mutation=False)
    root = advance(session, BLOCKING_LINE)
    action = mcts_choose(session, root, SearchConfig(n_simulations=2000, rng_seed=3), ttt_game.spec)
    assert action == "1,2"


def test_single_legal_action_needs_no_budget(ttt_game):
    session = ttt_game.make_session(probe_mutation=False)
    # fill all but one cell without finishing the game
    line = ["0,0", "0,1", "0,2", "1,1", "1,0", "1,2", "2,1", "2,0"]
    root = advance(session, line)
    assert session.legal_actions(root) == ["2,2"]
    action = mcts_choose(session, root, SearchConfig(n_simulations=1, rng_seed=0), ttt_game.spec)
    assert action == "2,2"


def test_search_never_disturbs_the_root(ttt_game):
    session = ttt_game.make_session(probe_mutation=False)
    root = advance(session, WINNING_LINE)
    before = session.fingerprint(root)
    mcts_choose(session, root, SearchConfig(n_simulations=500, rng_seed=1), ttt_game.spec)
    assert session.fingerprint(root) == before


def test_seeded_searches_are_deterministic(ttt_game):
    results = []
    for _ in range(2):
        session = ttt_game.make_session(probe_mutation=False)
        root = advance(session, ["0,0"])
        result = mcts_search(
            session, root, SearchConfig(n_simulations=400, rng_seed=11), ttt_game.spec
        )
        results.append((result.action, result.visits))
    assert results[0] == results[1]


def test_visit_share_of_the_winning_move_grows_with_budget(ttt_game):
    shares = []
    for budget in (100, 500, 2000):
        session = ttt_game.make_session(probe_mutation=False)
        root = advance(session, WINNING_LINE)
        result = mcts_search(
            session, root, SearchConfig(n_simulations=budget, rng_seed=17), ttt_game.spec
        )
        shares.append(result.visits.get("0,2", 0) / budget)
    assert shares[0] <= shares[1] <= shares[2]


def test_mcts_rejects_terminal_chance_and_imperfect_roots(ttt_game, kuhn_game):
    session = ttt_game.make_session(probe_mutation=False)
    finished = advance(session, ["0,0", "1,0", "0,1", "1,1", "0,2"])
    with pytest.raises(SearchError):
        mcts_choose(session, finished, SearchConfig(n_simulations=10), ttt_game.spec)

    ksession = kuhn_game.make_session(probe_mutation=False)
    chance_root = ksession.initial_state()
    with pytest.raises(SearchError):
        mcts_search(ksession, chance_root, SearchConfig(n_simulations=10), kuhn_game.spec)
    with pytest.raises(SearchError):
        mcts_choose(ksession, chance_root, SearchConfig(n_simulations=10), kuhn_game.spec)


# -- ISMCTS -------------------------------------------------------------------


def kuhn_decision_walk(session, deals, bets, player):
    """Drive a real Kuhn game to the probed player's decision point."""
    state = session.initial_state()
    walk = WalkRecord()
    for action in deals + bets:
        acting = session.current_player(state)
        session.observations(state)  # populate the resample cache
        walk.steps.append(WalkStep(state=state, acting_player=acting, action=action))
        state = session.apply_action(state, action).new_state
    session.observations(state)
    walk.final_state = state
    walk.final_player = session.current_player(state)
    assert walk.final_player == player
    return walk


def test_oracle_call_dominates_fold_with_the_king():
    # Holding K facing a raise: calling wins the 2-chip showdown against
    # either opponent card; folding forfeits the ante. Enumerate both.
    engine = make_game("kuhn_poker").build_engine()
    for opponent in ("J", "Q"):
        state = engine.get_initial_state()
        for action in (f"deal:{opponent}", "deal:K", "Raise"):
            state = engine.apply_action(state, action)
        fold = engine.get_rewards(engine.apply_action(state, "Fold"))[1]
        call = engine.get_rewards(engine.apply_action(state, "Call"))[1]
        assert call == 2.0 > fold == -1.0


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_ismcts_calls_with_the_king_facing_a_raise(kuhn_game, seed):
    session = kuhn_game.make_session(probe_mutation=False)
    walk = kuhn_decision_walk(session, ["deal:Q", "deal:K"], ["Raise"], player=1)
    action = ismcts_choose(
        session, walk, 1, SearchConfig(n_simulations=1000, rng_seed=seed), kuhn_game.spec
    )
    assert action == "Call"


class OneChoiceGame:
    """A hidden coin flip, then a single forced move; exists to exercise
    the trivial one-action search case on an imperfect-information game."""

    import random as _random

    def __init__(self):
        self._rng = self._random.Random(0)

    def get_initial_state(self):
        return {"coin": None, "played": False}

    def apply_action(self, state, action):
        if action.startswith("deal:"):
            return {"coin": action.split(":")[1], "played": False}
        return {"coin": state["coin"], "played": True}

    def get_current_player(self, state):
        if state["coin"] is None:
            return -1
        return -4 if state["played"] else 0

    def get_legal_actions(self, state):
        if state["coin"] is None:
            return ["deal:H", "deal:T"]
        return [] if state["played"] else ["go"]

    def get_rewards(self, state):
        if not state["played"]:
            return [0.0, 0.0]
        return [1.0, -1.0] if state["coin"] == "H" else [-1.0, 1.0]

    def get_observations(self, state):
        public = {"played": state["played"], "dealt": state["coin"] is not None}
        return [dict(public), dict(public)]

    def get_player_name(self, player_id):
        return f"Player {player_id}"

    def resample_history(self, obs_action_history, player_id):
        coin = self._rng.choice(["H", "T"])
        actions = [f"deal:{coin}"]
        if obs_action_history and obs_action_history[-1][1] is not None:
            actions.append(obs_action_history[-1][1])
        return actions


def test_ismcts_single_legal_action():
    from cwmharness import FunctionSession, GameSpec

    spec = GameSpec(name="one_choice", info_kind="imperfect")
    session = FunctionSession(OneChoiceGame(), probe_mutation=False)
    state = session.initial_state()
    session.observations(state)
    walk = WalkRecord()
    chance = session.current_player(state)
    walk.steps.append(WalkStep(state=state, acting_player=chance, action="deal:H"))
    state = session.apply_action(state, "deal:H").new_state
    session.observations(state)
    walk.final_state = state
    walk.final_player = session.current_player(state)
    action = ismcts_choose(session, walk, 0, SearchConfig(n_simulations=5, rng_seed=0), spec)
    assert action == "go"


def test_ismcts_requires_the_searching_players_turn(kuhn_game):
    session = kuhn_game.make_session(probe_mutation=False)
    walk = kuhn_decision_walk(session, ["deal:J", "deal:Q"], [], player=0)
    with pytest.raises(SearchError):
        ismcts_choose(session, walk, 1, SearchConfig(n_simulations=10), kuhn_game.spec)


def test_ismcts_fails_loudly_on_a_stub_resampler():
    spec = make_game("kuhn_poker").spec
    _, factory = builtin_candidate("mutant_stub_resampler", chance_seed=0)
    session = factory()
    walk = kuhn_decision_walk(session, ["deal:Q", "deal:K"], ["Raise"], player=1)
    with pytest.raises(SearchError, match="determinizations failed"):
        ismcts_choose(session, walk, 1, SearchConfig(n_simulations=40, rng_seed=0), spec)


def test_ismcts_refuses_perfect_information_games(ttt_game):
    session = ttt_game.make_session(probe_mutation=False)
    with pytest.raises(SearchError):
        ismcts_choose(session, WalkRecord(), 0, SearchConfig(n_simulations=10), ttt_game.spec)


def test_ismcts_determinism(kuhn_game):
    chosen = []
    for _ in range(2):
        session = kuhn_game.make_session(probe_mutation=False)
        walk = kuhn_decision_walk(session, ["deal:J", "deal:Q"], [], player=0)
        result = ismcts_search(
            session, walk, 0, SearchConfig(n_simulations=200, rng_seed=21), kuhn_game.spec
        )
        chosen.append((result.action, result.visits))
    assert chosen[0] == chosen[1]
