"""Reference game rules, pinned against brute-force oracles."""

from __future__ import annotations

import random

import pytest

from cwmharness import make_game
from cwmharness.canon import fingerprint_native
from cwmharness.exhaustive import enumerate_terminals

from oracle_helpers import random_play_outcome_distribution


# -- grid games ---------------------------------------------------------------


def test_tic_tac_toe_shape(ttt_game):
    engine = ttt_game.build_engine()
    state = engine.get_initial_state()
    assert engine.get_current_player(state) == 0
    assert len(engine.get_legal_actions(state)) == 9
    assert engine.get_rewards(state) == [0.0, 0.0]
    assert ttt_game.spec.info_kind == "perfect"


def test_generalized_defaults_are_6x6_line4():
    game = make_game("generalized_tic_tac_toe")
    engine = game.build_engine()
    state = engine.get_initial_state()
    assert len(engine.get_legal_actions(state)) == 36
    assert game.spec.params == {"board_rows": 6, "board_cols": 6, "line_length": 4}


def test_grid_params_override():
    game = make_game("generalized_tic_tac_toe", params={"board_rows": 4, "board_cols": 5, "line_length": 3})
    engine = game.build_engine()
    assert len(engine.get_legal_actions(engine.get_initial_state())) == 20
    with pytest.raises(ValueError):
        make_game("generalized_tic_tac_toe", params={"bogus": 1})
    with pytest.raises(KeyError):
        make_game("no_such_game")


def test_grid_rejects_illegal_moves(ttt_game):
    engine = ttt_game.build_engine()
    state = engine.get_initial_state()
    taken = engine.apply_action(state, "0,0")
    with pytest.raises(ValueError):
        engine.apply_action(taken, "0,0")
    with pytest.raises(ValueError):
        engine.apply_action(state, "9,9")
    with pytest.raises(ValueError):
        engine.apply_action(state, "not-a-cell")


def test_alternation_on_perfect_information_games():
    for name in ("tic_tac_toe", "generalized_tic_tac_toe"):
        engine = make_game(name).build_engine()
        rng = random.Random(13)
        for _ in range(25):
            state = engine.get_initial_state()
            expected = 0
            while engine.get_current_player(state) != -4:
                assert engine.get_current_player(state) == expected
                state = engine.apply_action(state, rng.choice(engine.get_legal_actions(state)))
                expected = 1 - expected


def test_perfect_observations_are_identical(ttt_game):
    engine = ttt_game.build_engine()
    state = engine.apply_action(engine.get_initial_state(), "1,1")
    obs = engine.get_observations(state)
    assert fingerprint_native(obs[0]) == fingerprint_native(obs[1])


def test_tic_tac_toe_exact_random_play_distribution(ttt_game):
    # The exhaustive distribution is the oracle for downstream match bounds.
    dist = random_play_outcome_distribution(ttt_game.build_engine())
    assert abs(float(dist["p0_win"]) - 0.585) < 0.002
    assert 0.55 < float(dist["p0_win"]) < 0.62
    assert float(dist["p1_win"]) < float(dist["p0_win"])


# -- enumeration oracles ------------------------------------------------------


def test_kuhn_has_exactly_30_terminal_histories(kuhn_game):
    terminals = enumerate_terminals(kuhn_game)
    assert len(terminals) == 30
    # 6 deals x 5 betting lines
    deals = {seq[:2] for seq, _ in terminals}
    assert len(deals) == 6
    lines = {seq[2:] for seq, _ in terminals}
    assert lines == {
        ("Call", "Call"),
        ("Call", "Raise", "Fold"),
        ("Call", "Raise", "Call"),
        ("Raise", "Fold"),
        ("Raise", "Call"),
    }


def test_all_enumerable_games_are_exactly_zero_sum():
    games = [
        make_game("tic_tac_toe"),
        make_game("kuhn_poker"),
        make_game("leduc_poker"),
        make_game(
            "generalized_tic_tac_toe",
            params={"board_rows": 3, "board_cols": 3, "line_length": 3},
        ),
    ]
    for game in games:
        terminals = enumerate_terminals(game)
        assert terminals, game.spec.name
        for seq, rewards in terminals:
            assert sum(rewards) == 0, (game.spec.name, seq, rewards)


def test_kuhn_showdown_and_fold_stakes(kuhn_game):
    engine = kuhn_game.build_engine()

    def final(actions):
        state = engine.get_initial_state()
        for action in actions:
            state = engine.apply_action(state, action)
        return engine.get_rewards(state)

    assert final(["deal:K", "deal:Q", "Call", "Call"]) == [1.0, -1.0]
    assert final(["deal:Q", "deal:K", "Raise", "Call"]) == [-2.0, 2.0]
    assert final(["deal:J", "deal:K", "Call", "Raise", "Fold"]) == [-1.0, 1.0]
    assert final(["deal:J", "deal:K", "Raise", "Fold"]) == [1.0, -1.0]


def test_kuhn_fold_only_legal_facing_raise(kuhn_game):
    engine = kuhn_game.build_engine()
    state = engine.get_initial_state()
    for action in ("deal:K", "deal:Q"):
        state = engine.apply_action(state, action)
    assert engine.get_legal_actions(state) == ["Call", "Raise"]
    raised = engine.apply_action(state, "Raise")
    assert engine.get_legal_actions(raised) == ["Fold", "Call"]


# -- Leduc rules --------------------------------------------------------------


def test_leduc_preflop_action_set(leduc_game):
    engine = leduc_game.build_engine()
    state = engine.get_initial_state()
    assert engine.get_current_player(state) == -1
    assert engine.get_legal_actions(state) == ["deal:J", "deal:Q", "deal:K"]
    for action in ("deal:K", "deal:Q"):
        state = engine.apply_action(state, action)
    assert engine.get_current_player(state) == 0
    assert engine.get_legal_actions(state) == ["Fold", "Call", "Raise"]


def test_leduc_deck_has_two_copies_per_rank(leduc_game):
    engine = leduc_game.build_engine()
    state = engine.get_initial_state()
    state = engine.apply_action(state, "deal:K")
    assert "deal:K" in engine.get_legal_actions(state)  # second copy remains
    state = engine.apply_action(state, "deal:K")
    state = engine.apply_action(state, "Call")
    state = engine.apply_action(state, "Call")
    # both kings are gone; the public card can only be J or Q
    assert engine.get_legal_actions(state) == ["deal:J", "deal:Q"]


def test_leduc_bet_sizes_and_pot(leduc_game):
    engine = leduc_game.build_engine()
    state = engine.get_initial_state()
    for action in ("deal:K", "deal:Q", "Raise", "Call", "deal:J", "Raise", "Call"):
        state = engine.apply_action(state, action)
    # ante 1 + round-one raise 2 + round-two raise 4 per player
    assert engine.get_current_player(state) == -4
    assert engine.get_rewards(state) == [7.0, -7.0]


def test_leduc_split_pot_on_equal_ranks(leduc_game):
    engine = leduc_game.build_engine()
    state = engine.get_initial_state()
    for action in ("deal:Q", "deal:Q", "Call", "Call", "deal:K", "Call", "Call"):
        state = engine.apply_action(state, action)
    assert engine.get_rewards(state) == [0.0, 0.0]


def test_leduc_pair_beats_higher_rank(leduc_game):
    engine = leduc_game.build_engine()
    state = engine.get_initial_state()
    for action in ("deal:J", "deal:K", "Call", "Call", "deal:J", "Call", "Call"):
        state = engine.apply_action(state, action)
    assert engine.get_rewards(state) == [1.0, -1.0]  # J pairs the public J


def test_leduc_terminal_count_is_stable(leduc_game):
    # 9 deal pairs x 4 fold-ending round-one lines, plus 3 continuing lines
    # into a public deal (2 or 3 ranks left) and 7 round-two endings.
    terminals = enumerate_terminals(leduc_game)
    assert len(terminals) == 9 * 4 + 3 * (3 * 2 * 7) + 6 * (3 * 3 * 7)


# -- resampler exactness ------------------------------------------------------


@pytest.mark.parametrize("name", ["kuhn_poker", "leduc_poker"])
def test_reference_resampler_is_exact_on_100_random_walks(name):
    game = make_game(name, chance_seed=3)
    engine = game.build_engine()
    rng = random.Random(17)
    checked = 0
    for _ in range(100):
        probed = rng.randrange(2)
        state = engine.get_initial_state()
        history = []
        for _ in range(rng.randint(1, 12)):
            player = engine.get_current_player(state)
            if player == -4:
                break
            actions = engine.get_legal_actions(state)
            action = rng.choice(actions)
            if player == probed:
                history.append((engine.get_observations(state)[probed], action))
            state = engine.apply_action(state, action)
        if engine.get_current_player(state) == probed:
            history.append((engine.get_observations(state)[probed], None))

        trajectory = engine.resample_history(history, probed)
        assert isinstance(trajectory, list)
        if not history:
            assert trajectory == []
            continue
        checked += 1
        # independent replay: observation equality at each probed turn
        replay = engine.get_initial_state()
        index = 0
        for action in trajectory:
            if engine.get_current_player(replay) == probed:
                obs, recorded = history[index]
                assert engine.get_observations(replay)[probed] == obs
                if recorded is not None:
                    assert recorded == action
                index += 1
            assert action in engine.get_legal_actions(replay)
            replay = engine.apply_action(replay, action)
        if engine.get_current_player(replay) == probed and index < len(history):
            obs, recorded = history[index]
            assert recorded is None
            assert engine.get_observations(replay)[probed] == obs
            index += 1
        assert index == len(history)
    assert checked >= 50  # most walks produce a non-empty history
