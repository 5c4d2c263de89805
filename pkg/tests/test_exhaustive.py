"""Brute-force enumeration: budgets and action filters."""

from __future__ import annotations

import pytest

from cwmharness import make_game
from cwmharness.exhaustive import BudgetExceeded, enumerate_terminals


def test_budget_exceeded_is_loud():
    game = make_game("generalized_tic_tac_toe")  # 6x6 tree does not fit anywhere
    with pytest.raises(BudgetExceeded):
        enumerate_terminals(game, max_nodes=10_000)


def test_enumeration_is_deterministic(kuhn_game):
    assert enumerate_terminals(kuhn_game) == enumerate_terminals(kuhn_game)


def test_call_only_leduc_reaches_only_showdowns(leduc_game):
    def call_only(player, actions):
        return [a for a in actions if a == "Call"]

    terminals = enumerate_terminals(leduc_game, action_filter=call_only)
    assert terminals
    for seq, rewards in terminals:
        assert "Fold" not in seq and "Raise" not in seq
        # every terminal is a full showdown: two private deals, two betting
        # rounds of two checks, and the public deal in between
        assert len(seq) == 7
        assert sum(rewards) == 0


def test_filter_applies_only_to_player_decisions(kuhn_game):
    # Forbidding every player action prunes the whole tree below the deals.
    terminals = enumerate_terminals(kuhn_game, action_filter=lambda p, a: [])
    assert terminals == []
