"""Pytest fixtures shared across the suite."""

from __future__ import annotations

import pytest

from cwmharness import make_game


@pytest.fixture
def ttt_game():
    return make_game("tic_tac_toe")


@pytest.fixture
def kuhn_game():
    return make_game("kuhn_poker", chance_seed=11)


@pytest.fixture
def leduc_game():
    return make_game("leduc_poker", chance_seed=11)
