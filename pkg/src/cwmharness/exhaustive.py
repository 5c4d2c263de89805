"""Brute-force game-tree enumeration, the independent oracle for small games.

Walks every action (chance included) depth-first directly over the engine
functions, with a node budget to keep accidental blowups loud instead of
slow. An optional filter restricts the actions explored at player
decision nodes, which lets tests force specific lines of play.
"""

from __future__ import annotations

from typing import Any, Callable, Optional

from .games import ReferenceGame
from .gamespec import TERMINAL_PLAYER, is_chance_state

ActionFilter = Callable[[int, list[str]], list[str]]


class BudgetExceeded(RuntimeError):
    """The game tree did not fit in the node budget."""


def enumerate_terminals(
    game: ReferenceGame,
    max_nodes: int = 2_000_000,
    action_filter: Optional[ActionFilter] = None,
) -> list[tuple[tuple[str, ...], tuple[float, ...]]]:
    """Exhaustively enumerate (action sequence, rewards) for every terminal.

    Depth-first, left-to-right in the engine's own action order, so the
    result order is deterministic.
    """
    engine = game.build_engine()
    terminals: list[tuple[tuple[str, ...], tuple[float, ...]]] = []
    visited = 0

    def visit(state: Any, prefix: tuple[str, ...]) -> None:
        nonlocal visited
        visited += 1
        if visited > max_nodes:
            raise BudgetExceeded(f"more than {max_nodes} nodes in {game.spec.name}")
        player = engine.get_current_player(state)
        if player == TERMINAL_PLAYER:
            terminals.append((prefix, tuple(engine.get_rewards(state))))
            return
        actions = engine.get_legal_actions(state)
        if not actions:
            raise RuntimeError(f"dead end at non-terminal state after {prefix}")
        if action_filter is not None and not is_chance_state(player, actions, game.spec):
            actions = action_filter(player, list(actions))
            if not actions:
                return
        for action in actions:
            visit(engine.apply_action(state, action), prefix + (action,))

    visit(engine.get_initial_state(), ())
    return terminals
