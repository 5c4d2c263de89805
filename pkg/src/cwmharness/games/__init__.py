"""Registry of reference games and builtin candidates.

Reference games are known-correct engines that double as oracles: they
saturate every verification tier by construction. Builtin candidates add
deliberately broken mutants under stable names so the verifier's
selectivity can be exercised from tests and the command line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional

from ..gamespec import GameSpec
from ..session import FunctionSession, Session
from . import mutants
from .grid import GridLineGame
from .kuhn import KuhnPoker
from .leduc import LeducPoker


@dataclass(frozen=True)
class ReferenceGame:
    """A game spec plus a factory for fresh engine sessions."""

    spec: GameSpec
    build_engine: Callable[[], Any]

    def make_session(self, probe_mutation: bool = True) -> Session:
        return FunctionSession(self.build_engine(), probe_mutation=probe_mutation)

    def session_factory(self, probe_mutation: bool = True) -> Callable[[], Session]:
        def factory() -> Session:
            return self.make_session(probe_mutation=probe_mutation)

        return factory


def _grid_spec(name: str, params: dict) -> GameSpec:
    return GameSpec(name=name, n_players=2, info_kind="perfect", params=dict(params))


def _poker_spec(name: str) -> GameSpec:
    return GameSpec(name=name, n_players=2, info_kind="imperfect")


_GRID_DEFAULTS = {
    "tic_tac_toe": {"board_rows": 3, "board_cols": 3, "line_length": 3},
    "generalized_tic_tac_toe": {"board_rows": 6, "board_cols": 6, "line_length": 4},
}

GAME_NAMES = ("tic_tac_toe", "generalized_tic_tac_toe", "kuhn_poker", "leduc_poker")


def make_game(
    name: str,
    params: Optional[dict] = None,
    chance_seed: Optional[int] = None,
) -> ReferenceGame:
    """Build a reference game by registry name.

    params override the per-game defaults (board_rows, board_cols,
    line_length for the grid games). chance_seed pins the randomness the
    engine itself consumes (currently only history resampling).
    """
    params = dict(params or {})
    if name in _GRID_DEFAULTS:
        merged = {**_GRID_DEFAULTS[name], **params}
        unknown = set(merged) - {"board_rows", "board_cols", "line_length"}
        if unknown:
            raise ValueError(f"unknown params for {name}: {sorted(unknown)}")
        rows, cols, line = merged["board_rows"], merged["board_cols"], merged["line_length"]
        spec = _grid_spec(name, merged)
        return ReferenceGame(spec, lambda: GridLineGame(rows, cols, line))
    if params:
        raise ValueError(f"{name} takes no params")
    if name == "kuhn_poker":
        return ReferenceGame(_poker_spec(name), lambda: KuhnPoker(seed=chance_seed))
    if name == "leduc_poker":
        return ReferenceGame(_poker_spec(name), lambda: LeducPoker(seed=chance_seed))
    raise KeyError(f"unknown game {name!r}; known: {', '.join(GAME_NAMES)}")


# Builtin candidates: every reference game under its own name, plus mutants.
# Each mutant entry is (base game name, engine factory).
_MUTANTS: dict[str, tuple[str, Callable[..., Any]]] = {
    "mutant_mutating": ("tic_tac_toe", lambda seed: mutants.MutatingTicTacToe()),
    "mutant_crash_on_key": ("tic_tac_toe", lambda seed: mutants.CrashOnKeyTicTacToe()),
    "mutant_nondeterministic": ("tic_tac_toe", lambda seed: mutants.NondeterministicTicTacToe()),
    "mutant_terminal_nonempty": ("tic_tac_toe", lambda seed: mutants.TerminalNonemptyTicTacToe()),
    "mutant_dead_end": ("tic_tac_toe", lambda seed: mutants.DeadEndTicTacToe()),
    "mutant_sleeper": ("tic_tac_toe", lambda seed: mutants.SleeperTicTacToe()),
    "mutant_stub_resampler": ("kuhn_poker", lambda seed: mutants.StubResamplerKuhn(seed=seed)),
    "mutant_echo_resampler": ("kuhn_poker", lambda seed: mutants.EchoResamplerKuhn(seed=seed)),
}

BUILTIN_CANDIDATES = GAME_NAMES + tuple(_MUTANTS)


def builtin_candidate(
    name: str,
    chance_seed: Optional[int] = None,
    params: Optional[dict] = None,
) -> tuple[str, Callable[[], Session]]:
    """Resolve a builtin candidate name to (game name, session factory)."""
    if name in GAME_NAMES:
        game = make_game(name, params=params, chance_seed=chance_seed)
        return name, game.session_factory()
    if name in _MUTANTS:
        if params:
            raise ValueError(f"builtin mutant {name!r} takes no game params")
        base, build = _MUTANTS[name]

        def factory() -> Session:
            return FunctionSession(build(chance_seed))

        return base, factory
    raise KeyError(
        f"unknown builtin candidate {name!r}; known: {', '.join(BUILTIN_CANDIDATES)}"
    )
