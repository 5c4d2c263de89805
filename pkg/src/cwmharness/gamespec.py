"""Game metadata and player-id conventions shared across the harness.

Acting players are 0..n_players-1. Terminal states report the sentinel
player -4. Chance nodes report -1; engines that instead model dealing as
ordinary actions are detected by the configured chance action prefixes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

TERMINAL_PLAYER = -4
CHANCE_PLAYER = -1

DEFAULT_CHANCE_PREFIXES = ("deal:", "chance:")
DEFAULT_MAX_WALK_STEPS = 200


def is_terminal_player(player: int) -> bool:
    """True iff the id is the terminal sentinel (-4)."""
    return player == TERMINAL_PLAYER


@dataclass(frozen=True)
class GameSpec:
    """Static facts the harness needs about a game to verify engines for it."""

    name: str
    n_players: int = 2
    info_kind: str = "perfect"  # "perfect" | "imperfect"
    chance_action_prefixes: tuple[str, ...] = DEFAULT_CHANCE_PREFIXES
    max_walk_steps: int = DEFAULT_MAX_WALK_STEPS
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_players < 1:
            raise ValueError("n_players must be >= 1")
        if self.max_walk_steps < 1:
            raise ValueError("max_walk_steps must be >= 1")
        if self.info_kind not in ("perfect", "imperfect"):
            raise ValueError(f"unknown info_kind: {self.info_kind!r}")

    @property
    def imperfect(self) -> bool:
        return self.info_kind == "imperfect"


def is_chance_state(player: object, legal_actions: object, spec: GameSpec) -> bool:
    """Decide whether a state is a chance node.

    Either the engine says so via the -1 sentinel, or every legal action
    carries a chance prefix (engines that encode dealing as actions while
    still reporting an acting player).
    """
    if player == CHANCE_PLAYER:
        return True
    if not isinstance(legal_actions, list) or not legal_actions:
        return False
    return all(
        isinstance(a, str) and a.startswith(spec.chance_action_prefixes) for a in legal_actions
    )


def derive_seed(master: int, *parts: object) -> int:
    """Derive a stable sub-seed from a master seed and a label path.

    Hash-based so that independent consumers (fuzzing, probing, matches)
    get independent streams that are reproducible across runs and
    platforms.
    """
    text = ":".join([str(master), *[str(p) for p in parts]])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
