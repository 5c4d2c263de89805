"""Tier 2: fuzz the engine with random trajectories and score 4 invariants.

Each trajectory walks uniformly random legal actions from a fresh initial
state until terminal or the step cap. The four checks pass only if they
held on every trajectory:

  no_crash        no candidate exception, and no dead end (a non-terminal
                  state with no legal actions counts as a crash failure)
  immutable       apply_action never mutated its input state
  deterministic   re-applying one sampled (state, action) pair per walk
                  reproduces a fingerprint-identical successor; chance
                  nodes are exempt
  terminal_empty  terminal states report no legal actions
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..gamespec import GameSpec, TERMINAL_PLAYER, derive_seed, is_chance_state
from ..session import Session, SessionDead, SessionError, SessionFactory
from . import TierReport

DYNAMICS_CHECKS = ("no_crash", "immutable", "deterministic", "terminal_empty")


@dataclass(frozen=True)
class FuzzConfig:
    """Trajectory count, walk cap and seed for one fuzzing run."""

    n_trajectories: int = 100
    max_walk_steps: int = 200
    rng_seed: int = 42

    def __post_init__(self) -> None:
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")
        if self.max_walk_steps < 1:
            raise ValueError("max_walk_steps must be >= 1")


@dataclass
class _ChosenStep:
    """The reservoir-sampled (state, action) pair probed for determinism.

    The successor fingerprint is taken the moment the pair is selected,
    before any later candidate call can touch the stored successor object
    (a mutating engine corrupts its own handle table as the walk goes on).
    """

    state: int
    action: str
    successor_fingerprint: str


def run_dynamics(
    session_factory: SessionFactory, cfg: FuzzConfig, spec: GameSpec
) -> TierReport:
    """Fuzz one candidate and report the four dynamics checks."""
    results = {name: True for name in DYNAMICS_CHECKS}
    diagnostics: list[str] = []
    session = session_factory()
    try:
        for walk_index in range(cfg.n_trajectories):
            rng = random.Random(derive_seed(cfg.rng_seed, "walk", walk_index))
            try:
                _walk(session, rng, cfg, spec, walk_index, results, diagnostics)
            except SessionDead:
                results["no_crash"] = False
                diagnostics.append(f"walk {walk_index}: session died; aborting fuzz")
                break
    finally:
        session.close()
    return TierReport(
        tier="dynamics",
        checks=[(name, results[name]) for name in DYNAMICS_CHECKS],
        diagnostics=diagnostics,
    )


def _walk(
    session: Session,
    rng: random.Random,
    cfg: FuzzConfig,
    spec: GameSpec,
    walk_index: int,
    results: dict[str, bool],
    diagnostics: list[str],
) -> None:
    def crash(stage: str, exc: Exception) -> None:
        if results["no_crash"]:
            diagnostics.append(f"walk {walk_index}: crash in {stage}: {exc}")
        results["no_crash"] = False

    try:
        state = session.initial_state()
    except SessionDead:
        raise
    except SessionError as exc:
        crash("initial_state", exc)
        return

    chosen: _ChosenStep | None = None
    eligible_count = 0
    for _ in range(cfg.max_walk_steps):
        try:
            player = session.current_player(state)
        except SessionDead:
            raise
        except SessionError as exc:
            crash("current_player", exc)
            break

        try:
            actions = session.legal_actions(state)
        except SessionDead:
            raise
        except SessionError as exc:
            crash("legal_actions", exc)
            break

        if player == TERMINAL_PLAYER:
            if actions != []:
                if results["terminal_empty"]:
                    diagnostics.append(
                        f"walk {walk_index}: terminal state reports actions: {actions!r}"
                    )
                results["terminal_empty"] = False
            break

        if not isinstance(actions, list) or not actions:
            if results["no_crash"]:
                diagnostics.append(
                    f"walk {walk_index}: dead end, non-terminal state with actions {actions!r}"
                )
            results["no_crash"] = False
            break

        action = rng.choice(actions)
        try:
            applied = session.apply_action(state, action)
        except SessionDead:
            raise
        except SessionError as exc:
            crash(f"apply_action({action!r})", exc)
            break

        if applied.input_mutated:
            if results["immutable"]:
                diagnostics.append(f"walk {walk_index}: apply_action mutated its input")
            results["immutable"] = False

        if not is_chance_state(player, actions, spec):
            eligible_count += 1
            if rng.randrange(eligible_count) == 0:
                try:
                    fp = session.fingerprint(applied.new_state)
                    chosen = _ChosenStep(state, action, fp)
                except SessionDead:
                    raise
                except SessionError as exc:
                    crash("fingerprint", exc)
                    break
        state = applied.new_state
    else:
        diagnostics.append(
            f"walk {walk_index}: possible non-termination, cap of {cfg.max_walk_steps} steps hit"
        )

    if chosen is not None:
        _probe_determinism(session, chosen, walk_index, results, diagnostics)


def _probe_determinism(
    session: Session,
    chosen: _ChosenStep,
    walk_index: int,
    results: dict[str, bool],
    diagnostics: list[str],
) -> None:
    try:
        replayed = session.apply_action(chosen.state, chosen.action)
    except SessionDead:
        raise
    except SessionError as exc:
        if results["no_crash"]:
            diagnostics.append(
                f"walk {walk_index}: crash while re-applying {chosen.action!r}: {exc}"
            )
        results["no_crash"] = False
        return
    if replayed.input_mutated:
        if results["immutable"]:
            diagnostics.append(f"walk {walk_index}: re-apply mutated its input")
        results["immutable"] = False
    try:
        second = session.fingerprint(replayed.new_state)
    except SessionDead:
        raise
    except SessionError as exc:
        if results["no_crash"]:
            diagnostics.append(f"walk {walk_index}: fingerprint failed: {exc}")
        results["no_crash"] = False
        return
    if chosen.successor_fingerprint != second:
        if results["deterministic"]:
            diagnostics.append(
                f"walk {walk_index}: action {chosen.action!r} produced two different successors"
            )
        results["deterministic"] = False
