"""Tier 4: probe history resampling for epistemic consistency.

Each probe walks to a random state while recording the probed player's
(observation fingerprint, action) at each of their turns, asks the
candidate to resample a full trajectory explaining that history, and
replays the trajectory from a fresh initial state. Four checks, each
passing only if it held on every probe:

  resample_legal      every resampled action was legal when applied
  obs_reconstruction  each recorded observation was reproduced at the
                      matching turn of the replay
  action_consistency  each recorded action equals the action the replay
                      took at that turn
  resample_complete   the replay consumed exactly the recorded entries,
                      no fewer and no more

A recorded entry the replay never reaches counts against reconstruction
(and consistency, if it carried an action) as well as completeness; this
is what makes an empty-list stub score near zero instead of passing
vacuously. Candidates without resample_history score exactly zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from ..canon import canonical_fingerprint
from ..gamespec import GameSpec, TERMINAL_PLAYER, derive_seed
from ..session import Session, SessionDead, SessionError, SessionFactory
from . import TierReport

INFORMATION_CHECKS = (
    "resample_legal",
    "obs_reconstruction",
    "action_consistency",
    "resample_complete",
)


@dataclass(frozen=True)
class ProbeConfig:
    """Probe count and seed; probed players alternate 0, 1, 0, ..."""

    n_probes: int = 100
    rng_seed: int = 42

    def __post_init__(self) -> None:
        if self.n_probes < 1:
            raise ValueError("n_probes must be >= 1")


@dataclass(frozen=True)
class _Record:
    state: int
    action: Optional[str]
    obs_fingerprint: str


class _ProbeAbort(Exception):
    """The candidate failed in a way that voids the whole probe."""


def run_information(
    session_factory: SessionFactory, cfg: ProbeConfig, spec: GameSpec
) -> TierReport:
    """Probe one candidate's resampler and report the four checks."""
    if not spec.imperfect:
        raise ValueError(f"information tier does not apply to perfect-information {spec.name}")
    results = {name: True for name in INFORMATION_CHECKS}
    diagnostics: list[str] = []
    session = session_factory()
    try:
        info = session.info()
        if not info.api_present.get("resample_history", False):
            diagnostics.append("resample_history is not defined")
            return TierReport(
                tier="information",
                checks=[(name, False) for name in INFORMATION_CHECKS],
                diagnostics=diagnostics,
            )
        for probe_index in range(cfg.n_probes):
            rng = random.Random(derive_seed(cfg.rng_seed, "probe", probe_index))
            probed = probe_index % 2
            try:
                _probe(session, rng, spec, probed, probe_index, results, diagnostics)
            except _ProbeAbort as abort:
                _fail_all(results, diagnostics, probe_index, str(abort))
            except SessionDead:
                _fail_all(results, diagnostics, probe_index, "session died")
                session.close()
                session = session_factory()
    finally:
        session.close()
    return TierReport(
        tier="information",
        checks=[(name, results[name]) for name in INFORMATION_CHECKS],
        diagnostics=diagnostics,
    )


def _fail_all(
    results: dict[str, bool], diagnostics: list[str], probe_index: int, why: str
) -> None:
    if any(results.values()):
        diagnostics.append(f"probe {probe_index}: {why}")
    for name in results:
        results[name] = False


def _observation_fingerprint(session: Session, state: int, player: int) -> str:
    try:
        obs = session.observations(state)
    except SessionDead:
        raise
    except SessionError as exc:
        raise _ProbeAbort(f"observations failed: {exc}") from exc
    if not isinstance(obs, list) or player >= len(obs):
        raise _ProbeAbort(f"observations gave no entry for player {player}")
    return canonical_fingerprint(obs[player])


def _probe(
    session: Session,
    rng: random.Random,
    spec: GameSpec,
    probed: int,
    probe_index: int,
    results: dict[str, bool],
    diagnostics: list[str],
) -> None:
    records = _record_walk(session, rng, spec, probed)
    try:
        resampled = session.resample([(r.state, r.action) for r in records], probed)
    except SessionDead:
        raise
    except SessionError as exc:
        raise _ProbeAbort(f"resample_history failed: {exc}") from exc
    if not isinstance(resampled, list) or any(not isinstance(a, str) for a in resampled):
        raise _ProbeAbort(f"resample_history returned {type(resampled).__name__}, not a string list")

    flags = _replay(session, resampled, records, probed)
    for name, ok in flags.items():
        if not ok and results[name]:
            diagnostics.append(f"probe {probe_index} (player {probed}): {name} failed")
        results[name] = results[name] and ok


def _record_walk(
    session: Session, rng: random.Random, spec: GameSpec, probed: int
) -> list[_Record]:
    try:
        state = session.initial_state()
    except SessionDead:
        raise
    except SessionError as exc:
        raise _ProbeAbort(f"initial_state failed: {exc}") from exc

    records: list[_Record] = []
    target_steps = rng.randint(1, spec.max_walk_steps)
    for _ in range(target_steps):
        try:
            player = session.current_player(state)
        except SessionDead:
            raise
        except SessionError as exc:
            raise _ProbeAbort(f"current_player failed: {exc}") from exc
        if player == TERMINAL_PLAYER:
            return records
        try:
            actions = session.legal_actions(state)
        except SessionDead:
            raise
        except SessionError as exc:
            raise _ProbeAbort(f"legal_actions failed: {exc}") from exc
        if not isinstance(actions, list) or not actions:
            raise _ProbeAbort("dead end during probe walk")
        action = rng.choice(actions)
        if player == probed:
            fp = _observation_fingerprint(session, state, probed)
            records.append(_Record(state=state, action=action, obs_fingerprint=fp))
        try:
            state = session.apply_action(state, action).new_state
        except SessionDead:
            raise
        except SessionError as exc:
            raise _ProbeAbort(f"apply_action failed: {exc}") from exc

    try:
        player = session.current_player(state)
    except SessionDead:
        raise
    except SessionError as exc:
        raise _ProbeAbort(f"current_player failed: {exc}") from exc
    if player == probed:
        fp = _observation_fingerprint(session, state, probed)
        records.append(_Record(state=state, action=None, obs_fingerprint=fp))
    return records


def _replay(
    session: Session, resampled: list[str], records: list[_Record], probed: int
) -> dict[str, bool]:
    flags = {name: True for name in INFORMATION_CHECKS}
    try:
        state = session.initial_state()
    except SessionDead:
        raise
    except SessionError:
        flags["resample_legal"] = False
        state = None

    index = 0
    aborted = state is None
    if not aborted:
        for action in resampled:
            try:
                player = session.current_player(state)
            except SessionDead:
                raise
            except SessionError:
                flags["resample_legal"] = False
                aborted = True
                break
            if player == probed:
                if index < len(records):
                    record = records[index]
                    if not _obs_matches(session, state, probed, record):
                        flags["obs_reconstruction"] = False
                    if record.action is not None and record.action != action:
                        flags["action_consistency"] = False
                    index += 1
                else:
                    flags["resample_complete"] = False
            try:
                legal = session.legal_actions(state)
            except SessionDead:
                raise
            except SessionError:
                flags["resample_legal"] = False
                aborted = True
                break
            if not isinstance(legal, list) or action not in legal:
                flags["resample_legal"] = False
                aborted = True
                break
            try:
                state = session.apply_action(state, action).new_state
            except SessionDead:
                raise
            except SessionError:
                flags["resample_legal"] = False
                aborted = True
                break

    # A trailing record with no action is consumed by reaching the final state.
    if not aborted and index < len(records) and records[index].action is None:
        try:
            final_player = session.current_player(state)
        except SessionDead:
            raise
        except SessionError:
            final_player = None
        if final_player == probed:
            if not _obs_matches(session, state, probed, records[index]):
                flags["obs_reconstruction"] = False
            index += 1

    if index < len(records):
        flags["resample_complete"] = False
        for record in records[index:]:
            flags["obs_reconstruction"] = False
            if record.action is not None:
                flags["action_consistency"] = False
    return flags


def _obs_matches(session: Session, state: int, probed: int, record: _Record) -> bool:
    try:
        return _observation_fingerprint(session, state, probed) == record.obs_fingerprint
    except _ProbeAbort:
        return False
