"""The session contract every candidate game engine is driven through.

A session owns one live engine (an in-process object or a supervised
subprocess) and exposes the engine's required functions. States never
leave the engine: the harness holds integer handles and compares states
via fingerprints. All candidate failures surface as typed exceptions so
tier runners can turn them into check results instead of crashing.
"""

from __future__ import annotations

import copy
import inspect
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .canon import canonicalize_value, fingerprint_native

# Wire-level function names mapped to the attribute each candidate must define.
API_FUNCTIONS: dict[str, str] = {
    "initial_state": "get_initial_state",
    "apply_action": "apply_action",
    "current_player": "get_current_player",
    "rewards": "get_rewards",
    "legal_actions": "get_legal_actions",
    "observations": "get_observations",
    "player_name": "get_player_name",
    "resample_history": "resample_history",
}

# The six functions whose presence Tier 1 requires; player_name and
# resample_history are reported but their absence is not an API failure.
CORE_API = (
    "initial_state",
    "apply_action",
    "current_player",
    "rewards",
    "legal_actions",
    "observations",
)


class SessionError(Exception):
    """Base class for anything that goes wrong talking to a candidate."""


class CandidateCrash(SessionError):
    """The candidate raised (or returned something the transport rejects)."""


class UnsupportedOperation(SessionError):
    """The candidate does not define the requested function."""


class SessionDead(SessionError):
    """The session was closed or its process died; handles are invalid."""


class CallTimeout(SessionError):
    """A single candidate call exceeded its time budget."""


class ProtocolError(SessionError):
    """The remote side violated the wire protocol."""


class SpawnError(SessionError):
    """The adapter process itself could not be started (a harness fault)."""


@dataclass
class SessionInfo:
    """Load status and per-function presence for one candidate."""

    api_present: dict[str, bool] = field(default_factory=dict)
    load_ok: bool = False
    load_error: Optional[str] = None
    resample_source: Optional[str] = None

    def core_api_complete(self) -> bool:
        return all(self.api_present.get(name, False) for name in CORE_API)


@dataclass(frozen=True)
class ApplyResult:
    """Outcome of one apply_action call."""

    new_state: int
    input_mutated: bool


@dataclass(frozen=True)
class WalkStep:
    """One decision made during a recorded walk."""

    state: int
    acting_player: int
    action: str


@dataclass
class WalkRecord:
    """A walk through a game with per-player observation fingerprints.

    obs_fingerprints[i] holds one entry per player for the state of
    steps[i]; final_state/final_obs describe where the walk stopped.
    """

    steps: list[WalkStep] = field(default_factory=list)
    obs_fingerprints: list[list[str]] = field(default_factory=list)
    final_state: Optional[int] = None
    final_player: Optional[int] = None
    final_obs_fingerprints: Optional[list[str]] = None


class Session(ABC):
    """One live candidate engine addressed through handles."""

    @abstractmethod
    def info(self) -> SessionInfo: ...

    @abstractmethod
    def initial_state(self) -> int: ...

    @abstractmethod
    def apply_action(self, state: int, action: str) -> ApplyResult: ...

    @abstractmethod
    def current_player(self, state: int) -> Any: ...

    @abstractmethod
    def legal_actions(self, state: int) -> Any: ...

    @abstractmethod
    def rewards(self, state: int) -> Any: ...

    @abstractmethod
    def observations(self, state: int) -> Any: ...

    @abstractmethod
    def player_name(self, player: int) -> str: ...

    @abstractmethod
    def fingerprint(self, state: int) -> str: ...

    @abstractmethod
    def resample(self, entries: list[tuple[int, Optional[str]]], player: int) -> Any: ...

    @abstractmethod
    def state_is_map(self, state: int) -> bool: ...

    @abstractmethod
    def state_is_none(self, state: int) -> bool: ...

    @abstractmethod
    def close(self) -> None: ...

    def __enter__(self) -> "Session":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def observation_fingerprint(self, state: int, player: int) -> str:
        """Fingerprint of one player's observation at a state."""
        obs = self.observations(state)
        if not isinstance(obs, list) or player >= len(obs):
            raise CandidateCrash(
                f"observations did not return a per-player list (player {player})"
            )
        return fingerprint_native(obs[player])


SessionFactory = Callable[[], Session]


def safe_player_name(session: Session, player: int) -> str:
    """player_name with the documented fallback when the function is missing."""
    try:
        name = session.player_name(player)
    except SessionError:
        return f"player-{player}"
    if isinstance(name, str) and name:
        return name
    return f"player-{player}"


class FunctionSession(Session):
    """Session over an in-process object exposing the required functions.

    The target is any object (module, instance, namespace) whose
    attributes follow the candidate naming convention (get_initial_state,
    apply_action, ...). Mutation probing snapshots the input state before
    apply_action and structurally compares afterwards; it can be disabled
    for search workloads where the extra deep copies dominate runtime.
    """

    def __init__(self, target: Any, probe_mutation: bool = True):
        self._target = target
        self._probe_mutation = probe_mutation
        self._states: dict[int, Any] = {}
        self._next_handle = 0
        self._obs_cache: dict[tuple[int, int], Any] = {}
        self._fn_cache: dict[str, Callable[..., Any]] = {}
        self._closed = False

    # -- plumbing ---------------------------------------------------------

    def _check_open(self) -> None:
        if self._closed:
            raise SessionDead("session is closed")

    def _func(self, name: str) -> Callable[..., Any]:
        fn = self._fn_cache.get(name)
        if fn is None:
            attr = API_FUNCTIONS[name]
            fn = getattr(self._target, attr, None)
            if fn is None or not callable(fn):
                raise UnsupportedOperation(f"candidate does not define {attr}")
            self._fn_cache[name] = fn
        return fn

    def _call(self, name: str, *args: Any) -> Any:
        self._check_open()
        fn = self._func(name)
        try:
            return fn(*args)
        except SessionError:
            raise
        except Exception as exc:  # noqa: BLE001 - candidate faults become crash errors
            raise CandidateCrash(f"{type(exc).__name__}: {exc}") from exc

    def _store(self, state: Any) -> int:
        handle = self._next_handle
        self._next_handle += 1
        self._states[handle] = state
        return handle

    def _lookup(self, handle: int) -> Any:
        self._check_open()
        if handle not in self._states:
            raise ProtocolError(f"unknown state handle: {handle}")
        return self._states[handle]

    # -- contract ---------------------------------------------------------

    def info(self) -> SessionInfo:
        self._check_open()
        present = {
            name: callable(getattr(self._target, attr, None))
            for name, attr in API_FUNCTIONS.items()
        }
        source: Optional[str] = None
        if present["resample_history"]:
            try:
                source = inspect.getsource(getattr(self._target, "resample_history"))
            except (OSError, TypeError):
                source = None
        return SessionInfo(api_present=present, load_ok=True, resample_source=source)

    def initial_state(self) -> int:
        state = self._call("initial_state")
        return self._store(state)

    def apply_action(self, state: int, action: str) -> ApplyResult:
        native = self._lookup(state)
        snapshot = None
        if self._probe_mutation:
            try:
                snapshot = copy.deepcopy(native)
            except Exception:  # noqa: BLE001 - uncopyable states skip probing
                snapshot = None
        new_native = self._call("apply_action", native, action)
        mutated = False
        if snapshot is not None:
            try:
                mutated = snapshot != native
            except Exception:  # noqa: BLE001
                mutated = False
        return ApplyResult(new_state=self._store(new_native), input_mutated=mutated)

    def current_player(self, state: int) -> Any:
        return self._call("current_player", self._lookup(state))

    def legal_actions(self, state: int) -> Any:
        result = self._call("legal_actions", self._lookup(state))
        return self._transport(result)

    def rewards(self, state: int) -> Any:
        result = self._call("rewards", self._lookup(state))
        return self._transport(result)

    def observations(self, state: int) -> Any:
        result = self._call("observations", self._lookup(state))
        if isinstance(result, list):
            for player, native in enumerate(result):
                self._obs_cache[(state, player)] = native
        return self._transport(result)

    def player_name(self, player: int) -> str:
        return self._call("player_name", player)

    def fingerprint(self, state: int) -> str:
        native = self._lookup(state)
        try:
            return fingerprint_native(native)
        except Exception as exc:  # noqa: BLE001
            raise CandidateCrash(f"state not fingerprintable: {exc}") from exc

    def resample(self, entries: list[tuple[int, Optional[str]]], player: int) -> Any:
        history = []
        for handle, action in entries:
            key = (handle, player)
            if key not in self._obs_cache:
                self.observations(handle)
            if key not in self._obs_cache:
                raise CandidateCrash(f"no observation available for handle {handle}")
            history.append((self._obs_cache[key], action))
        return self._call("resample_history", history, player)

    def observation_fingerprint(self, state: int, player: int) -> str:
        # Same digest as the base implementation, but canonicalizes only the
        # requested player's observation; the search loop lives on this path.
        result = self._call("observations", self._lookup(state))
        if isinstance(result, list):
            for index, native in enumerate(result):
                self._obs_cache[(state, index)] = native
        if not isinstance(result, list) or player >= len(result):
            raise CandidateCrash(
                f"observations did not return a per-player list (player {player})"
            )
        try:
            return fingerprint_native(result[player])
        except Exception as exc:  # noqa: BLE001
            raise CandidateCrash(f"observation not transportable: {exc}") from exc

    def state_is_map(self, state: int) -> bool:
        return isinstance(self._lookup(state), dict)

    def state_is_none(self, state: int) -> bool:
        return self._lookup(state) is None

    def close(self) -> None:
        self._closed = True
        self._states.clear()
        self._obs_cache.clear()

    # -- helpers ----------------------------------------------------------

    def _transport(self, value: Any) -> Any:
        try:
            return canonicalize_value(value)
        except Exception as exc:  # noqa: BLE001
            raise CandidateCrash(f"value not transportable: {exc}") from exc
