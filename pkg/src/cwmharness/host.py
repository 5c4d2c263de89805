"""Subprocess supervision and the newline-delimited JSON wire protocol.

The host spawns one adapter process per candidate and drives it with a
strict request/response discipline: one JSON frame per line, exactly one
in-flight request, ids strictly increasing. Candidate faults come back as
typed error frames; transport faults (timeouts, garbage frames, oversize
lines, dead pipes) kill the child so a misbehaving candidate can never
wedge the harness. See docs/protocol.md for the frame catalogue.
"""

from __future__ import annotations

import json
import os
import queue
import shlex
import subprocess
import sys
import threading
from collections import deque
from typing import Any, Optional

from .session import (
    ApplyResult,
    CallTimeout,
    CandidateCrash,
    ProtocolError,
    Session,
    SessionDead,
    SessionError,
    SessionInfo,
    SpawnError,
    UnsupportedOperation,
)

PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 8 * 1024 * 1024
DEFAULT_CALL_TIMEOUT = 5.0
ADAPTER_ENV_VAR = "CWM_ADAPTER"

_KILL_GRACE_SECONDS = 1.0

_ERROR_KINDS = {
    "crash": CandidateCrash,
    "unsupported": UnsupportedOperation,
    "timeout": CallTimeout,
    "load_error": CandidateCrash,
    "protocol_error": ProtocolError,
}


def default_adapter_command() -> list[str]:
    """Adapter argv from CWM_ADAPTER, falling back to the bundled module."""
    override = os.environ.get(ADAPTER_ENV_VAR)
    if override:
        return shlex.split(override)
    return [sys.executable, "-m", "cwmadapter", "--stdio"]


class WireSession(Session):
    """Session realized over a child process speaking the wire protocol."""

    def __init__(self, process: subprocess.Popen, per_call_timeout: float):
        self._process = process
        self._timeout = per_call_timeout
        self._next_id = 1
        self._dead = False
        self._lock = threading.Lock()
        self._info = SessionInfo(load_ok=False, load_error="not loaded yet")
        self._state_meta: dict[int, tuple[bool, bool]] = {}
        self._lines: queue.Queue = queue.Queue()
        self._stderr_tail: deque[str] = deque(maxlen=50)
        self._reader = threading.Thread(target=self._read_stdout, daemon=True)
        self._reader.start()
        self._stderr_reader = threading.Thread(target=self._read_stderr, daemon=True)
        self._stderr_reader.start()

    # -- transport --------------------------------------------------------

    def _read_stdout(self) -> None:
        stream = self._process.stdout
        assert stream is not None
        while True:
            try:
                line = stream.readline(MAX_FRAME_BYTES + 1)
            except (OSError, ValueError):
                break
            if not line:
                break
            if len(line) > MAX_FRAME_BYTES:
                self._lines.put(ProtocolError(f"frame exceeds {MAX_FRAME_BYTES} bytes"))
                break
            self._lines.put(line)
        self._lines.put(None)  # EOF sentinel

    def _read_stderr(self) -> None:
        stream = self._process.stderr
        if stream is None:
            return
        for raw in stream:
            try:
                self._stderr_tail.append(raw.decode("utf-8", "replace").rstrip())
            except Exception:  # noqa: BLE001
                break

    def stderr_tail(self) -> list[str]:
        return list(self._stderr_tail)

    def _send(self, method: str, params: dict) -> int:
        request_id = self._next_id
        self._next_id += 1
        frame = json.dumps(
            {"id": request_id, "method": method, "params": params}, separators=(",", ":")
        )
        stdin = self._process.stdin
        assert stdin is not None
        try:
            stdin.write(frame.encode("utf-8") + b"\n")
            stdin.flush()
        except (OSError, ValueError) as exc:
            self.kill()
            raise SessionDead(f"child pipe closed: {exc}") from exc
        return request_id

    def _receive(self, request_id: int, timeout: float) -> dict:
        try:
            item = self._lines.get(timeout=timeout)
        except queue.Empty:
            self.kill()
            raise CallTimeout(f"no response within {timeout}s") from None
        if item is None:
            self.kill()
            raise SessionDead("child closed its output" + self._stderr_hint())
        if isinstance(item, ProtocolError):
            self.kill()
            raise item
        try:
            frame = json.loads(item)
        except json.JSONDecodeError as exc:
            self.kill()
            raise ProtocolError(f"response is not valid JSON: {exc}") from exc
        if not isinstance(frame, dict) or frame.get("id") != request_id:
            self.kill()
            raise ProtocolError(f"response id mismatch: {frame!r}")
        return frame

    def call(self, method: str, params: Optional[dict] = None, timeout: Optional[float] = None) -> dict:
        """One request/response exchange; raises typed errors on failure."""
        with self._lock:
            if self._dead:
                raise SessionDead("session was killed")
            request_id = self._send(method, params or {})
            frame = self._receive(request_id, timeout if timeout is not None else self._timeout)
        if frame.get("ok"):
            result = frame.get("result")
            return result if isinstance(result, dict) else {}
        error = frame.get("error") or {}
        kind = error.get("kind", "protocol_error")
        message = error.get("message", "unknown error")
        exc_type = _ERROR_KINDS.get(kind)
        if exc_type is None:
            self.kill()
            raise ProtocolError(f"unknown error kind {kind!r}: {message}")
        raise exc_type(message)

    def _stderr_hint(self) -> str:
        tail = self.stderr_tail()
        return f"; stderr: {tail[-3:]}" if tail else ""

    # -- handshake --------------------------------------------------------

    def load(self, candidate_path: str, preamble: Optional[str], timeout: float) -> SessionInfo:
        params: dict[str, Any] = {
            "path": candidate_path,
            "protocol_version": PROTOCOL_VERSION,
        }
        if preamble is not None:
            params["preamble"] = preamble
        try:
            result = self.call("load", params, timeout=timeout)
        except (CallTimeout, SessionDead, ProtocolError) as exc:
            self._info = SessionInfo(load_ok=False, load_error=f"handshake failed: {exc}")
            return self._info
        except CandidateCrash as exc:
            self._info = SessionInfo(load_ok=False, load_error=str(exc))
            return self._info
        if result.get("protocol_version") != PROTOCOL_VERSION:
            self.kill()
            raise SpawnError(
                f"adapter speaks protocol {result.get('protocol_version')!r}, "
                f"host needs {PROTOCOL_VERSION}"
            )
        self._info = SessionInfo(
            api_present=dict(result.get("api_present") or {}),
            load_ok=bool(result.get("load_ok")),
            load_error=result.get("load_error"),
            resample_source=result.get("resample_source"),
        )
        return self._info

    # -- session contract -------------------------------------------------

    def info(self) -> SessionInfo:
        return self._info

    def _remember_meta(self, result: dict) -> None:
        state = result.get("state")
        if isinstance(state, int):
            self._state_meta[state] = (
                bool(result.get("is_map")),
                bool(result.get("is_none")),
            )

    def initial_state(self) -> int:
        result = self.call("initial_state")
        state = result.get("state")
        if not isinstance(state, int):
            self.kill()
            raise ProtocolError(f"initial_state returned no handle: {result!r}")
        self._remember_meta(result)
        return state

    def apply_action(self, state: int, action: str) -> ApplyResult:
        result = self.call("apply_action", {"state": state, "action": action})
        new_state = result.get("state")
        if not isinstance(new_state, int):
            self.kill()
            raise ProtocolError(f"apply_action returned no handle: {result!r}")
        self._remember_meta(result)
        return ApplyResult(new_state=new_state, input_mutated=bool(result.get("input_mutated")))

    def current_player(self, state: int) -> Any:
        return self.call("current_player", {"state": state}).get("player")

    def legal_actions(self, state: int) -> Any:
        return self.call("legal_actions", {"state": state}).get("actions")

    def rewards(self, state: int) -> Any:
        return self.call("rewards", {"state": state}).get("rewards")

    def observations(self, state: int) -> Any:
        return self.call("observations", {"state": state}).get("observations")

    def player_name(self, player: int) -> str:
        return self.call("player_name", {"player": player}).get("name")

    def fingerprint(self, state: int) -> str:
        digest = self.call("fingerprint", {"state": state}).get("digest")
        if not isinstance(digest, str):
            self.kill()
            raise ProtocolError(f"fingerprint returned no digest: {digest!r}")
        return digest

    def resample(self, entries: list[tuple[int, Optional[str]]], player: int) -> Any:
        records = [{"state": state, "action": action} for state, action in entries]
        return self.call("resample", {"records": records, "player": player}).get("actions")

    def state_is_map(self, state: int) -> bool:
        return self._state_meta.get(state, (False, False))[0]

    def state_is_none(self, state: int) -> bool:
        return self._state_meta.get(state, (False, False))[1]

    def close(self) -> None:
        if not self._dead:
            try:
                with self._lock:
                    if not self._dead:
                        self._send("shutdown", {})
            except SessionError:
                pass
        self.kill()

    # -- lifecycle --------------------------------------------------------

    def kill(self) -> None:
        """Terminate the child (grace, then force). Safe to call repeatedly."""
        self._dead = True
        process = self._process
        if process.poll() is None:
            process.terminate()
            try:
                process.wait(timeout=_KILL_GRACE_SECONDS)
            except subprocess.TimeoutExpired:
                process.kill()
                try:
                    process.wait(timeout=_KILL_GRACE_SECONDS)
                except subprocess.TimeoutExpired:
                    pass
        for stream in (process.stdin, process.stdout, process.stderr):
            if stream is not None:
                try:
                    stream.close()
                except OSError:
                    pass


def spawn(
    command: list[str],
    candidate_path: str,
    preamble: Optional[str] = None,
    per_call_timeout: float = DEFAULT_CALL_TIMEOUT,
    load_timeout: Optional[float] = None,
) -> WireSession:
    """Start an adapter process and load the candidate into it.

    Exec failures raise SpawnError (a harness fault). Candidate load
    failures do not raise: they are recorded in the session's info.
    """
    try:
        process = subprocess.Popen(
            command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
    except OSError as exc:
        raise SpawnError(f"cannot start adapter {command!r}: {exc}") from exc
    session = WireSession(process, per_call_timeout)
    session.load(candidate_path, preamble, timeout=load_timeout or max(per_call_timeout, 10.0))
    return session


def kill(session: WireSession) -> None:
    """Terminate a wire session; idempotent."""
    session.kill()
