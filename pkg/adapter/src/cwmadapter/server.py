"""The stdio request loop serving the candidate wire protocol.

One adapter process hosts one candidate. Candidate faults of every kind
(exceptions, unserializable values, missing functions) become typed error
frames; nothing a candidate does may crash the adapter or corrupt the
framing. See docs/protocol.md in the harness repository for the
authoritative frame catalogue.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from typing import Any, BinaryIO, Optional

from .canon import CanonError, canonicalize, fingerprint_value
from .loader import LoadedCandidate, format_crash, load_candidate

PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 8 * 1024 * 1024


class WireFault(Exception):
    """Maps to an error frame: carries the error kind and message."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


class Adapter:
    """Request dispatcher plus the candidate's handle table."""

    def __init__(self) -> None:
        self.candidate: Optional[LoadedCandidate] = None
        self._states: dict[int, Any] = {}
        self._next_handle = 0
        self._obs_cache: dict[tuple[int, int], Any] = {}

    # -- plumbing ----------------------------------------------------------

    def _loaded(self) -> LoadedCandidate:
        if self.candidate is None:
            raise WireFault("load_error", "no candidate loaded yet")
        if not self.candidate.load_ok:
            raise WireFault("load_error", self.candidate.load_error or "candidate failed to load")
        return self.candidate

    def _function(self, name: str):
        fn = self._loaded().function(name)
        if fn is None or not callable(fn):
            raise WireFault("unsupported", f"candidate does not define {name}")
        return fn

    def _invoke(self, name: str, *args: Any) -> Any:
        fn = self._function(name)
        try:
            return fn(*args)
        except WireFault:
            raise
        except BaseException as exc:  # noqa: BLE001 - candidate faults become crash frames
            raise WireFault("crash", format_crash(exc)) from exc

    def _store(self, state: Any) -> int:
        handle = self._next_handle
        self._next_handle += 1
        self._states[handle] = state
        return handle

    def _state(self, params: dict) -> Any:
        handle = params.get("state")
        if not isinstance(handle, int) or handle not in self._states:
            raise WireFault("protocol_error", f"unknown state handle: {handle!r}")
        return self._states[handle]

    def _transport(self, value: Any) -> Any:
        try:
            return canonicalize(value)
        except CanonError as exc:
            raise WireFault("crash", f"value not transportable: {exc}") from exc

    @staticmethod
    def _handle_meta(state: Any) -> dict:
        return {"is_map": isinstance(state, dict), "is_none": state is None}

    # -- methods -----------------------------------------------------------

    def dispatch(self, method: str, params: dict) -> dict:
        handler = getattr(self, f"do_{method}", None)
        if handler is None:
            raise WireFault("protocol_error", f"unknown method {method!r}")
        return handler(params)

    def do_load(self, params: dict) -> dict:
        version = params.get("protocol_version")
        if version != PROTOCOL_VERSION:
            raise WireFault(
                "protocol_error",
                f"host speaks protocol {version!r}, adapter needs {PROTOCOL_VERSION}",
            )
        path = params.get("path")
        if not isinstance(path, str):
            raise WireFault("protocol_error", "load needs a candidate path")
        preamble = params.get("preamble")
        if preamble is not None and not isinstance(preamble, str):
            raise WireFault("protocol_error", "preamble must be a string or null")
        self.candidate = load_candidate(path, preamble)
        self._states.clear()
        self._obs_cache.clear()
        payload = self.candidate.info_payload()
        payload["protocol_version"] = PROTOCOL_VERSION
        return payload

    def do_info(self, params: dict) -> dict:
        if self.candidate is None:
            raise WireFault("load_error", "no candidate loaded yet")
        payload = self.candidate.info_payload()
        payload["protocol_version"] = PROTOCOL_VERSION
        return payload

    def do_initial_state(self, params: dict) -> dict:
        state = self._invoke("initial_state")
        return {"state": self._store(state), **self._handle_meta(state)}

    def do_apply_action(self, params: dict) -> dict:
        state = self._state(params)
        action = params.get("action")
        snapshot = None
        try:
            snapshot = copy.deepcopy(state)
        except BaseException:  # noqa: BLE001 - uncopyable states skip probing
            snapshot = None
        new_state = self._invoke("apply_action", state, action)
        mutated = False
        if snapshot is not None:
            try:
                mutated = bool(snapshot != state)
            except BaseException:  # noqa: BLE001
                mutated = False
        return {
            "state": self._store(new_state),
            "input_mutated": mutated,
            **self._handle_meta(new_state),
        }

    def do_current_player(self, params: dict) -> dict:
        return {"player": self._transport(self._invoke("current_player", self._state(params)))}

    def do_legal_actions(self, params: dict) -> dict:
        return {"actions": self._transport(self._invoke("legal_actions", self._state(params)))}

    def do_rewards(self, params: dict) -> dict:
        return {"rewards": self._transport(self._invoke("rewards", self._state(params)))}

    def do_observations(self, params: dict) -> dict:
        handle = params.get("state")
        native = self._invoke("observations", self._state(params))
        if isinstance(native, list):
            for player, obs in enumerate(native):
                self._obs_cache[(handle, player)] = obs
        return {"observations": self._transport(native)}

    def do_player_name(self, params: dict) -> dict:
        return {"name": self._transport(self._invoke("player_name", params.get("player")))}

    def do_fingerprint(self, params: dict) -> dict:
        state = self._state(params)
        try:
            return {"digest": fingerprint_value(canonicalize(state))}
        except CanonError as exc:
            raise WireFault("crash", f"state not fingerprintable: {exc}") from exc

    def do_resample(self, params: dict) -> dict:
        records = params.get("records")
        player = params.get("player")
        if not isinstance(records, list) or not isinstance(player, int):
            raise WireFault("protocol_error", "resample needs records and a player id")
        history = []
        for record in records:
            if not isinstance(record, dict):
                raise WireFault("protocol_error", f"bad resample record: {record!r}")
            handle = record.get("state")
            if not isinstance(handle, int) or handle not in self._states:
                raise WireFault("protocol_error", f"unknown state handle: {handle!r}")
            key = (handle, player)
            if key not in self._obs_cache:
                self.do_observations({"state": handle})
            if key not in self._obs_cache:
                raise WireFault("crash", f"no observation cached for handle {handle}")
            history.append((self._obs_cache[key], record.get("action")))
        result = self._invoke("resample_history", history, player)
        return {"actions": self._transport(result)}

    def do_shutdown(self, params: dict) -> dict:
        return {}


def _write_frame(stdout: BinaryIO, payload: dict) -> None:
    try:
        frame = json.dumps(payload, separators=(",", ":"))
    except (TypeError, ValueError) as exc:
        payload = {
            "id": payload.get("id"),
            "ok": False,
            "error": {"kind": "crash", "message": f"response not serializable: {exc}"},
        }
        frame = json.dumps(payload, separators=(",", ":"))
    if len(frame) > MAX_FRAME_BYTES:
        payload = {
            "id": payload.get("id"),
            "ok": False,
            "error": {"kind": "crash", "message": "response exceeds the 8 MiB frame cap"},
        }
        frame = json.dumps(payload, separators=(",", ":"))
    stdout.write(frame.encode("utf-8") + b"\n")
    stdout.flush()


def _read_frame(stdin: BinaryIO) -> Optional[bytes]:
    """One request line, or None at EOF. Oversize lines are drained."""
    line = stdin.readline(MAX_FRAME_BYTES + 1)
    if not line:
        return None
    if len(line) > MAX_FRAME_BYTES and not line.endswith(b"\n"):
        while True:
            rest = stdin.readline(MAX_FRAME_BYTES)
            if not rest or rest.endswith(b"\n"):
                break
        raise WireFault("protocol_error", f"request exceeds {MAX_FRAME_BYTES} bytes")
    return line


def serve(stdin: BinaryIO, stdout: BinaryIO) -> None:
    """Serve requests until shutdown or EOF. Never raises on candidate faults."""
    adapter = Adapter()
    while True:
        try:
            line = _read_frame(stdin)
        except WireFault as fault:
            _write_frame(stdout, {"id": None, "ok": False,
                                  "error": {"kind": fault.kind, "message": fault.message}})
            continue
        if line is None:
            return
        if not line.strip():
            continue
        request_id: Any = None
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise WireFault("protocol_error", "request must be a JSON object")
            request_id = request.get("id")
            method = request.get("method")
            if not isinstance(method, str):
                raise WireFault("protocol_error", "request needs a method")
            result = adapter.dispatch(method, request.get("params") or {})
            _write_frame(stdout, {"id": request_id, "ok": True, "result": result})
            if method == "shutdown":
                return
        except WireFault as fault:
            _write_frame(
                stdout,
                {"id": request_id, "ok": False,
                 "error": {"kind": fault.kind, "message": fault.message}},
            )
        except json.JSONDecodeError as exc:
            _write_frame(
                stdout,
                {"id": None, "ok": False,
                 "error": {"kind": "protocol_error", "message": f"bad JSON: {exc}"}},
            )
        except BaseException as exc:  # noqa: BLE001 - last-ditch containment
            _write_frame(
                stdout,
                {"id": request_id, "ok": False,
                 "error": {"kind": "crash", "message": format_crash(exc)}},
            )


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="cwm-adapter")
    parser.add_argument("--stdio", action="store_true", help="serve the protocol on stdio")
    parser.parse_args(argv)
    serve(sys.stdin.buffer, sys.stdout.buffer)
    return 0


if __name__ == "__main__":
    sys.exit(main())
