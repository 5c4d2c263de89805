"""The wire-protocol host against scripted child processes."""

from __future__ import annotations

import sys
import textwrap

import pytest

from cwmharness.host import MAX_FRAME_BYTES, spawn
from cwmharness.session import (
    CallTimeout,
    CandidateCrash,
    SessionDead,
    SpawnError,
    UnsupportedOperation,
)


def child(tmp_path, body: str) -> list[str]:
    """Write a scripted stdio child and return its argv."""
    script = tmp_path / "child.py"
    script.write_text(textwrap.dedent(body), encoding="utf-8")
    return [sys.executable, str(script)]


WELL_BEHAVED = """
    import json, sys

    def reply(obj):
        sys.stdout.write(json.dumps(obj) + "\\n")
        sys.stdout.flush()

    handles = 0
    for line in sys.stdin:
        req = json.loads(line)
        rid, method, params = req["id"], req["method"], req.get("params", {})
        if method == "load":
            reply({"id": rid, "ok": True, "result": {
                "protocol_version": 1, "load_ok": True, "load_error": None,
                "api_present": {"initial_state": True}, "resample_source": None}})
        elif method == "initial_state":
            handles += 1
            reply({"id": rid, "ok": True, "result": {"state": handles, "is_map": True, "is_none": False}})
        elif method == "current_player":
            reply({"id": rid, "ok": True, "result": {"player": 0}})
        elif method == "boom":
            reply({"id": rid, "ok": False, "error": {"kind": "crash", "message": "KeyError: 'board'"}})
        elif method == "missing":
            reply({"id": rid, "ok": False, "error": {"kind": "unsupported", "message": "no resample"}})
        elif method == "shutdown":
            reply({"id": rid, "ok": True, "result": {}})
            break
        else:
            reply({"id": rid, "ok": False, "error": {"kind": "protocol_error", "message": method}})
"""


def test_happy_path_and_error_mapping(tmp_path):
    session = spawn(child(tmp_path, WELL_BEHAVED), "whatever.py")
    assert session.info().load_ok
    first = session.initial_state()
    second = session.initial_state()
    assert second > first  # handle monotonicity
    assert session.state_is_map(first)
    assert not session.state_is_none(first)
    assert session.current_player(first) == 0
    with pytest.raises(CandidateCrash, match="KeyError"):
        session.call("boom")
    with pytest.raises(UnsupportedOperation):
        session.call("missing")
    session.close()
    with pytest.raises(SessionDead):
        session.initial_state()


def test_garbage_frames_kill_the_session_not_the_host(tmp_path):
    argv = child(
        tmp_path,
        """
        import sys
        print("this is not json at all")
        sys.stdout.flush()
        sys.stdin.readline()
        """,
    )
    session = spawn(argv, "x.py")
    info = session.info()
    assert not info.load_ok
    assert "handshake failed" in info.load_error
    assert session._process.poll() is not None  # child is gone


def test_truncated_and_mismatched_frames(tmp_path):
    argv = child(
        tmp_path,
        """
        import json, sys
        line = sys.stdin.readline()
        sys.stdout.write(json.dumps({"id": 999, "ok": True, "result": {}}) + "\\n")
        sys.stdout.flush()
        sys.stdin.readline()
        """,
    )
    session = spawn(argv, "x.py")
    assert not session.info().load_ok  # id mismatch -> protocol failure at handshake


def test_oversize_frame_is_a_protocol_error(tmp_path):
    argv = child(
        tmp_path,
        f"""
        import sys
        sys.stdin.readline()
        sys.stdout.write('{{"id": 1, "ok": true, "result": {{"pad": "' + "x" * ({MAX_FRAME_BYTES} + 100) + '"}}}}\\n')
        sys.stdout.flush()
        """,
    )
    session = spawn(argv, "x.py")
    assert not session.info().load_ok


def test_hanging_child_times_out_and_dies(tmp_path):
    argv = child(
        tmp_path,
        """
        import time, sys
        sys.stdin.readline()
        time.sleep(3600)
        """,
    )
    session = spawn(argv, "x.py", per_call_timeout=0.5, load_timeout=0.8)
    assert not session.info().load_ok
    assert session._process.poll() is not None


def test_per_call_timeout_after_successful_load(tmp_path):
    argv = child(
        tmp_path,
        """
        import json, sys, time
        line = sys.stdin.readline()
        req = json.loads(line)
        sys.stdout.write(json.dumps({"id": req["id"], "ok": True, "result": {
            "protocol_version": 1, "load_ok": True, "load_error": None,
            "api_present": {}, "resample_source": None}}) + "\\n")
        sys.stdout.flush()
        sys.stdin.readline()
        time.sleep(3600)
        """,
    )
    session = spawn(argv, "x.py", per_call_timeout=0.5)
    assert session.info().load_ok
    with pytest.raises(CallTimeout):
        session.call("initial_state")
    assert session._process.poll() is not None  # killed after the timeout


def test_spawn_error_is_distinct_from_load_error(tmp_path):
    with pytest.raises(SpawnError):
        spawn(["/no/such/adapter/binary"], "x.py")


def test_protocol_version_mismatch_is_a_spawn_error(tmp_path):
    argv = child(
        tmp_path,
        """
        import json, sys
        req = json.loads(sys.stdin.readline())
        sys.stdout.write(json.dumps({"id": req["id"], "ok": True, "result": {
            "protocol_version": 99, "load_ok": True, "load_error": None,
            "api_present": {}, "resample_source": None}}) + "\\n")
        sys.stdout.flush()
        """,
    )
    with pytest.raises(SpawnError, match="protocol"):
        spawn(argv, "x.py")


def test_kill_is_idempotent_and_invalidates_handles(tmp_path):
    session = spawn(child(tmp_path, WELL_BEHAVED), "x.py")
    handle = session.initial_state()
    session.kill()
    session.kill()
    with pytest.raises(SessionDead):
        session.current_player(handle)


def test_requests_carry_strictly_increasing_ids(tmp_path):
    argv = child(
        tmp_path,
        """
        import json, sys
        seen = []
        for line in sys.stdin:
            req = json.loads(line)
            seen.append(req["id"])
            assert seen == sorted(set(seen)), seen
            if req["method"] == "load":
                sys.stdout.write(json.dumps({"id": req["id"], "ok": True, "result": {
                    "protocol_version": 1, "load_ok": True, "load_error": None,
                    "api_present": {}, "resample_source": None}}) + "\\n")
            else:
                sys.stdout.write(json.dumps({"id": req["id"], "ok": True, "result": {"player": len(seen)}}) + "\\n")
            sys.stdout.flush()
        """,
    )
    session = spawn(argv, "x.py")
    values = [session.call("current_player", {"state": 0})["player"] for _ in range(5)]
    assert values == [2, 3, 4, 5, 6]
    session.kill()
