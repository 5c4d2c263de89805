"""Loading candidate source files into an isolated namespace.

Candidates habitually assume a standard import header; unless the load
request overrides it, DEFAULT_PREAMBLE (version 1) is injected first so a
missing `import random` does not mask an otherwise working engine. The
preamble executes in the same namespace ahead of the candidate code,
which is compiled under its own filename so tracebacks keep real line
numbers.
"""

from __future__ import annotations

import ast
import traceback
from dataclasses import dataclass, field
from typing import Any, Optional

PREAMBLE_VERSION = 1

DEFAULT_PREAMBLE = """\
import copy
import random
from copy import deepcopy
from typing import List, Dict, Any, Optional, Tuple
from collections import defaultdict, Counter
"""

API_FUNCTIONS = {
    "initial_state": "get_initial_state",
    "apply_action": "apply_action",
    "current_player": "get_current_player",
    "rewards": "get_rewards",
    "legal_actions": "get_legal_actions",
    "observations": "get_observations",
    "player_name": "get_player_name",
    "resample_history": "resample_history",
}


@dataclass
class LoadedCandidate:
    load_ok: bool
    load_error: Optional[str] = None
    api_present: dict = field(default_factory=lambda: {name: False for name in API_FUNCTIONS})
    resample_source: Optional[str] = None
    namespace: dict = field(default_factory=dict)

    def function(self, name: str):
        return self.namespace.get(API_FUNCTIONS[name])

    def info_payload(self) -> dict:
        return {
            "load_ok": self.load_ok,
            "load_error": self.load_error,
            "api_present": dict(self.api_present),
            "resample_source": self.resample_source,
        }


def load_candidate(path: str, preamble: Optional[str]) -> LoadedCandidate:
    """Read, compile and execute a candidate file; failures are data."""
    result = LoadedCandidate(load_ok=False)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            source = handle.read()
    except OSError as exc:
        result.load_error = f"cannot read candidate: {exc}"
        return result

    injected = DEFAULT_PREAMBLE if preamble is None else preamble
    namespace: dict[str, Any] = {"__name__": "candidate"}
    try:
        if injected:
            exec(compile(injected, "<preamble>", "exec"), namespace)
        exec(compile(source, path, "exec"), namespace)
    except SyntaxError as exc:
        result.load_error = f"SyntaxError: {exc.msg} (line {exc.lineno})"
        return result
    except BaseException as exc:  # noqa: BLE001 - anything the module does at import time
        result.load_error = f"{type(exc).__name__}: {exc}"
        return result

    result.load_ok = True
    result.namespace = namespace
    result.api_present = {
        name: callable(namespace.get(attr)) for name, attr in API_FUNCTIONS.items()
    }
    if result.api_present["resample_history"]:
        result.resample_source = extract_function_source(source, "resample_history")
    return result


def extract_function_source(source: str, function_name: str) -> Optional[str]:
    """Verbatim source text of a top-level function, if it is in the file.

    Functions conjured at runtime (exec, assignment of lambdas) have no
    recoverable source and yield None.
    """
    try:
        tree = ast.parse(source)
    except SyntaxError:
        return None
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and node.name == function_name:
            return ast.get_source_segment(source, node)
    return None


def format_crash(exc: BaseException) -> str:
    """One-line crash report with the exception type and message."""
    lines = traceback.format_exception_only(type(exc), exc)
    return lines[-1].strip() if lines else repr(exc)
