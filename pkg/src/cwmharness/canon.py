"""Canonical encoding and fingerprinting of structured values.

A *structured value* is the JSON-like transport currency of the harness:
maps with string keys, lists, strings, finite numbers, booleans and null.
Fingerprints let two processes compare states and observations without
ever exchanging the underlying objects, so the encoding must be stable
across processes: map key order never matters, list order always does.

The exact algorithm is part of the wire contract (see docs/protocol.md)
and is reimplemented verbatim by adapter processes.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any


class CanonicalizationError(ValueError):
    """Raised when a value cannot be expressed as a structured value."""


_SCALARS = (str, bool, type(None))


def canonicalize_value(value: Any, _depth: int = 0) -> Any:
    """Convert a native Python value to structured-value form.

    tuples and lists become lists, sets become lists sorted by the
    canonical encoding of their elements, and non-string map keys are
    stringified with str(). Numbers must be finite. Anything else is
    rejected rather than guessed at.
    """
    if _depth > 100:
        raise CanonicalizationError("value nests deeper than 100 levels")
    if isinstance(value, _SCALARS):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise CanonicalizationError(f"non-finite number: {value!r}")
        return value
    if isinstance(value, dict):
        out = {}
        for key, item in value.items():
            skey = key if isinstance(key, str) else str(key)
            if skey in out:
                raise CanonicalizationError(f"duplicate map key after canonicalization: {skey!r}")
            out[skey] = canonicalize_value(item, _depth + 1)
        return out
    if isinstance(value, (list, tuple)):
        return [canonicalize_value(item, _depth + 1) for item in value]
    if isinstance(value, (set, frozenset)):
        items = [canonicalize_value(item, _depth + 1) for item in value]
        return sorted(items, key=canonical_encode)
    raise CanonicalizationError(f"unsupported type for structured value: {type(value).__name__}")


def canonical_encode(value: Any) -> str:
    """Encode a structured value as its canonical text form.

    JSON with lexicographically sorted keys, no whitespace, ASCII-only
    escapes, integers bare and floats in shortest round-trip form.
    """
    try:
        return json.dumps(
            value,
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=True,
            allow_nan=False,
        )
    except (TypeError, ValueError) as exc:
        raise CanonicalizationError(str(exc)) from exc


def canonical_fingerprint(value: Any) -> str:
    """Return the 64-char lowercase hex digest of a structured value."""
    text = canonical_encode(value)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def fingerprint_native(value: Any) -> str:
    """Canonicalize a native Python value, then fingerprint it."""
    return canonical_fingerprint(canonicalize_value(value))
