"""Canonical value encoding and fingerprints, adapter side.

This is an independent implementation of the algorithm pinned in
docs/protocol.md; it must stay bit-identical to the host's. The shared
corpus at docs/fingerprint_corpus.json is the conformance authority.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any


class CanonError(ValueError):
    """The value cannot be expressed in transport form."""


def canonicalize(value: Any, _depth: int = 0) -> Any:
    """Native value -> transport form (maps/lists/scalars only)."""
    if _depth > 100:
        raise CanonError("value nests deeper than 100 levels")
    if isinstance(value, (str, bool, type(None))):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise CanonError(f"non-finite number: {value!r}")
        return value
    if isinstance(value, dict):
        out = {}
        for key, item in value.items():
            text_key = key if isinstance(key, str) else str(key)
            if text_key in out:
                raise CanonError(f"duplicate map key after canonicalization: {text_key!r}")
            out[text_key] = canonicalize(item, _depth + 1)
        return out
    if isinstance(value, (list, tuple)):
        return [canonicalize(item, _depth + 1) for item in value]
    if isinstance(value, (set, frozenset)):
        return sorted((canonicalize(item, _depth + 1) for item in value), key=encode)
    raise CanonError(f"unsupported type for transport: {type(value).__name__}")


def encode(value: Any) -> str:
    """Canonical JSON text: sorted keys, tight separators, ASCII escapes."""
    try:
        return json.dumps(
            value,
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=True,
            allow_nan=False,
        )
    except (TypeError, ValueError) as exc:
        raise CanonError(str(exc)) from exc


def fingerprint_value(value: Any) -> str:
    """Lowercase hex SHA-256 of the canonical encoding (64 chars)."""
    return hashlib.sha256(encode(value).encode("utf-8")).hexdigest()


def fingerprint_native(value: Any) -> str:
    return fingerprint_value(canonicalize(value))
