"""Canonical JSON serialization: the single byte-stable form used for
annotation files, compiled interfaces, bundles, and submission hashes."""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_json(value: Any) -> str:
    """Serialize with sorted keys, compact separators, and raw UTF-8.

    Identical values always yield identical strings; there is no whitespace
    or key-order variation across processes.
    """
    return json.dumps(value, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def canonical_json_bytes(value: Any) -> bytes:
    return canonical_json(value).encode("utf-8")


def sha256_hex(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()
