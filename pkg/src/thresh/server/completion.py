"""Completion codes: deterministic, verifiable receipts for finished work.

The code is an HMAC-SHA256 over `<session_id>|<annotator_id>` keyed by the
server secret, rendered as 12 characters of Crockford base32 (no I, L, O, U),
so the same secret always reproduces the same code and a requester cannot
forge one without the secret.
"""

from __future__ import annotations

import hashlib
import hmac
from typing import Any

CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"
CODE_LENGTH = 12


def completion_code(secret: str, session_id: str, annotator_id: str) -> str:
    message = f"{session_id}|{annotator_id}".encode("utf-8")
    digest = hmac.new(secret.encode("utf-8"), message, hashlib.sha256).digest()
    bits = int.from_bytes(digest, "big")
    chars = []
    for i in range(CODE_LENGTH):
        bits, index = divmod(bits, 32)
        chars.append(CROCKFORD[index])
    return "".join(reversed(chars))


def verify_completion_code(secret: str, session_id: str, annotator_id: str, code: str) -> bool:
    return hmac.compare_digest(completion_code(secret, session_id, annotator_id), code.upper())


def missing_instances(document: dict[str, Any], instance_ids: list[str]) -> list[str]:
    """Instance ids without an entry. An explicit empty list counts as done:
    it is the annotator's confirmation that the instance needs no edits."""
    covered = document.get("instances", {})
    return [iid for iid in instance_ids if iid not in covered]
