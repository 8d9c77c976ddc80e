"""Session persistence.

A session owns an immutable template + data pair, an append-only annotation
log, and a small mutable meta record (the closed flag). The file-backed
store survives process crashes: every appended record is fsynced before the
caller is acknowledged, replay stops at the first torn or corrupt line, and
an append after a crash truncates any unacknowledged torn tail first, so a
partial final write never poisons earlier records or later appends.

Log line format, one record per line:

    <payload-byte-length>:<sha256-of-payload-hex>:<canonical-json-payload>\n
"""

from __future__ import annotations

import json
import os
from typing import Any

from ..canonical import canonical_json, sha256_hex


class SessionNotFound(KeyError):
    def __init__(self, session_id: str):
        super().__init__(session_id)
        self.session_id = session_id


def encode_record(payload: dict[str, Any]) -> bytes:
    body = canonical_json(payload).encode("utf-8")
    return f"{len(body)}:{sha256_hex(body)}:".encode("ascii") + body + b"\n"


def decode_records(raw: bytes) -> list[dict[str, Any]]:
    """Replay every intact record; stop at the first torn or corrupt line.

    A final line without its newline terminator is torn by definition: the
    append was never acknowledged, so the record is not replayed even when
    its checksum happens to verify.
    """
    records: list[dict[str, Any]] = []
    lines = raw.split(b"\n")
    for i, line in enumerate(lines):
        if not line:
            continue
        if i == len(lines) - 1:
            break
        head, sep, rest = line.partition(b":")
        if not sep or not head.isdigit():
            break
        digest, sep, body = rest.partition(b":")
        if not sep or int(head) != len(body) or sha256_hex(body) != digest.decode("ascii", "replace"):
            break
        try:
            records.append(json.loads(body.decode("utf-8")))
        except (UnicodeDecodeError, json.JSONDecodeError):
            break
    return records


class SessionStore:
    """Interface; see FileStore and MemoryStore."""

    def create_session(self, session_id: str, template: str, data: str) -> None:
        raise NotImplementedError

    def exists(self, session_id: str) -> bool:
        raise NotImplementedError

    def session_ids(self) -> list[str]:
        raise NotImplementedError

    def template(self, session_id: str) -> str:
        raise NotImplementedError

    def data(self, session_id: str) -> str:
        raise NotImplementedError

    def append(self, session_id: str, payload: dict[str, Any]) -> str:
        """Durably append one record; returns the payload's sha256 receipt."""
        raise NotImplementedError

    def records(self, session_id: str) -> list[dict[str, Any]]:
        raise NotImplementedError

    def meta(self, session_id: str) -> dict[str, Any]:
        raise NotImplementedError

    def set_meta(self, session_id: str, meta: dict[str, Any]) -> None:
        raise NotImplementedError


class MemoryStore(SessionStore):
    def __init__(self) -> None:
        self._sessions: dict[str, dict[str, Any]] = {}

    def create_session(self, session_id: str, template: str, data: str) -> None:
        self._sessions[session_id] = {
            "template": template,
            "data": data,
            "log": b"",
            "meta": {"closed": False},
        }

    def _session(self, session_id: str) -> dict[str, Any]:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionNotFound(session_id) from None

    def exists(self, session_id: str) -> bool:
        return session_id in self._sessions

    def session_ids(self) -> list[str]:
        return sorted(self._sessions)

    def template(self, session_id: str) -> str:
        return self._session(session_id)["template"]

    def data(self, session_id: str) -> str:
        return self._session(session_id)["data"]

    def append(self, session_id: str, payload: dict[str, Any]) -> str:
        session = self._session(session_id)
        session["log"] += encode_record(payload)
        return sha256_hex(canonical_json(payload))

    def records(self, session_id: str) -> list[dict[str, Any]]:
        return decode_records(self._session(session_id)["log"])

    def meta(self, session_id: str) -> dict[str, Any]:
        return dict(self._session(session_id)["meta"])

    def set_meta(self, session_id: str, meta: dict[str, Any]) -> None:
        self._session(session_id)["meta"] = dict(meta)


class FileStore(SessionStore):
    """One directory per session: template.yml, data.json, log.jsonl, meta.json."""

    def __init__(self, root: str) -> None:
        self.root = root
        os.makedirs(root, exist_ok=True)

    def _dir(self, session_id: str) -> str:
        # ids are server-generated hex, but never trust them as path components
        if not session_id or any(ch in session_id for ch in "/\\.") or session_id.startswith("~"):
            raise SessionNotFound(session_id)
        return os.path.join(self.root, session_id)

    def _path(self, session_id: str, name: str, *, must_exist: bool = True) -> str:
        path = os.path.join(self._dir(session_id), name)
        if must_exist and not os.path.exists(path):
            raise SessionNotFound(session_id)
        return path

    def create_session(self, session_id: str, template: str, data: str) -> None:
        directory = self._dir(session_id)
        os.makedirs(directory, exist_ok=True)
        _write_durable(os.path.join(directory, "template.yml"), template.encode("utf-8"))
        _write_durable(os.path.join(directory, "data.json"), data.encode("utf-8"))
        _write_durable(os.path.join(directory, "log.jsonl"), b"")
        _write_durable(os.path.join(directory, "meta.json"),
                       canonical_json({"closed": False}).encode("utf-8"))
        _fsync_dir(directory)

    def exists(self, session_id: str) -> bool:
        try:
            return os.path.isfile(self._path(session_id, "template.yml", must_exist=False))
        except SessionNotFound:
            return False

    def session_ids(self) -> list[str]:
        out = []
        for name in sorted(os.listdir(self.root)):
            if os.path.isfile(os.path.join(self.root, name, "template.yml")):
                out.append(name)
        return out

    def template(self, session_id: str) -> str:
        with open(self._path(session_id, "template.yml"), "rb") as f:
            return f.read().decode("utf-8")

    def data(self, session_id: str) -> str:
        with open(self._path(session_id, "data.json"), "rb") as f:
            return f.read().decode("utf-8")

    def append(self, session_id: str, payload: dict[str, Any]) -> str:
        record = encode_record(payload)
        with open(self._path(session_id, "log.jsonl"), "r+b") as f:
            f.seek(0, os.SEEK_END)
            size = f.tell()
            if size:
                f.seek(size - 1)
                if f.read(1) != b"\n":
                    # a crash left an unacknowledged torn tail; cut it back to
                    # the last terminated record so lines never concatenate
                    f.seek(0)
                    cut = f.read().rfind(b"\n") + 1
                    f.truncate(cut)
                    f.seek(cut)
            f.write(record)
            f.flush()
            os.fsync(f.fileno())
        return sha256_hex(canonical_json(payload))

    def records(self, session_id: str) -> list[dict[str, Any]]:
        with open(self._path(session_id, "log.jsonl"), "rb") as f:
            return decode_records(f.read())

    def meta(self, session_id: str) -> dict[str, Any]:
        with open(self._path(session_id, "meta.json"), "rb") as f:
            return json.loads(f.read().decode("utf-8"))

    def set_meta(self, session_id: str, meta: dict[str, Any]) -> None:
        path = self._path(session_id, "meta.json")
        _write_durable(path, canonical_json(meta).encode("utf-8"))


def _write_durable(path: str, body: bytes) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as f:
        f.write(body)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def _fsync_dir(path: str) -> None:
    fd = os.open(path, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


# ---------------------------------------------------------------------------
# log replay helpers

def current_documents(store: SessionStore, session_id: str) -> dict[str, dict[str, Any]]:
    """Latest submitted document per annotator; resubmission supersedes."""
    out: dict[str, dict[str, Any]] = {}
    for record in store.records(session_id):
        if record.get("kind") != "annotations":
            continue
        aid = record.get("annotator_id")
        if isinstance(aid, str):
            out[aid] = record["document"]
    return out
