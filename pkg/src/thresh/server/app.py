"""HTTP service wrapping the compile/validate pipeline.

Sessions are created from a template + data (inline or fetched over HTTPS),
interfaces compile lazily with a content-hash cache, and annotation
submissions append to a durable log where resubmission supersedes. Every
error response uses one envelope: {"code", "message", "details"}.
"""

from __future__ import annotations

import secrets
from datetime import datetime, timezone
from typing import Any

import httpx
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from ..annotations import (
    AnnotationSet,
    Instance,
    annotation_set_from_data,
    annotation_set_to_data,
    parse_instances,
)
from ..canonical import canonical_json, sha256_hex
from ..compiler import CompileError, compile_interface
from ..errors import FetchError, RegistryError, ThreshError
from ..typology import Typology, parse_template
from .completion import completion_code, missing_instances
from .config import FETCH_TIMEOUT_SECONDS, MAX_FETCH_BYTES, MAX_REDIRECTS, ServerConfig
from .store import FileStore, MemoryStore, SessionNotFound, SessionStore, current_documents


class HttpError(Exception):
    """Flow-control error carrying a ready-to-send envelope."""

    def __init__(self, status: int, code: str, message: str,
                 details: list[dict[str, Any]] | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details or []


def envelope(status: int, code: str, message: str,
             details: list[dict[str, Any]] | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details or []},
    )


def fetch_text(url: str, transport: httpx.BaseTransport | None = None) -> str:
    """GET a body over HTTPS with size, time, and redirect limits."""
    current = url
    redirects = 0
    try:
        with httpx.Client(transport=transport, timeout=FETCH_TIMEOUT_SECONDS,
                          follow_redirects=False) as client:
            while True:
                if not current.lower().startswith("https://"):
                    raise FetchError(f"refusing to fetch non-HTTPS URL {current!r}")
                with client.stream("GET", current) as response:
                    if response.is_redirect:
                        redirects += 1
                        if redirects > MAX_REDIRECTS:
                            raise FetchError(f"more than {MAX_REDIRECTS} redirects from {url!r}")
                        location = response.headers.get("location")
                        if not location:
                            raise FetchError("redirect without a Location header")
                        current = str(httpx.URL(current).join(location))
                        continue
                    if response.status_code != 200:
                        raise FetchError(f"upstream returned HTTP {response.status_code}",
                                         upstream_status=response.status_code)
                    total = 0
                    chunks: list[bytes] = []
                    for chunk in response.iter_bytes():
                        total += len(chunk)
                        if total > MAX_FETCH_BYTES:
                            raise FetchError(
                                f"response exceeds the {MAX_FETCH_BYTES} byte fetch limit")
                        chunks.append(chunk)
                    try:
                        return b"".join(chunks).decode("utf-8")
                    except UnicodeDecodeError as exc:
                        raise FetchError(f"response is not valid UTF-8: {exc}") from exc
    except httpx.TimeoutException as exc:
        raise FetchError(f"fetch timed out after {FETCH_TIMEOUT_SECONDS}s: {url!r}") from exc
    except httpx.HTTPError as exc:
        raise FetchError(f"fetch failed: {exc}") from exc


def _load_session(store: SessionStore, session_id: str) -> tuple[Typology, list[Instance], str, str]:
    template_text = store.template(session_id)
    data_text = store.data(session_id)
    t = parse_template(template_text)
    instances = parse_instances(data_text, t.config)
    return t, instances, template_text, data_text


def _documents_to_set(docs: dict[str, dict[str, Any]], t: Typology,
                      instances: list[Instance]) -> AnnotationSet:
    merged = {
        "format_version": "1.0",
        "typology_name": t.name,
        "annotators": {
            aid: {"metadata": doc.get("metadata", {}), "instances": doc.get("instances", {})}
            for aid, doc in docs.items()
        },
    }
    return annotation_set_from_data(merged, t, instances)


def create_app(config: ServerConfig, store: SessionStore | None = None,
               transport: httpx.BaseTransport | None = None) -> FastAPI:
    if store is None:
        store = FileStore(config.store_dir) if config.store_dir else MemoryStore()

    app = FastAPI(title="thresh", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.store = store
    app.state.config = config
    app.state.interface_cache = {}
    app.state.cache_stats = {"hits": 0, "misses": 0}

    @app.exception_handler(HttpError)
    async def handle_http_error(request: Request, exc: HttpError) -> JSONResponse:
        return envelope(exc.status, exc.code, exc.message, exc.details)

    @app.exception_handler(SessionNotFound)
    async def handle_not_found(request: Request, exc: SessionNotFound) -> JSONResponse:
        return envelope(404, "E_NOT_FOUND", f"no session {exc.session_id!r}")

    @app.exception_handler(ThreshError)
    async def handle_thresh_error(request: Request, exc: ThreshError) -> JSONResponse:
        if isinstance(exc, FetchError):
            status = 502
        elif isinstance(exc, RegistryError):
            status = 400
        else:
            status = 422
        return envelope(status, exc.code, exc.message, exc.detail_dicts())

    @app.exception_handler(Exception)
    async def handle_unexpected(request: Request, exc: Exception) -> JSONResponse:
        return envelope(500, "E_INTERNAL", "internal error")

    async def _json_body(request: Request) -> dict[str, Any]:
        try:
            body = await request.json()
        except Exception:
            raise HttpError(400, "E_BAD_REQUEST", "request body must be JSON") from None
        if not isinstance(body, dict):
            raise HttpError(400, "E_BAD_REQUEST", "request body must be a JSON object")
        return body

    def _resolve_source(body: dict[str, Any], name: str, *, required: bool) -> str | None:
        inline = body.get(f"{name}_inline")
        url = body.get(f"{name}_url")
        if inline is not None and url is not None:
            raise HttpError(400, "E_BAD_REQUEST",
                            f"give either {name}_inline or {name}_url, not both")
        if inline is None and url is None:
            if required:
                raise HttpError(400, "E_BAD_REQUEST", f"a {name} source is required")
            return None
        if inline is not None:
            if not isinstance(inline, str):
                raise HttpError(400, "E_BAD_REQUEST", f"{name}_inline must be text")
            return inline
        if not isinstance(url, str):
            raise HttpError(400, "E_BAD_REQUEST", f"{name}_url must be a URL string")
        return fetch_text(url, transport)

    def _session_or_404(session_id: str) -> None:
        if not store.exists(session_id):
            raise SessionNotFound(session_id)

    def _require_open(session_id: str) -> None:
        if store.meta(session_id).get("closed"):
            raise HttpError(409, "E_SESSION_CLOSED",
                            f"session {session_id!r} is closed to new submissions")

    @app.get("/api/health")
    async def health() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/api/session", status_code=201)
    async def create_session(request: Request) -> dict[str, str]:
        body = await _json_body(request)
        template_text = _resolve_source(body, "template", required=True)
        data_text = _resolve_source(body, "data", required=True)
        annotations_text = _resolve_source(body, "annotations", required=False)
        assert template_text is not None and data_text is not None

        t = parse_template(template_text)
        instances = parse_instances(data_text, t.config)
        preload: AnnotationSet | None = None
        if annotations_text is not None:
            import json as _json
            try:
                raw = _json.loads(annotations_text)
            except _json.JSONDecodeError as exc:
                raise HttpError(422, "E_JSON_SYNTAX", f"annotations are not valid JSON: {exc}")
            preload = annotation_set_from_data(raw, t, instances)

        session_id = secrets.token_hex(8)
        store.create_session(session_id, template_text, data_text)
        if preload is not None:
            for aid, entry in preload.entries.items():
                document = annotation_set_to_data(
                    AnnotationSet(typology_name=preload.typology_name, entries={aid: entry}))
                store.append(session_id, {"kind": "annotations", "annotator_id": aid,
                                          "document": document})
        return {"session_id": session_id}

    @app.get("/api/session/{session_id}/interface")
    async def get_interface(session_id: str, locale: str | None = None,
                            annotator_id: str | None = None) -> Response:
        _session_or_404(session_id)
        template_text = store.template(session_id)
        data_text = store.data(session_id)
        docs = current_documents(store, session_id)

        pane_annotators = None
        relevant_docs: dict[str, dict[str, Any]] = {}
        if annotator_id is not None and annotator_id in docs:
            pane_annotators = [annotator_id]
            relevant_docs = {annotator_id: docs[annotator_id]}

        cache_key = sha256_hex(canonical_json({
            "session": session_id,
            "template": sha256_hex(template_text),
            "data": sha256_hex(data_text),
            "state": relevant_docs,
            "locale": locale or "",
            "panes": pane_annotators or [],
        }))
        cached = app.state.interface_cache.get(cache_key)
        if cached is not None:
            app.state.cache_stats["hits"] += 1
            return Response(content=cached, media_type="application/json")
        app.state.cache_stats["misses"] += 1

        t = parse_template(template_text)
        instances = parse_instances(data_text, t.config)
        annotations = _documents_to_set(relevant_docs, t, instances) if relevant_docs else None
        ir = compile_interface(t, instances, annotations, locale=locale,
                               pane_annotators=pane_annotators)
        payload = canonical_json(ir)
        app.state.interface_cache[cache_key] = payload
        return Response(content=payload, media_type="application/json")

    @app.post("/api/session/{session_id}/annotations")
    async def submit_annotations(session_id: str, request: Request) -> dict[str, str]:
        _session_or_404(session_id)
        _require_open(session_id)
        body = await _json_body(request)
        if "annotators" in body:
            raise HttpError(400, "E_BAD_REQUEST",
                            "submit one annotator's document at a time")
        t, instances, _, _ = _load_session(store, session_id)
        try:
            parsed = annotation_set_from_data(body, t, instances)
        except ThreshError as exc:
            raise HttpError(400, exc.code, exc.message, exc.detail_dicts()) from exc
        aid = parsed.annotator_id
        receipt = store.append(session_id, {"kind": "annotations", "annotator_id": aid,
                                            "document": body})
        return {"receipt": receipt, "annotator_id": aid}

    @app.get("/api/session/{session_id}/annotations/{annotator_id}")
    async def get_annotations(session_id: str, annotator_id: str) -> dict[str, Any]:
        _session_or_404(session_id)
        docs = current_documents(store, session_id)
        document = docs.get(annotator_id)
        if document is None:
            raise HttpError(404, "E_NOT_FOUND",
                            f"no annotations from {annotator_id!r} in session {session_id!r}")
        return document

    @app.get("/api/session/{session_id}/adjudicate")
    async def adjudicate(session_id: str, annotators: str = "") -> Response:
        _session_or_404(session_id)
        requested = [a for a in annotators.split(",") if a]
        if not 2 <= len(requested) <= 3:
            raise HttpError(400, "E_BAD_REQUEST",
                            "adjudication compares 2 or 3 annotators, "
                            f"got {len(requested)}")
        if len(set(requested)) != len(requested):
            raise HttpError(400, "E_BAD_REQUEST", "annotators must be distinct")
        docs = current_documents(store, session_id)
        missing = [a for a in requested if a not in docs]
        if missing:
            raise HttpError(404, "E_NOT_FOUND",
                            "no annotations from: " + ", ".join(missing))
        t, instances, _, _ = _load_session(store, session_id)
        annotations = _documents_to_set({a: docs[a] for a in requested}, t, instances)
        try:
            ir = compile_interface(t, instances, annotations, pane_annotators=requested)
        except CompileError as exc:
            if exc.code == "E_UNKNOWN_ANNOTATOR":
                raise HttpError(404, "E_NOT_FOUND", exc.message) from exc
            raise
        return Response(content=canonical_json(ir), media_type="application/json")

    @app.post("/api/session/{session_id}/complete")
    async def complete(session_id: str, request: Request) -> dict[str, str]:
        _session_or_404(session_id)
        body = await _json_body(request)
        aid = body.get("annotator_id")
        if not isinstance(aid, str) or not aid:
            raise HttpError(400, "E_BAD_REQUEST", "annotator_id is required")
        t, instances, _, _ = _load_session(store, session_id)
        docs = current_documents(store, session_id)
        document = docs.get(aid)
        if document is None:
            raise HttpError(404, "E_NOT_FOUND",
                            f"no annotations from {aid!r} in session {session_id!r}")
        missing = missing_instances(document, [i.id for i in instances])
        if missing:
            raise HttpError(
                412, "E_INCOMPLETE",
                f"{len(missing)} instance(s) have no annotations and no explicit "
                "empty confirmation",
                details=[{"instance_id": iid} for iid in missing])
        issued_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return {"completion_code": completion_code(config.secret, session_id, aid),
                "annotator_id": aid, "issued_at": issued_at}

    @app.post("/api/session/{session_id}/close")
    async def close_session(session_id: str) -> dict[str, Any]:
        _session_or_404(session_id)
        meta = store.meta(session_id)
        meta["closed"] = True
        store.set_meta(session_id, meta)
        return {"session_id": session_id, "closed": True}

    if config.static_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="static")

    return app


def serve(config: ServerConfig, store: SessionStore | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(config, store=store), host=config.host, port=config.port,
                log_level="warning")
