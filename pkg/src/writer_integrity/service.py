"""HTTP API: login, document management, live event ingestion, save/certify,
and public certificate verification.

All bodies are JSON; errors render as ``{"error": code, "message": text}``.
Document routes require a bearer token from POST /auth/login; certificate
lookup is public so reviewers without accounts can verify.

Client timestamps are trusted for log rendering (they carry the typing
rhythm), but each batch is checked against server receipt time: events
further than the skew limit from the server clock are rejected.
"""
from __future__ import annotations

import threading
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from secrets import token_urlsafe

from fastapi import Depends, FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .certify import Store
from .condenser import render_entry
from .errors import (
    DocumentTooLargeError,
    InvalidIdError,
    MalformedEventError,
    NotFoundError,
    StorageError,
    ValidationError,
)
from .session import (
    EditEvent,
    SessionState,
    begin_session,
    current_typing_speed,
    event_from_wire,
    format_timestamp,
    record_event,
)

DEFAULT_TOKEN_TTL_SECONDS = 12 * 3600
DEFAULT_MAX_SKEW_SECONDS = 300.0


def _now() -> datetime:
    """Naive UTC, matching how wire timestamps are normalized at parse time."""
    return datetime.now(timezone.utc).replace(tzinfo=None)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


@dataclass
class _LiveSession:
    state: SessionState
    # Server receipt times per accepted batch (audit companion to the
    # client-reported event timestamps): (received_at, events_in_batch).
    batch_receipts: list[tuple[datetime, int]] = field(default_factory=list)


@dataclass
class _AuthSession:
    token: str
    username: str
    expires_at: datetime


class CreateDocumentBody(BaseModel):
    name: str


@dataclass
class ServiceState:
    store: Store
    token_ttl_seconds: float = DEFAULT_TOKEN_TTL_SECONDS
    max_skew_seconds: float | None = DEFAULT_MAX_SKEW_SECONDS
    tokens: dict[str, _AuthSession] = field(default_factory=dict)
    sessions: dict[int, _LiveSession] = field(default_factory=dict)
    doc_locks: defaultdict[int, threading.Lock] = field(
        default_factory=lambda: defaultdict(threading.Lock)
    )

    def login(self, username: str, password: str) -> str:
        if not self.store.check_password(username, password):
            raise ApiError(401, "bad_credentials", "unknown user or wrong password")
        token = token_urlsafe(32)
        self.tokens[token] = _AuthSession(
            token=token,
            username=username,
            expires_at=_now() + timedelta(seconds=self.token_ttl_seconds),
        )
        return token

    def authenticate(self, authorization: str | None) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise ApiError(401, "unauthenticated", "missing bearer token")
        token = authorization[len("Bearer "):]
        auth = self.tokens.get(token)
        if auth is None:
            raise ApiError(401, "unauthenticated", "unknown token")
        if auth.expires_at < _now():
            del self.tokens[token]
            raise ApiError(401, "unauthenticated", "token expired")
        return auth.username

    def owned_document(self, document_id: int, username: str):
        try:
            doc = self.store.get_document(document_id)
        except NotFoundError:
            raise ApiError(404, "not_found", f"document {document_id} not found") from None
        if doc.owner != username:
            raise ApiError(403, "forbidden", "document belongs to another user")
        return doc


def create_app(
    store: Store,
    token_ttl_seconds: float = DEFAULT_TOKEN_TTL_SECONDS,
    max_skew_seconds: float | None = DEFAULT_MAX_SKEW_SECONDS,
    static_dir: str | None = None,
) -> FastAPI:
    """Build the API app around a store. max_skew_seconds=None disables the
    client-clock plausibility check (useful for replaying recorded files)."""
    app = FastAPI(title="writer-integrity", docs_url=None, redoc_url=None)
    svc = ServiceState(
        store=store,
        token_ttl_seconds=token_ttl_seconds,
        max_skew_seconds=max_skew_seconds,
    )
    app.state.svc = svc

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"error": "invalid_body", "message": str(exc.errors()[:1])},
        )

    def current_user(authorization: str | None = Header(default=None)) -> str:
        return svc.authenticate(authorization)

    @app.post("/auth/login")
    async def login(request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "username" not in body or "password" not in body:
            raise ApiError(400, "missing_fields", "username and password are required")
        token = svc.login(str(body["username"]), str(body["password"]))
        return {"token": token}

    @app.get("/documents")
    def list_documents(username: str = Depends(current_user)):
        return [_document_row(d) for d in svc.store.list_documents(username)]

    @app.post("/documents", status_code=201)
    def create_document(body: CreateDocumentBody, username: str = Depends(current_user)):
        try:
            doc = svc.store.create_document(body.name, username, _now())
        except ValidationError as exc:
            raise ApiError(422, "invalid_name", str(exc)) from None
        return _document_row(doc)

    @app.get("/documents/{document_id}")
    def get_document(document_id: int, username: str = Depends(current_user)):
        doc = svc.owned_document(document_id, username)
        row = _document_row(doc)
        row["content"] = doc.content
        return row

    @app.post("/documents/{document_id}/events")
    def post_events(
        document_id: int, body: list[dict], username: str = Depends(current_user)
    ):
        doc = svc.owned_document(document_id, username)
        try:
            events = [event_from_wire(obj) for obj in body]
        except MalformedEventError as exc:
            raise ApiError(422, "malformed_event", str(exc)) from None

        with svc.doc_locks[document_id]:
            live = svc.sessions.get(document_id)
            if not events:
                cpm = (
                    current_typing_speed(live.state, live.state.last_event_time)
                    if live
                    else 0.0
                )
                return {"accepted": 0, "typing_speed_cpm": cpm}

            _check_batch_order(events, live.state if live else None)
            _check_skew(events, svc.max_skew_seconds)

            if live is None:
                live = _LiveSession(
                    state=begin_session(doc.content, events[0].timestamp)
                )
                svc.sessions[document_id] = live

            snapshot = _snapshot(live.state)
            try:
                for event in events:
                    record_event(live.state, event)
            except DocumentTooLargeError as exc:
                _restore(live.state, snapshot)
                raise ApiError(422, "document_too_large", str(exc)) from None
            live.batch_receipts.append((_now(), len(events)))
            return {
                "accepted": len(events),
                "typing_speed_cpm": current_typing_speed(
                    live.state, live.state.last_event_time
                ),
            }

    @app.post("/documents/{document_id}/save")
    def save_document(document_id: int, username: str = Depends(current_user)):
        svc.owned_document(document_id, username)
        with svc.doc_locks[document_id]:
            live = svc.sessions.get(document_id)
            if live is None:
                raise ApiError(
                    409, "nothing_to_certify", "no events recorded since the last save"
                )
            try:
                cert = svc.store.issue_certificate(
                    document_id,
                    raw_entries=live.state.raw_log,
                    counters=live.state.counters(),
                    final_text=live.state.previous_text,
                    now=_now(),
                )
            except StorageError as exc:
                raise ApiError(500, "storage_failure", str(exc)) from None
            del svc.sessions[document_id]
            return {"certificate_id": cert.certificate_id, "stats_line": cert.stats_line}

    @app.get("/certificates/{certificate_id}")
    def get_certificate(certificate_id: str):
        try:
            cert = svc.store.verify(certificate_id)
        except InvalidIdError as exc:
            raise ApiError(400, "invalid_id", str(exc)) from None
        except NotFoundError as exc:
            raise ApiError(404, "not_found", str(exc)) from None
        return {
            "certificate_id": cert.certificate_id,
            "document_name": cert.document_name,
            "author": cert.author,
            "issued_at": format_timestamp(cert.issued_at),
            "stats_line": cert.stats_line,
            "log_lines": [render_entry(e) for e in cert.cleaned_log.entries],
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=Path(static_dir), html=True), name="static")

    return app


def _document_row(doc) -> dict:
    return {
        "document_id": doc.document_id,
        "name": doc.name,
        "created": format_timestamp(doc.created),
        "modified": format_timestamp(doc.modified),
        "certificate_id": doc.certificate_id,
    }


def _check_batch_order(events: list[EditEvent], state: SessionState | None) -> None:
    last = state.last_event_time if state is not None else None
    for event in events:
        if last is not None and event.timestamp < last:
            raise ApiError(
                409,
                "out_of_order",
                f"event at {event.timestamp.isoformat()} precedes {last.isoformat()}",
            )
        last = event.timestamp


def _check_skew(events: list[EditEvent], max_skew_seconds: float | None) -> None:
    if max_skew_seconds is None:
        return
    now = _now()
    for event in events:
        if abs((event.timestamp - now).total_seconds()) > max_skew_seconds:
            raise ApiError(
                409,
                "clock_skew",
                f"event timestamp {event.timestamp.isoformat()} is implausibly far "
                f"from server time {now.isoformat()}",
            )


def _snapshot(state: SessionState) -> tuple:
    return (
        state.previous_text,
        state.last_event_time,
        state.total_typed_characters,
        state.total_pasted_characters,
        state.writing_seconds,
        len(state.raw_log),
    )


def _restore(state: SessionState, snapshot: tuple) -> None:
    (
        state.previous_text,
        state.last_event_time,
        state.total_typed_characters,
        state.total_pasted_characters,
        state.writing_seconds,
        raw_len,
    ) = snapshot
    del state.raw_log[raw_len:]
