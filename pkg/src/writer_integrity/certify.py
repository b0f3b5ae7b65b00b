"""Documents, certificates, and the file-backed store.

Issues "Writer's Integrity Certificates": immutable records binding a
document to the cleaned log and metrics of the session that produced it.
Re-saving a document issues a fresh certificate (supersession); old ones
stay verifiable forever.

Persistence is newline-delimited JSON under a data directory (env var
``WI_DATA_DIR``, default ``./data``):

    documents.ndjson      one record per document
    certificates.ndjson   one record per issued certificate
    rawlogs/<id>.ndjson   append-only raw log lines per document
    users.ndjson          salted password hashes for the service login

Tables are rewritten via write-new-then-rename; raw logs only grow. Each
certificate pins the byte range of its session's raw lines with a SHA-256
digest, so edits to stored logs are detectable after the fact.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import secrets
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from .condenser import CleanedLog, clean_log, render_log
from .diff import tokenize
from .errors import (
    InvalidIdError,
    NotFoundError,
    StorageError,
    ValidationError,
)
from .metrics import WritingMetrics, analyze_counts, render_stats
from .session import (
    ChangeEntry,
    LogEntry,
    PasteEntry,
    SessionCounters,
    format_timestamp,
    parse_timestamp,
)

_UUID4_RE = re.compile(
    r"^[0-9a-f]{8}-[0-9a-f]{4}-4[0-9a-f]{3}-[89ab][0-9a-f]{3}-[0-9a-f]{12}$",
    re.IGNORECASE,
)

_PBKDF2_ITERATIONS = 100_000


@dataclass
class Document:
    document_id: int
    name: str
    owner: str
    created: datetime
    modified: datetime
    content: str = ""
    certificate_id: str | None = None


@dataclass(frozen=True)
class CounterSnapshot:
    """Everything needed to recompute a certificate's metrics later."""

    typed_chars: int
    pasted_chars: int
    writing_seconds: float
    final_chars: int
    final_words: int

    def session_counters(self) -> SessionCounters:
        return SessionCounters(
            typed_chars=self.typed_chars,
            pasted_chars=self.pasted_chars,
            writing_seconds=self.writing_seconds,
        )


@dataclass(frozen=True)
class Certificate:
    certificate_id: str
    document_id: int
    document_name: str
    author: str
    issued_at: datetime
    cleaned_log: CleanedLog
    raw_log_digest: str
    raw_log_offset: int
    raw_log_count: int
    metrics: WritingMetrics
    stats_line: str
    counters: CounterSnapshot


class Store:
    """Embedded document/certificate store. Mutations are serialized."""

    def __init__(self, data_dir: str | os.PathLike | None = None):
        if data_dir is None:
            data_dir = os.environ.get("WI_DATA_DIR", "./data")
        self.data_dir = Path(data_dir)
        self.rawlog_dir = self.data_dir / "rawlogs"
        self._lock = threading.RLock()
        self._documents: dict[int, Document] = {}
        self._certificates: dict[str, Certificate] = {}
        self._users: dict[str, dict] = {}
        self._load()

    # -- documents ---------------------------------------------------------

    def create_document(self, name: str, owner: str, now: datetime) -> Document:
        if not name.strip():
            raise ValidationError("document name must not be empty")
        with self._lock:
            next_id = max(self._documents, default=0) + 1
            doc = Document(
                document_id=next_id, name=name, owner=owner, created=now, modified=now
            )
            self._documents[next_id] = doc
            self._flush_documents()
            return doc

    def list_documents(self, owner: str) -> list[Document]:
        with self._lock:
            docs = [d for d in self._documents.values() if d.owner == owner]
            return sorted(docs, key=lambda d: (d.created, d.document_id))

    def get_document(self, document_id: int) -> Document:
        with self._lock:
            try:
                return self._documents[document_id]
            except KeyError:
                raise NotFoundError(f"document {document_id} not found") from None

    def update_content(self, document_id: int, content: str, now: datetime) -> Document:
        with self._lock:
            doc = self.get_document(document_id)
            doc.content = content
            doc.modified = now
            self._flush_documents()
            return doc

    # -- users --------------------------------------------------------------

    def add_user(self, username: str, password: str) -> None:
        if not username.strip():
            raise ValidationError("username must not be empty")
        salt = secrets.token_hex(16)
        with self._lock:
            self._users[username] = {
                "username": username,
                "salt": salt,
                "hash": _hash_password(password, salt),
                "iterations": _PBKDF2_ITERATIONS,
            }
            self._flush_users()

    def check_password(self, username: str, password: str) -> bool:
        with self._lock:
            record = self._users.get(username)
        if record is None:
            return False
        return secrets.compare_digest(
            _hash_password(password, record["salt"], record["iterations"]),
            record["hash"],
        )

    # -- certificates --------------------------------------------------------

    def issue_certificate(
        self,
        document_id: int,
        raw_entries: list[LogEntry],
        counters: SessionCounters,
        final_text: str,
        now: datetime,
    ) -> Certificate:
        """Persist the session's raw log, certify it, and update the document.

        The raw-log append, certificate insert, and document update land
        together or not at all.
        """
        with self._lock:
            doc = self.get_document(document_id)
            raw_path = self._rawlog_path(document_id)
            old_raw = raw_path.read_bytes() if raw_path.exists() else b""
            offset = old_raw.count(b"\n")
            new_lines = b"".join(
                _record_bytes(entry_to_record(entry)) for entry in raw_entries
            )

            cleaned = clean_log(raw_entries)
            snapshot = CounterSnapshot(
                typed_chars=counters.typed_chars,
                pasted_chars=counters.pasted_chars,
                writing_seconds=counters.writing_seconds,
                final_chars=len(final_text),
                final_words=len(tokenize(final_text)),
            )
            metrics = analyze_counts(
                cleaned, snapshot.final_chars, snapshot.final_words, counters
            )
            cert = Certificate(
                certificate_id=str(uuid.uuid4()),
                document_id=document_id,
                document_name=doc.name,
                author=doc.owner,
                issued_at=now,
                cleaned_log=cleaned,
                raw_log_digest=hashlib.sha256(new_lines).hexdigest(),
                raw_log_offset=offset,
                raw_log_count=len(raw_entries),
                metrics=metrics,
                stats_line=render_stats(metrics),
                counters=snapshot,
            )

            old_content, old_modified, old_cert = doc.content, doc.modified, doc.certificate_id
            self._certificates[cert.certificate_id] = cert
            doc.content = final_text
            doc.modified = now
            doc.certificate_id = cert.certificate_id
            try:
                _write_atomic(raw_path, old_raw + new_lines)
                self._flush_certificates()
                self._flush_documents()
            except OSError as exc:
                # Roll back memory and files to the pre-issuance state.
                del self._certificates[cert.certificate_id]
                doc.content, doc.modified, doc.certificate_id = (
                    old_content, old_modified, old_cert,
                )
                try:
                    _write_atomic(raw_path, old_raw)
                    self._flush_certificates()
                    self._flush_documents()
                except OSError:
                    pass
                raise StorageError(f"certificate issuance failed: {exc}") from exc
            return cert

    def verify(self, certificate_id: str) -> Certificate:
        """Return the stored certificate for an id; the id must look like a UUIDv4."""
        if not _UUID4_RE.match(certificate_id):
            raise InvalidIdError(f"not a valid certificate id: {certificate_id!r}")
        with self._lock:
            try:
                return self._certificates[certificate_id.lower()]
            except KeyError:
                raise NotFoundError(f"certificate {certificate_id} not found") from None

    def check_integrity(self, certificate_id: str) -> list[str]:
        """Cross-check a certificate against the stored raw log.

        Returns a list of problems; empty means the digest matches, the
        cleaned log re-derives from the raw log byte-for-byte, and the
        stats line recomputes from the stored log and counters.
        """
        cert = self.verify(certificate_id)
        problems: list[str] = []

        raw_path = self._rawlog_path(cert.document_id)
        raw_lines = raw_path.read_bytes().split(b"\n") if raw_path.exists() else []
        window = raw_lines[cert.raw_log_offset : cert.raw_log_offset + cert.raw_log_count]
        window_bytes = b"".join(line + b"\n" for line in window)
        if len(window) != cert.raw_log_count:
            problems.append("raw log is shorter than the certified range")
        elif hashlib.sha256(window_bytes).hexdigest() != cert.raw_log_digest:
            problems.append("raw log digest mismatch")

        if not problems:
            try:
                raw_entries = [entry_from_record(json.loads(line)) for line in window]
            except (ValueError, KeyError):
                problems.append("raw log entries are unreadable")
            else:
                if render_log(clean_log(raw_entries)) != render_log(cert.cleaned_log):
                    problems.append("cleaned log does not re-derive from the raw log")

        recomputed = analyze_counts(
            cert.cleaned_log,
            cert.counters.final_chars,
            cert.counters.final_words,
            cert.counters.session_counters(),
        )
        if render_stats(recomputed) != cert.stats_line:
            problems.append("stats line does not recompute from the stored log")
        return problems

    def raw_entry_count(self, document_id: int) -> int:
        raw_path = self._rawlog_path(document_id)
        if not raw_path.exists():
            return 0
        return raw_path.read_bytes().count(b"\n")

    # -- persistence ---------------------------------------------------------

    def _rawlog_path(self, document_id: int) -> Path:
        return self.rawlog_dir / f"{document_id}.ndjson"

    def _load(self) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.rawlog_dir.mkdir(parents=True, exist_ok=True)
        for record in _read_ndjson(self.data_dir / "documents.ndjson"):
            doc = _document_from_record(record)
            self._documents[doc.document_id] = doc
        for record in _read_ndjson(self.data_dir / "certificates.ndjson"):
            cert = _certificate_from_record(record)
            self._certificates[cert.certificate_id] = cert
        for record in _read_ndjson(self.data_dir / "users.ndjson"):
            self._users[record["username"]] = record

    def _flush_documents(self) -> None:
        _write_ndjson(
            self.data_dir / "documents.ndjson",
            [_document_to_record(d) for d in sorted(self._documents.values(),
                                                    key=lambda d: d.document_id)],
        )

    def _flush_certificates(self) -> None:
        _write_ndjson(
            self.data_dir / "certificates.ndjson",
            [_certificate_to_record(c) for c in sorted(self._certificates.values(),
                                                       key=lambda c: c.issued_at.isoformat())],
        )

    def _flush_users(self) -> None:
        _write_ndjson(self.data_dir / "users.ndjson", list(self._users.values()))


# -- record codecs ------------------------------------------------------------


def entry_to_record(entry: LogEntry) -> dict:
    if isinstance(entry, PasteEntry):
        return {
            "kind": "paste",
            "ts": format_timestamp(entry.timestamp),
            "text": entry.text,
            "char_length": entry.char_length,
            "position": entry.position,
        }
    return {
        "kind": "change",
        "ts": format_timestamp(entry.timestamp),
        "added": entry.added,
        "removed": entry.removed,
        "position": entry.position,
    }


def entry_from_record(record: dict) -> LogEntry:
    if record["kind"] == "paste":
        return PasteEntry(
            timestamp=parse_timestamp(record["ts"]),
            text=record["text"],
            char_length=record["char_length"],
            position=record["position"],
        )
    return ChangeEntry(
        timestamp=parse_timestamp(record["ts"]),
        added=record["added"],
        removed=record["removed"],
        position=record["position"],
    )


def _document_to_record(doc: Document) -> dict:
    return {
        "document_id": doc.document_id,
        "name": doc.name,
        "owner": doc.owner,
        "created": format_timestamp(doc.created),
        "modified": format_timestamp(doc.modified),
        "content": doc.content,
        "certificate_id": doc.certificate_id,
    }


def _document_from_record(record: dict) -> Document:
    return Document(
        document_id=record["document_id"],
        name=record["name"],
        owner=record["owner"],
        created=parse_timestamp(record["created"]),
        modified=parse_timestamp(record["modified"]),
        content=record["content"],
        certificate_id=record["certificate_id"],
    )


def _certificate_to_record(cert: Certificate) -> dict:
    return {
        "certificate_id": cert.certificate_id,
        "document_id": cert.document_id,
        "document_name": cert.document_name,
        "author": cert.author,
        "issued_at": format_timestamp(cert.issued_at),
        "cleaned_log": [entry_to_record(e) for e in cert.cleaned_log.entries],
        "source_entry_count": cert.cleaned_log.source_entry_count,
        "raw_log_digest": cert.raw_log_digest,
        "raw_log_offset": cert.raw_log_offset,
        "raw_log_count": cert.raw_log_count,
        "metrics": vars(cert.metrics),
        "stats_line": cert.stats_line,
        "counters": vars(cert.counters),
    }


def _certificate_from_record(record: dict) -> Certificate:
    return Certificate(
        certificate_id=record["certificate_id"],
        document_id=record["document_id"],
        document_name=record["document_name"],
        author=record["author"],
        issued_at=parse_timestamp(record["issued_at"]),
        cleaned_log=CleanedLog(
            entries=tuple(entry_from_record(r) for r in record["cleaned_log"]),
            source_entry_count=record["source_entry_count"],
        ),
        raw_log_digest=record["raw_log_digest"],
        raw_log_offset=record["raw_log_offset"],
        raw_log_count=record["raw_log_count"],
        metrics=WritingMetrics(**record["metrics"]),
        stats_line=record["stats_line"],
        counters=CounterSnapshot(**record["counters"]),
    )


def _hash_password(password: str, salt: str, iterations: int = _PBKDF2_ITERATIONS) -> str:
    return hashlib.pbkdf2_hmac(
        "sha256", password.encode(), bytes.fromhex(salt), iterations
    ).hex()


def _record_bytes(record: dict) -> bytes:
    return (
        json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        + "\n"
    ).encode()


def _read_ndjson(path: Path) -> list[dict]:
    if not path.exists():
        return []
    records = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(json.loads(line))
    return records


def _write_ndjson(path: Path, records: list[dict]) -> None:
    _write_atomic(path, b"".join(_record_bytes(r) for r in records))


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
