"""Stateful per-document writing session.

Ingests full-text edit events in timestamp order, classifies typed input
vs pastes, produces raw log entries through the word-level differ, and
keeps live counters (typed/pasted characters, writing time, typing speed).

Event wire shape (shared by the HTTP service and CLI replay files): one
JSON object per event with fields ``ts`` (ISO-8601 with milliseconds),
``text`` (full editor text), ``paste`` (boolean) and ``pasted`` (the
pasted payload, present iff ``paste``). A replay file is a JSON array of
such events.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .diff import detect_changes
from .errors import MalformedEventError, RejectedEventError, StaleEventError

_WORD_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class EditEvent:
    """One client-reported editing action: a full-text snapshot."""

    timestamp: datetime
    full_text: str
    is_paste: bool = False
    pasted_text: str = ""


@dataclass(frozen=True)
class ChangeEntry:
    """One logged word-level change."""

    timestamp: datetime
    added: str
    removed: str
    position: int


@dataclass(frozen=True)
class PasteEntry:
    """One logged paste action."""

    timestamp: datetime
    text: str
    char_length: int
    position: int


LogEntry = ChangeEntry | PasteEntry


@dataclass(frozen=True)
class SessionCounters:
    """Counter snapshot handed to the metrics module."""

    typed_chars: int = 0
    pasted_chars: int = 0
    writing_seconds: float = 0.0


@dataclass
class SessionState:
    """Live state of one writing session. Single writer; apply events in order."""

    previous_text: str
    start_time: datetime
    last_event_time: datetime
    total_typed_characters: int = 0
    total_pasted_characters: int = 0
    raw_log: list[LogEntry] = field(default_factory=list)
    # Optional cap on idle gaps counted toward writing time (seconds).
    idle_cap_seconds: float | None = None
    writing_seconds: float = 0.0

    def counters(self) -> SessionCounters:
        return SessionCounters(
            typed_chars=self.total_typed_characters,
            pasted_chars=self.total_pasted_characters,
            writing_seconds=self.writing_seconds,
        )


def begin_session(
    initial_text: str,
    now: datetime,
    idle_cap_seconds: float | None = None,
) -> SessionState:
    """Start a session over pre-existing text; nothing counts as typed yet."""
    return SessionState(
        previous_text=initial_text,
        start_time=now,
        last_event_time=now,
        idle_cap_seconds=idle_cap_seconds,
    )


def record_event(state: SessionState, event: EditEvent) -> tuple[SessionState, list[LogEntry]]:
    """Apply one event to the session, returning the new raw log entries.

    Typed events log one ChangeEntry per detected word change and add the
    absolute character delta (minimum 1 when the text changed at all —
    a backspace is a keystroke) to the typed-character counter. Paste
    events log a single PasteEntry and only touch the pasted counter.
    """
    if event.timestamp < state.last_event_time:
        raise StaleEventError(
            f"event at {event.timestamp.isoformat()} precedes last event "
            f"at {state.last_event_time.isoformat()}"
        )

    new_entries: list[LogEntry] = []
    if event.is_paste:
        if not event.pasted_text:
            raise RejectedEventError("paste event carries no pasted text")
        if event.pasted_text not in event.full_text:
            raise RejectedEventError("pasted text is not a substring of the full text")
        entry = PasteEntry(
            timestamp=event.timestamp,
            text=event.pasted_text,
            char_length=len(event.pasted_text),
            position=_paste_word_position(event.full_text, event.pasted_text),
        )
        new_entries.append(entry)
        state.total_pasted_characters += entry.char_length
    else:
        for change in detect_changes(state.previous_text, event.full_text):
            new_entries.append(
                ChangeEntry(
                    timestamp=event.timestamp,
                    added=change.added,
                    removed=change.removed,
                    position=change.position,
                )
            )
        if event.full_text != state.previous_text:
            delta = abs(len(event.full_text) - len(state.previous_text))
            state.total_typed_characters += max(delta, 1)

    gap = (event.timestamp - state.last_event_time).total_seconds()
    if state.idle_cap_seconds is not None:
        gap = min(gap, state.idle_cap_seconds)
    state.writing_seconds += gap
    state.previous_text = event.full_text
    state.last_event_time = event.timestamp
    state.raw_log.extend(new_entries)
    return state, new_entries


def current_typing_speed(state: SessionState, now: datetime) -> float:
    """Characters per minute so far; elapsed time is floored at one second."""
    if state.total_typed_characters == 0:
        return 0.0
    elapsed = (now - state.start_time).total_seconds()
    return state.total_typed_characters * 60.0 / max(elapsed, 1.0)


def _paste_word_position(full_text: str, pasted_text: str) -> int:
    """1-based index of the word where the pasted text begins in full_text."""
    offset = full_text.find(pasted_text)
    # First non-whitespace character of the paste, in full-text coordinates.
    lead = _WORD_RE.search(pasted_text)
    anchor = offset + (lead.start() if lead else 0)
    position = 0
    for index, match in enumerate(_WORD_RE.finditer(full_text), start=1):
        if match.start() <= anchor < match.end():
            return index
        if match.start() > anchor:
            return index
        position = index
    return position + 1


def event_from_wire(obj: object) -> EditEvent:
    """Parse one wire-shape event object; raises MalformedEventError."""
    if not isinstance(obj, dict):
        raise MalformedEventError(f"event must be an object, got {type(obj).__name__}")
    try:
        ts_raw = obj["ts"]
        text = obj["text"]
    except KeyError as exc:
        raise MalformedEventError(f"event missing field {exc.args[0]!r}") from None
    if not isinstance(ts_raw, str):
        raise MalformedEventError("event field 'ts' must be a string")
    if not isinstance(text, str):
        raise MalformedEventError("event field 'text' must be a string")
    paste = obj.get("paste", False)
    if not isinstance(paste, bool):
        raise MalformedEventError("event field 'paste' must be a boolean")
    pasted = obj.get("pasted", "")
    if paste:
        if not isinstance(pasted, str) or not pasted:
            raise MalformedEventError("paste event requires a non-empty 'pasted' string")
        if pasted not in text:
            raise MalformedEventError("pasted text is not a substring of 'text'")
    elif "pasted" in obj:
        raise MalformedEventError("'pasted' present on a non-paste event")
    return EditEvent(
        timestamp=parse_timestamp(ts_raw),
        full_text=text,
        is_paste=paste,
        pasted_text=pasted if paste else "",
    )


def event_to_wire(event: EditEvent) -> dict:
    obj: dict = {"ts": format_timestamp(event.timestamp), "text": event.full_text,
                 "paste": event.is_paste}
    if event.is_paste:
        obj["pasted"] = event.pasted_text
    return obj


def events_from_json(text: str) -> list[EditEvent]:
    """Parse a replay file (JSON array of wire events)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedEventError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(data, list):
        raise MalformedEventError("replay file must be a JSON array of events")
    events = []
    for index, obj in enumerate(data):
        try:
            events.append(event_from_wire(obj))
        except MalformedEventError as exc:
            raise MalformedEventError(f"event {index}: {exc}") from None
    return events


def parse_timestamp(raw: str) -> datetime:
    """Parse an ISO-8601 timestamp; aware inputs are normalized to naive UTC."""
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise MalformedEventError(f"invalid ISO-8601 timestamp: {raw!r}") from None
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
    return ts


def format_timestamp(ts: datetime) -> str:
    return ts.isoformat(timespec="milliseconds")


def replay_events(
    events: list[EditEvent],
    initial_text: str = "",
    idle_cap_seconds: float | None = None,
) -> SessionState:
    """Run a whole event sequence through a fresh session."""
    if not events:
        now = datetime(1970, 1, 1)
        return begin_session(initial_text, now, idle_cap_seconds)
    state = begin_session(initial_text, events[0].timestamp, idle_cap_seconds)
    for event in events:
        record_event(state, event)
    return state
