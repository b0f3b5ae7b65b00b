"""Writing-process provenance: keystroke logging, word-level diffing, log
condensation, behavioral metrics, and verifiable authorship certificates."""

from .certify import Certificate, CounterSnapshot, Document, Store
from .condenser import CleanedLog, clean_log, parse_log, render_entry, render_log
from .diff import Change, apply_changes, detect_changes, lcs_table, tokenize
from .metrics import (
    WritingMetrics,
    analyze_log,
    avg_changes_per_word,
    edit_frequency,
    paste_ratio,
    render_stats,
    typing_speed,
)
from .session import (
    ChangeEntry,
    EditEvent,
    PasteEntry,
    SessionCounters,
    SessionState,
    begin_session,
    current_typing_speed,
    event_from_wire,
    event_to_wire,
    events_from_json,
    record_event,
    replay_events,
)

__all__ = [
    "Certificate",
    "Change",
    "ChangeEntry",
    "CleanedLog",
    "CounterSnapshot",
    "Document",
    "EditEvent",
    "PasteEntry",
    "SessionCounters",
    "SessionState",
    "Store",
    "WritingMetrics",
    "analyze_log",
    "apply_changes",
    "avg_changes_per_word",
    "begin_session",
    "clean_log",
    "current_typing_speed",
    "detect_changes",
    "edit_frequency",
    "event_from_wire",
    "event_to_wire",
    "events_from_json",
    "lcs_table",
    "parse_log",
    "paste_ratio",
    "record_event",
    "render_entry",
    "render_log",
    "render_stats",
    "replay_events",
    "tokenize",
    "typing_speed",
]

__version__ = "0.1.0"
