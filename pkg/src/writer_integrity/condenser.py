"""Raw-log condensation and the canonical text log format.

Cleaning keeps one entry per completed word-edit run: a maximal stretch of
consecutive change entries sharing a single word position collapses to its
final entry. Paste entries always survive verbatim and end the current run.

Rendered line formats (bit-exact, one entry per line):

    [DD/MM/YYYY, hh:mm:ss am] Added: "<w>",Removed: "<w>"; at position <N>
    [DD/MM/YYYY, hh:mm:ss am] Pasted: "<text>" (length <L>) at position <N>

Double quotes, backslashes and newlines inside quoted fields are escaped
with a backslash so every log renders to parseable lines. Timestamps keep
millisecond precision internally but render at whole seconds.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from .errors import LogParseError
from .session import ChangeEntry, LogEntry, PasteEntry


@dataclass(frozen=True)
class CleanedLog:
    """Condensed log plus the number of raw entries it was built from."""

    entries: tuple[LogEntry, ...]
    source_entry_count: int


def clean_log(raw: list[LogEntry]) -> CleanedLog:
    """Collapse each consecutive same-position run of changes to its last entry."""
    cleaned: list[LogEntry] = []
    run_last: ChangeEntry | None = None
    for entry in raw:
        if isinstance(entry, PasteEntry):
            if run_last is not None:
                cleaned.append(run_last)
                run_last = None
            cleaned.append(entry)
        elif run_last is not None and entry.position == run_last.position:
            run_last = entry
        else:
            if run_last is not None:
                cleaned.append(run_last)
            run_last = entry
    if run_last is not None:
        cleaned.append(run_last)
    return CleanedLog(entries=tuple(cleaned), source_entry_count=len(raw))


def render_entry(entry: LogEntry) -> str:
    ts = _render_timestamp(entry.timestamp)
    if isinstance(entry, PasteEntry):
        return (
            f'[{ts}] Pasted: "{_escape(entry.text)}" '
            f"(length {entry.char_length}) at position {entry.position}"
        )
    return (
        f'[{ts}] Added: "{_escape(entry.added)}",Removed: "{_escape(entry.removed)}"; '
        f"at position {entry.position}"
    )


def render_log(log: CleanedLog) -> str:
    """One line per entry, joined by newlines; empty log renders empty."""
    return "\n".join(render_entry(entry) for entry in log.entries)


def parse_log(text: str) -> CleanedLog:
    """Inverse of render_log; raises LogParseError with the offending line number."""
    entries: list[LogEntry] = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        entries.append(parse_entry(line, number))
    return CleanedLog(entries=tuple(entries), source_entry_count=len(entries))


def parse_entry(line: str, line_number: int = 1) -> LogEntry:
    match = _CHANGE_LINE_RE.match(line)
    if match:
        return ChangeEntry(
            timestamp=_parse_timestamp(match, line_number),
            added=_unescape(match.group("added")),
            removed=_unescape(match.group("removed")),
            position=int(match.group("position")),
        )
    match = _PASTE_LINE_RE.match(line)
    if match:
        text = _unescape(match.group("text"))
        length = int(match.group("length"))
        if length != len(text):
            raise LogParseError(
                f"pasted length {length} does not match text of {len(text)} characters",
                line_number,
            )
        return PasteEntry(
            timestamp=_parse_timestamp(match, line_number),
            text=text,
            char_length=length,
            position=int(match.group("position")),
        )
    raise LogParseError(f"unrecognized log line: {line!r}", line_number)


_TS_PATTERN = r"\[(?P<day>\d{2})/(?P<month>\d{2})/(?P<year>\d{4}), (?P<hour>\d{2}):(?P<minute>\d{2}):(?P<second>\d{2}) (?P<meridiem>am|pm)\]"
_QUOTED = r'"(?P<%s>(?:[^"\\]|\\.)*)"'

_CHANGE_LINE_RE = re.compile(
    _TS_PATTERN
    + r" Added: "
    + _QUOTED % "added"
    + r",Removed: "
    + _QUOTED % "removed"
    + r"; at position (?P<position>\d+)$"
)
_PASTE_LINE_RE = re.compile(
    _TS_PATTERN
    + r" Pasted: "
    + _QUOTED % "text"
    + r" \(length (?P<length>\d+)\) at position (?P<position>\d+)$"
)

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r"}


def _escape(word: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in word)


def _unescape(text: str) -> str:
    out: list[str] = []
    index = 0
    while index < len(text):
        ch = text[index]
        if ch == "\\" and index + 1 < len(text):
            out.append(_UNESCAPES.get(text[index + 1], text[index + 1]))
            index += 2
        else:
            out.append(ch)
            index += 1
    return "".join(out)


def _render_timestamp(ts: datetime) -> str:
    hour12 = ts.hour % 12 or 12
    meridiem = "am" if ts.hour < 12 else "pm"
    return (
        f"{ts.day:02d}/{ts.month:02d}/{ts.year:04d}, "
        f"{hour12:02d}:{ts.minute:02d}:{ts.second:02d} {meridiem}"
    )


def _parse_timestamp(match: re.Match, line_number: int) -> datetime:
    hour = int(match.group("hour"))
    if not 1 <= hour <= 12:
        raise LogParseError(f"12-hour clock hour out of range: {hour}", line_number)
    if match.group("meridiem") == "am":
        hour24 = 0 if hour == 12 else hour
    else:
        hour24 = 12 if hour == 12 else hour + 12
    try:
        return datetime(
            year=int(match.group("year")),
            month=int(match.group("month")),
            day=int(match.group("day")),
            hour=hour24,
            minute=int(match.group("minute")),
            second=int(match.group("second")),
        )
    except ValueError as exc:
        raise LogParseError(f"invalid timestamp: {exc}", line_number) from None
