"""Regenerate the golden reference-session fixtures.

Builds a per-keystroke event file for one drafting session: a writer types
a 15-word sentence left to right, one character per event, finishing each
word before starting the next. Word-completion times are pinned so the
session spans 10:14:37 to 10:15:48 on 13/02/2024. From the event file the
script also freezes the rendered raw log and the expected cleaned log.

Run from the repository root:  python tests/fixtures/make_reference_session.py
"""
from __future__ import annotations

import json
from datetime import datetime, timedelta
from pathlib import Path

from writer_integrity.condenser import clean_log, render_log
from writer_integrity.condenser import CleanedLog
from writer_integrity.session import event_to_wire, EditEvent, replay_events

FIXTURE_DIR = Path(__file__).parent

SESSION_START = datetime(2024, 2, 13, 10, 14, 37)

# (word, seconds after session start when its last character lands)
WORDS = [
    ("Convolutional", 6),
    ("Neural", 10),
    ("Network", 15),
    ("is", 28),
    ("a", 31),
    ("methodology", 39),
    ("of", 42),
    ("deep", 44),
    ("learning", 45),
    ("that", 50),
    ("is", 50),
    ("based", 51),
    ("on", 52),
    ("feature", 56),
    ("extraction.", 71),
]


def build_events() -> list[EditEvent]:
    events: list[EditEvent] = []
    text = ""
    previous_end = 0
    for index, (word, end_offset) in enumerate(WORDS):
        keystrokes = ((" " if index > 0 else "") + word)
        span = max(end_offset - previous_end, 0)
        for k, ch in enumerate(keystrokes):
            # Interpolate keystroke seconds across the word's time window.
            if len(keystrokes) > 1:
                offset = previous_end + span * (k + 1) // len(keystrokes)
            else:
                offset = end_offset
            text += ch
            events.append(
                EditEvent(
                    timestamp=SESSION_START + timedelta(seconds=offset),
                    full_text=text,
                )
            )
        previous_end = end_offset
    return events


def main() -> None:
    events = build_events()
    assert events[0].timestamp == SESSION_START
    assert events[-1].timestamp == SESSION_START + timedelta(seconds=71)

    (FIXTURE_DIR / "reference_events.json").write_text(
        json.dumps([event_to_wire(e) for e in events], indent=1) + "\n",
        encoding="utf-8",
    )

    state = replay_events(events)
    raw_log = CleanedLog(entries=tuple(state.raw_log), source_entry_count=len(state.raw_log))
    (FIXTURE_DIR / "reference_raw_log.txt").write_text(
        render_log(raw_log) + "\n", encoding="utf-8"
    )
    (FIXTURE_DIR / "reference_cleaned_log.txt").write_text(
        render_log(clean_log(state.raw_log)) + "\n", encoding="utf-8"
    )
    print(f"events: {len(events)}, raw entries: {len(state.raw_log)}, "
          f"cleaned entries: {len(clean_log(state.raw_log).entries)}")


if __name__ == "__main__":
    main()
