"""Session ingestion tests: event recording, counters, wire parsing."""
from __future__ import annotations

import json
from datetime import datetime, timedelta

import pytest
from hypothesis import given
from hypothesis import strategies as st

from writer_integrity.errors import (
    MalformedEventError,
    RejectedEventError,
    StaleEventError,
)
from writer_integrity.session import (
    ChangeEntry,
    EditEvent,
    PasteEntry,
    begin_session,
    current_typing_speed,
    event_from_wire,
    event_to_wire,
    events_from_json,
    parse_timestamp,
    record_event,
    replay_events,
)

T0 = datetime(2024, 2, 13, 10, 14, 37)


def at(seconds: float) -> datetime:
    return T0 + timedelta(seconds=seconds)


def typed(seconds: float, text: str) -> EditEvent:
    return EditEvent(timestamp=at(seconds), full_text=text)


def pasted(seconds: float, text: str, payload: str) -> EditEvent:
    return EditEvent(timestamp=at(seconds), full_text=text, is_paste=True,
                     pasted_text=payload)


# -- begin_session -------------------------------------------------------------


def test_begin_session_empty():
    state = begin_session("", T0)
    assert state.previous_text == ""
    assert state.raw_log == []
    assert state.total_typed_characters == 0
    assert state.total_pasted_characters == 0


def test_begin_session_preexisting_text_not_counted():
    state = begin_session("draft", T0)
    assert state.previous_text == "draft"
    assert state.total_typed_characters == 0


def test_begin_session_times():
    state = begin_session("x", T0)
    assert state.start_time == T0
    assert state.last_event_time == T0


# -- record_event ----------------------------------------------------------------


def test_first_keystroke():
    state = begin_session("", T0)
    state, entries = record_event(state, typed(0, "C"))
    assert entries == [ChangeEntry(timestamp=T0, added="C", removed="", position=1)]
    assert state.total_typed_characters == 1
    assert state.previous_text == "C"


def test_noop_event_changes_nothing():
    state = begin_session("some draft text", T0)
    state, entries = record_event(state, typed(1, "some draft text"))
    assert entries == []
    assert state.total_typed_characters == 0
    assert state.total_pasted_characters == 0


def test_whitespace_only_edit_counts_a_keystroke_but_logs_nothing():
    state = begin_session("a b", T0)
    state, entries = record_event(state, typed(1, "a b "))
    assert entries == []
    assert state.total_typed_characters == 1


def test_backspace_counts_as_effort():
    state = begin_session("worrd", T0)
    state, entries = record_event(state, typed(1, "word"))
    assert state.total_typed_characters == 1
    assert len(entries) == 1


def test_multiword_batch_event():
    state = begin_session("", T0)
    state, entries = record_event(state, typed(0, "two words"))
    assert [e.added for e in entries] == ["two", "words"]
    assert state.total_typed_characters == 9


def test_paste_event():
    state = begin_session("intro: ", T0)
    state, entries = record_event(
        state, pasted(2, "intro: pasted body", "pasted body")
    )
    assert entries == [
        PasteEntry(timestamp=at(2), text="pasted body", char_length=11, position=2)
    ]
    assert state.total_pasted_characters == 11
    assert state.total_typed_characters == 0
    assert state.previous_text == "intro: pasted body"


def test_paste_position_is_first_pasted_word():
    state = begin_session("", T0)
    _, entries = record_event(state, pasted(1, "lorem ipsum dolor", "ipsum dolor"))
    assert entries[0].position == 2


def test_paste_midword_position():
    state = begin_session("one tw", T0)
    _, entries = record_event(state, pasted(1, "one two three", "o three"))
    assert entries[0].position == 2


def test_paste_not_substring_rejected():
    state = begin_session("", T0)
    with pytest.raises(RejectedEventError):
        record_event(state, pasted(1, "hello", "other"))


def test_paste_empty_payload_rejected():
    state = begin_session("", T0)
    with pytest.raises(RejectedEventError):
        record_event(state, EditEvent(timestamp=at(1), full_text="x", is_paste=True))


def test_stale_event_rejected():
    state = begin_session("", T0)
    record_event(state, typed(5, "a"))
    with pytest.raises(StaleEventError):
        record_event(state, typed(4, "ab"))


def test_equal_timestamps_allowed():
    state = begin_session("", T0)
    record_event(state, typed(0, "a"))
    state, entries = record_event(state, typed(0, "ab"))
    assert len(entries) == 1


# -- typing speed ----------------------------------------------------------------


def test_typing_speed_basic():
    state = begin_session("", T0)
    state.total_typed_characters = 120
    assert current_typing_speed(state, at(60)) == pytest.approx(120.0)


def test_typing_speed_zero_without_typed_chars():
    state = begin_session("", T0)
    assert current_typing_speed(state, at(300)) == 0.0


def test_typing_speed_half_minute():
    state = begin_session("", T0)
    state.total_typed_characters = 85
    assert current_typing_speed(state, at(30)) == pytest.approx(170.0)


def test_typing_speed_floors_elapsed_at_one_second():
    state = begin_session("", T0)
    state.total_typed_characters = 10
    assert current_typing_speed(state, at(0.1)) == pytest.approx(600.0)


# -- session properties ------------------------------------------------------------


events_strategy = st.lists(
    st.tuples(
        st.integers(min_value=0, max_value=300),
        st.lists(st.sampled_from(["cat", "dog", "sat", "mat", "the"]), max_size=6),
    ),
    max_size=12,
)


@given(events_strategy)
def test_replay_determinism_and_reconstruction(raw):
    seconds = 0
    events = []
    for gap, words in raw:
        seconds += gap
        events.append(typed(seconds, " ".join(words)))
    first = replay_events(events)
    second = replay_events(events)
    assert first.raw_log == second.raw_log
    if events:
        assert first.previous_text == events[-1].full_text


def test_paste_counter_additivity():
    state = begin_session("", T0)
    record_event(state, typed(0, "x"))
    record_event(state, pasted(1, "x abc", "abc"))
    record_event(state, typed(2, "x abc y"))
    record_event(state, pasted(3, "x abc y defgh", "defgh"))
    paste_total = sum(
        e.char_length for e in state.raw_log if isinstance(e, PasteEntry)
    )
    assert state.total_pasted_characters == paste_total == 8
    assert state.total_typed_characters == 3  # "x", " y" only


def test_speed_monotone_in_typed_characters():
    low = begin_session("", T0)
    high = begin_session("", T0)
    low.total_typed_characters = 10
    high.total_typed_characters = 20
    assert current_typing_speed(high, at(60)) > current_typing_speed(low, at(60))


def test_idle_cap_limits_writing_time():
    state = begin_session("", T0, idle_cap_seconds=10.0)
    record_event(state, typed(0, "a"))
    record_event(state, typed(500, "ab"))
    assert state.writing_seconds == 10.0
    uncapped = begin_session("", T0)
    record_event(uncapped, typed(0, "a"))
    record_event(uncapped, typed(500, "ab"))
    assert uncapped.writing_seconds == 500.0


# -- wire shape ----------------------------------------------------------------


def test_wire_round_trip():
    event = pasted(1.25, "a b", "b")
    assert event_from_wire(event_to_wire(event)) == event
    event = typed(3, "plain text")
    assert event_from_wire(event_to_wire(event)) == event


def test_wire_parses_iso_with_timezone():
    event = event_from_wire({"ts": "2024-02-13T10:14:37.000Z", "text": "x", "paste": False})
    assert event.timestamp == datetime(2024, 2, 13, 10, 14, 37)
    assert parse_timestamp("2024-02-13T11:14:37+01:00") == datetime(2024, 2, 13, 10, 14, 37)


@pytest.mark.parametrize(
    "obj",
    [
        "not an object",
        {},
        {"ts": "2024-02-13T10:00:00", "text": 5},
        {"ts": "not a time", "text": "x"},
        {"ts": "2024-02-13T10:00:00", "text": "x", "paste": "yes"},
        {"ts": "2024-02-13T10:00:00", "text": "x", "paste": True},
        {"ts": "2024-02-13T10:00:00", "text": "x", "paste": True, "pasted": "zz"},
        {"ts": "2024-02-13T10:00:00", "text": "x", "paste": False, "pasted": "x"},
    ],
)
def test_wire_rejects_malformed(obj):
    with pytest.raises(MalformedEventError):
        event_from_wire(obj)


def test_events_from_json_file_shape():
    events = events_from_json(json.dumps([
        {"ts": "2024-02-13T10:14:37.000", "text": "C", "paste": False},
        {"ts": "2024-02-13T10:14:38.000", "text": "C x", "paste": True, "pasted": "x"},
    ]))
    assert len(events) == 2 and events[1].is_paste


def test_events_from_json_reports_position():
    with pytest.raises(MalformedEventError, match="event 1"):
        events_from_json('[{"ts": "2024-02-13T10:00:00", "text": "a"}, {"bad": 1}]')
    with pytest.raises(MalformedEventError, match="line"):
        events_from_json("[{,]")
    with pytest.raises(MalformedEventError, match="array"):
        events_from_json('{"ts": "2024-02-13T10:00:00", "text": "a"}')
