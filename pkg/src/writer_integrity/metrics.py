"""Behavioral writing metrics and the statistics line.

Four headline numbers: typing speed (characters per minute), edit
frequency (edits per minute), paste ratio (percent of final document
characters that arrived via paste), and average changes per word. The
stats line reports word counts for pasted/typed text lengths and renders
bit-exactly, e.g.::

    Number of Pastes: 0, Total Length of Pasted Text: 0, Total Length of
    Typed Text: 15, Paste Ratio to Typed Text: 0%, Average Changes Per
    Word: 1, Typing Speed (characters per minute): 247
"""
from __future__ import annotations

from dataclasses import dataclass

from .condenser import CleanedLog
from .diff import tokenize
from .session import ChangeEntry, PasteEntry, SessionCounters


@dataclass(frozen=True)
class WritingMetrics:
    typing_speed_cpm: float
    edit_frequency_per_min: float
    paste_ratio_percent: float
    avg_changes_per_word: float
    num_pastes: int
    pasted_words: int
    typed_words: int
    total_edits: int
    total_writing_seconds: float


def typing_speed(total_typed_characters: int, total_writing_seconds: float) -> float:
    """Characters per minute; elapsed time is floored at one second.

    Multiplies before dividing so the result is a single correctly-rounded
    division of the true rational value.
    """
    return total_typed_characters * 60.0 / max(total_writing_seconds, 1.0)


def edit_frequency(total_edits: int, total_writing_seconds: float) -> float:
    """Edits per minute; same time floor as typing_speed."""
    return total_edits * 60.0 / max(total_writing_seconds, 1.0)


def paste_ratio(total_pasted_characters: int, total_document_characters: int) -> float:
    """Percent of the document's characters that were pasted.

    Not clamped: pasting text and then deleting most of the document can
    push the ratio past 100.
    """
    if total_document_characters == 0:
        return 0.0
    return total_pasted_characters * 100.0 / total_document_characters


def avg_changes_per_word(total_edits: int, total_words: int) -> float:
    if total_words == 0:
        return 0.0
    return total_edits / total_words


def analyze_log(log: CleanedLog, final_text: str, counters: SessionCounters) -> WritingMetrics:
    """Compute all metrics from a cleaned log, the final document text, and
    the session counters."""
    return analyze_counts(
        log,
        final_chars=len(final_text),
        final_words=len(tokenize(final_text)),
        counters=counters,
    )


def analyze_counts(
    log: CleanedLog, final_chars: int, final_words: int, counters: SessionCounters
) -> WritingMetrics:
    """Same as analyze_log but from pre-computed document counts (used when
    recomputing a certificate's metrics without the original text)."""
    num_pastes = 0
    pasted_words = 0
    total_edits = 0
    for entry in log.entries:
        if isinstance(entry, PasteEntry):
            num_pastes += 1
            pasted_words += len(tokenize(entry.text))
        elif isinstance(entry, ChangeEntry):
            total_edits += 1
    return WritingMetrics(
        typing_speed_cpm=typing_speed(counters.typed_chars, counters.writing_seconds),
        edit_frequency_per_min=edit_frequency(total_edits, counters.writing_seconds),
        paste_ratio_percent=paste_ratio(counters.pasted_chars, final_chars),
        avg_changes_per_word=avg_changes_per_word(total_edits, final_words),
        num_pastes=num_pastes,
        pasted_words=pasted_words,
        typed_words=max(final_words - pasted_words, 0),
        total_edits=total_edits,
        total_writing_seconds=counters.writing_seconds,
    )


def render_stats(metrics: WritingMetrics) -> str:
    """The one-line statistics summary shown on certificates."""
    return (
        f"Number of Pastes: {metrics.num_pastes}, "
        f"Total Length of Pasted Text: {metrics.pasted_words}, "
        f"Total Length of Typed Text: {metrics.typed_words}, "
        f"Paste Ratio to Typed Text: {_format_ratio(metrics.paste_ratio_percent)}%, "
        f"Average Changes Per Word: {_format_ratio(metrics.avg_changes_per_word)}, "
        f"Typing Speed (characters per minute): {_round_half_up(metrics.typing_speed_cpm)}"
    )


def _format_ratio(value: float) -> str:
    """Integers render bare; otherwise two decimals with trailing zeros dropped."""
    if value == int(value):
        return str(int(value))
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return text if text else "0"


def _round_half_up(value: float) -> int:
    return int(value + 0.5)
