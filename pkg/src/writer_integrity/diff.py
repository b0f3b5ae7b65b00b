"""Word-level change detection between two text snapshots.

Texts are compared as sequences of whitespace-delimited words (punctuation
stays attached to its word). An LCS alignment decides which words are
unchanged; everything else is reported as added, removed, or — when a
removal and an addition meet at the same alignment point — a single
replacement record.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DocumentTooLargeError, MalformedChangeSetError

# Cap on LCS table size. A 25M-cell table corresponds to two ~5000-word
# documents diffed against each other, far beyond per-keystroke snapshots.
DEFAULT_MAX_CELLS = 25_000_000


@dataclass(frozen=True)
class Change:
    """One word-level change.

    ``position`` is the 1-based word index where the change lands while the
    old text is rewritten into the new one left to right; for added and
    replaced words this equals the word's index in the new text. At least
    one of ``added``/``removed`` is non-empty.
    """

    added: str
    removed: str
    position: int


def tokenize(text: str) -> list[str]:
    """Split text into maximal runs of non-whitespace characters."""
    return text.split()


def lcs_table(old: list[str], new: list[str]) -> list[list[int]]:
    """Build the (m+1) x (n+1) LCS-length table for two word sequences.

    ``table[i][j]`` is the LCS length of ``old[:i]`` and ``new[:j]``.
    """
    m, n = len(old), len(new)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        old_word = old[i - 1]
        row = table[i]
        prev = table[i - 1]
        for j in range(1, n + 1):
            if old_word == new[j - 1]:
                row[j] = prev[j - 1] + 1
            else:
                left = row[j - 1]
                up = prev[j]
                row[j] = left if left > up else up
    return table


def detect_changes(
    old_text: str,
    new_text: str,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> list[Change]:
    """Diff two texts at word level.

    Words on the LCS are omitted. Each gap between LCS anchors yields
    replacement records (removed/added words paired in order), then any
    leftover pure removals or pure additions. Positions are non-decreasing
    across the change set, so ``apply_changes`` can replay the records
    sequentially.

    Raises DocumentTooLargeError when the DP table would exceed
    ``max_cells``.
    """
    old = tokenize(old_text)
    new = tokenize(new_text)
    if old == new:
        return []
    if len(old) * len(new) > max_cells:
        raise DocumentTooLargeError(
            f"diff table of {len(old)}x{len(new)} words exceeds cap of {max_cells} cells"
        )

    table = lcs_table(old, new)

    # Backtrack, collecting one run of removed old indices / added new
    # indices per inter-anchor gap (indices 1-based, popped in descending
    # order). gap_j is the j coordinate when the gap closes: for gaps with
    # no additions it equals the number of new-text words before the gap.
    gaps: list[tuple[list[int], list[int], int]] = []
    removed_run: list[int] = []
    added_run: list[int] = []
    i, j = len(old), len(new)
    while i > 0 or j > 0:
        if i > 0 and j > 0 and old[i - 1] == new[j - 1]:
            if removed_run or added_run:
                gaps.append((removed_run, added_run, j))
                removed_run, added_run = [], []
            i -= 1
            j -= 1
        elif j > 0 and (i == 0 or table[i][j - 1] > table[i - 1][j]):
            added_run.append(j)
            j -= 1
        else:
            # Ties fall through here: prefer consuming the old side first.
            removed_run.append(i)
            i -= 1
    if removed_run or added_run:
        gaps.append((removed_run, added_run, 0))
    gaps.reverse()

    changes: list[Change] = []
    for removed_idx, added_idx, gap_j in gaps:
        removed_idx.reverse()
        added_idx.reverse()
        paired = min(len(removed_idx), len(added_idx))
        for k in range(paired):
            changes.append(
                Change(
                    added=new[added_idx[k] - 1],
                    removed=old[removed_idx[k] - 1],
                    position=added_idx[k],
                )
            )
        # Working-text index right after the paired replacements.
        cursor = added_idx[0] + paired if added_idx else gap_j + 1
        for k in range(paired, len(removed_idx)):
            changes.append(Change(added="", removed=old[removed_idx[k] - 1], position=cursor))
        for k in range(paired, len(added_idx)):
            changes.append(Change(added=new[added_idx[k] - 1], removed="", position=added_idx[k]))
    return changes


def apply_changes(old_text: str, changes: list[Change]) -> str:
    """Apply a change set produced by detect_changes, rebuilding the new text.

    Returns words joined by single spaces (whitespace is normalized).
    Raises MalformedChangeSetError when a position is out of range or a
    recorded removed word does not match the working text.
    """
    work = tokenize(old_text)
    for index, change in enumerate(changes):
        p = change.position
        if change.added and change.removed:
            if not (1 <= p <= len(work)) or work[p - 1] != change.removed:
                raise MalformedChangeSetError(
                    f"change {index}: cannot replace {change.removed!r} at position {p}"
                )
            work[p - 1] = change.added
        elif change.added:
            if not (1 <= p <= len(work) + 1):
                raise MalformedChangeSetError(
                    f"change {index}: insert position {p} out of range"
                )
            work.insert(p - 1, change.added)
        elif change.removed:
            if not (1 <= p <= len(work)) or work[p - 1] != change.removed:
                raise MalformedChangeSetError(
                    f"change {index}: cannot remove {change.removed!r} at position {p}"
                )
            del work[p - 1]
        else:
            raise MalformedChangeSetError(f"change {index}: empty added and removed")
    return " ".join(work)
