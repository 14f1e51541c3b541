"""Shared test builders for symbolic scores."""

from __future__ import annotations

import re

from etudeforge.score import (
    Duration,
    KeySignature,
    Measure,
    NoteEvent,
    Part,
    Pitch,
    Score,
    TimeSignature,
)

_PITCH_RE = re.compile(r"^([A-G])(##|#|bb|b)?(\d)$")
_ALTER = {None: 0, "#": 1, "##": 2, "b": -1, "bb": -2}


def P(text: str) -> Pitch:
    """Pitch from shorthand like "C4", "F#5", "Bb2"."""
    m = _PITCH_RE.match(text)
    if not m:
        raise ValueError(f"bad pitch shorthand {text!r}")
    step, acc, octave = m.groups()
    return Pitch(step, _ALTER[acc], int(octave))


def ev(pitch, ticks, onset, divisions, voice=1, staff=1, chord=False, tied=False,
       grace=False):
    """NoteEvent from shorthand; pitch may be a string, Pitch, or None (rest)."""
    if isinstance(pitch, str):
        pitch = P(pitch)
    return NoteEvent(
        pitch=pitch,
        duration=Duration(ticks, divisions),
        onset=onset,
        voice=voice,
        staff=staff,
        chord_member=chord,
        tied=tied,
        grace=grace,
    )


def make_score(measure_events, divisions=4, time=TimeSignature(4, 4),
               key=KeySignature(0, "major"), title=None, part_id="P1",
               part_name="Piano", first_index=1):
    """One-part score from a list of per-measure event lists.

    Events are sorted by voice (stable) to match the parser's canonical
    ordering, so round-trip comparisons are structural.
    """
    measures = []
    for i, events in enumerate(measure_events):
        events = sorted(events, key=lambda e: e.voice)
        measures.append(
            Measure(index=first_index + i, time=time, key=key, events=tuple(events))
        )
    part = Part(part_id=part_id, name=part_name, measures=tuple(measures))
    return Score(parts=(part,), divisions=divisions, title=title)
