"""Symbolic score model: pitches, durations, measures, parts.

Durations are integer ticks with a score-global ticks-per-quarter value
(the MusicXML "divisions" convention), so parsed files round-trip without
rounding. Staff 1 is the right hand and staff 2 the left hand, following
piano grand-staff usage.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Optional

STEP_SEMITONES = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}

# pc -> (step, alter) for the five black keys, by spelling side
_SHARP_SPELLINGS = {1: ("C", 1), 3: ("D", 1), 6: ("F", 1), 8: ("G", 1), 10: ("A", 1)}
_FLAT_SPELLINGS = {1: ("D", -1), 3: ("E", -1), 6: ("G", -1), 8: ("A", -1), 10: ("B", -1)}
_NATURAL_STEPS = {v: k for k, v in STEP_SEMITONES.items()}


class ScoreError(ValueError):
    """Raised for values that cannot form a legal score element."""


@dataclass(frozen=True)
class Pitch:
    """A spelled pitch: letter step, chromatic alteration, octave."""

    step: str
    alter: int = 0
    octave: int = 4

    def __str__(self) -> str:
        accidental = {-2: "bb", -1: "b", 0: "", 1: "#", 2: "##"}.get(self.alter, "?")
        return f"{self.step}{accidental}{self.octave}"


@dataclass(frozen=True)
class Duration:
    """Length in ticks; `divisions` is the score-global ticks per quarter."""

    ticks: int
    divisions: int


@dataclass(frozen=True)
class TimeSignature:
    beats: int
    beat_unit: int

    def capacity(self, divisions: int) -> int:
        """Measure length in ticks. Must divide exactly."""
        total = self.beats * 4 * divisions
        if total % self.beat_unit:
            raise ScoreError(
                f"time {self.beats}/{self.beat_unit} with divisions={divisions} "
                "gives a fractional measure length"
            )
        return total // self.beat_unit

    def beat_ticks(self, divisions: int) -> int:
        """Length of one notated beat in ticks."""
        return self.capacity(divisions) // self.beats


@dataclass(frozen=True)
class KeySignature:
    fifths: int
    mode: str = "major"


@dataclass(frozen=True)
class NoteEvent:
    """One note or rest. `pitch` is None for rests.

    `chord_member` marks a note struck together with the previous event;
    it shares that event's onset and duration. `grace` marks an ornament
    note carrying zero duration.
    """

    pitch: Optional[Pitch]
    duration: Duration
    onset: int
    voice: int = 1
    staff: int = 1
    chord_member: bool = False
    tied: bool = False
    grace: bool = False

    @property
    def is_rest(self) -> bool:
        return self.pitch is None


@dataclass(frozen=True)
class Measure:
    index: int
    time: TimeSignature
    key: KeySignature
    events: tuple[NoteEvent, ...] = ()


@dataclass(frozen=True)
class Part:
    part_id: str
    name: str
    measures: tuple[Measure, ...] = ()


@dataclass(frozen=True)
class Score:
    parts: tuple[Part, ...]
    divisions: int
    title: Optional[str] = None

    def iter_measures(self) -> Iterator[tuple[Part, Measure]]:
        for part in self.parts:
            for measure in part.measures:
                yield part, measure


def pitch_to_midi(p: Pitch) -> int:
    """MIDI number of a pitch, C4 = 60."""
    if p.step not in STEP_SEMITONES:
        raise ScoreError(f"unknown step {p.step!r}")
    n = (p.octave + 1) * 12 + STEP_SEMITONES[p.step] + p.alter
    if not 0 <= n <= 127:
        raise ScoreError(f"pitch {p} maps to MIDI {n}, outside 0..127")
    return n


def midi_to_pitch(n: int, key: KeySignature) -> Pitch:
    """Spell a MIDI number in the given key.

    Natural pitch classes keep their letter; the five chromatic classes are
    spelled with sharps in sharp-side keys (fifths >= 0) and flats otherwise.
    """
    if not 0 <= n <= 127:
        raise ScoreError(f"MIDI number {n} outside 0..127")
    pc = n % 12
    octave = n // 12 - 1
    if pc in _NATURAL_STEPS:
        return Pitch(_NATURAL_STEPS[pc], 0, octave)
    table = _SHARP_SPELLINGS if key.fifths >= 0 else _FLAT_SPELLINGS
    step, alter = table[pc]
    return Pitch(step, alter, octave)


def _validate_pitch(p: Pitch, where: str, problems: list[str]) -> None:
    if p.step not in STEP_SEMITONES:
        problems.append(f"{where}: unknown step {p.step!r}")
        return
    if not -2 <= p.alter <= 2:
        problems.append(f"{where}: alter {p.alter} outside -2..+2")
    if not 0 <= p.octave <= 9:
        problems.append(f"{where}: octave {p.octave} outside 0..9")
    n = (p.octave + 1) * 12 + STEP_SEMITONES[p.step] + p.alter
    if not 0 <= n <= 127:
        problems.append(f"{where}: pitch {p} maps to MIDI {n}, outside 0..127")


def _validate_measure(
    part: Part, measure: Measure, divisions: int, problems: list[str]
) -> None:
    where = f"part {part.part_id} measure {measure.index}"
    try:
        capacity = measure.time.capacity(divisions)
    except ScoreError as exc:
        problems.append(f"{where}: {exc}")
        return
    if not -7 <= measure.key.fifths <= 7:
        problems.append(f"{where}: key fifths {measure.key.fifths} outside -7..+7")
    if measure.key.mode not in ("major", "minor"):
        problems.append(f"{where}: unknown mode {measure.key.mode!r}")
    if measure.time.beat_unit not in (1, 2, 4, 8, 16):
        problems.append(f"{where}: beat unit {measure.time.beat_unit} not a power of two")

    filled: dict[tuple[int, int], int] = {}
    previous: Optional[NoteEvent] = None
    for i, ev in enumerate(measure.events):
        spot = f"{where} event {i}"
        if ev.pitch is not None:
            _validate_pitch(ev.pitch, spot, problems)
        if ev.duration.divisions != divisions:
            problems.append(
                f"{spot}: divisions {ev.duration.divisions} != score divisions {divisions}"
            )
        if ev.grace:
            if ev.duration.ticks != 0:
                problems.append(f"{spot}: grace note with nonzero duration")
        elif ev.duration.ticks < 1:
            problems.append(f"{spot}: duration {ev.duration.ticks} < 1 tick")
        if ev.onset < 0:
            problems.append(f"{spot}: negative onset {ev.onset}")
        if ev.onset + ev.duration.ticks > capacity:
            problems.append(
                f"{spot}: voice {ev.voice} overflows measure "
                f"({ev.onset} + {ev.duration.ticks} > {capacity})"
            )
        if ev.chord_member:
            if (
                previous is None
                or previous.onset != ev.onset
                or previous.duration != ev.duration
                or previous.voice != ev.voice
            ):
                problems.append(f"{spot}: chord member does not share its anchor's onset/duration")
        else:
            previous = ev
            if not ev.grace:
                slot = (ev.voice, ev.staff)
                filled[slot] = filled.get(slot, 0) + ev.duration.ticks

    for (voice, staff), total in sorted(filled.items()):
        if total != capacity:
            kind = "underfull" if total < capacity else "overfull"
            problems.append(
                f"{where} voice {voice} staff {staff}: {kind} "
                f"({total} ticks, capacity {capacity})"
            )


def validate_score(s: Score) -> list[str]:
    """All invariant violations in a score; empty list means well-formed.

    Violations are data, not exceptions: each entry names the part, measure
    and voice it concerns.
    """
    problems: list[str] = []
    if not s.parts:
        problems.append("score has no parts")
    if s.divisions < 1:
        problems.append(f"divisions {s.divisions} < 1")
    lengths = {part.part_id: len(part.measures) for part in s.parts}
    if len(set(lengths.values())) > 1:
        detail = ", ".join(f"{pid}={n}" for pid, n in lengths.items())
        problems.append(f"parts have unequal measure counts ({detail})")
    for part in s.parts:
        for measure in part.measures:
            _validate_measure(part, measure, s.divisions, problems)
    return problems


def has_staff(s: Score, staff: int) -> bool:
    """True if any event in the score sits on the given staff."""
    return any(ev.staff == staff for _, m in s.iter_measures() for ev in m.events)


def replace_measure_events(m: Measure, events: list[NoteEvent]) -> Measure:
    return replace(m, events=tuple(events))
