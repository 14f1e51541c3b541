"""Score distillation for beginners: block-chord left hand, lighter right hand.

The left hand of each measure collapses to one sustained chord built from
the notes sounding in that measure. On the right hand, adjacent sixteenth
note pairs within a beat merge into a single eighth carrying the first
pitch, and grace ornaments are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .score import (
    Duration,
    Measure,
    NoteEvent,
    Part,
    Score,
    has_staff,
    pitch_to_midi,
    validate_score,
)


class SimplifyError(ValueError):
    pass


@dataclass
class SimplificationReport:
    output: Score
    lh_pitches: dict[str, list[list[str]]]  # part id -> per-measure chord pitches
    rh_pair_reductions: int
    removed_ornaments: int
    warnings: list[str]

    def as_dict(self) -> dict:
        return {
            "lh_pitches": self.lh_pitches,
            "rh_pair_reductions": self.rh_pair_reductions,
            "removed_ornaments": self.removed_ornaments,
            "warnings": self.warnings,
        }


def _lh_voice(part: Part) -> int:
    voices = [ev.voice for m in part.measures for ev in m.events if ev.staff == 2]
    return min(voices) if voices else 5


def _block_chord_measure(measure: Measure, divisions: int, voice: int):
    """One measure's staff-2 content as a block chord; returns (events, names, removed)."""
    capacity = measure.time.capacity(divisions)
    by_midi: dict[int, object] = {}
    removed = 0
    for ev in measure.events:
        if ev.staff != 2:
            continue
        if ev.grace:
            removed += 1
            continue
        if ev.pitch is None:
            continue
        midi = pitch_to_midi(ev.pitch)
        kept = by_midi.get(midi)
        if kept is None or ev.pitch.octave < kept.octave:
            by_midi[midi] = ev.pitch
    duration = Duration(capacity, divisions)
    if not by_midi:
        events = [NoteEvent(None, duration, 0, voice=voice, staff=2)]
        return events, [], removed
    pitches = [by_midi[m] for m in sorted(by_midi)]
    events = [
        NoteEvent(p, duration, 0, voice=voice, staff=2, chord_member=(i > 0))
        for i, p in enumerate(pitches)
    ]
    return events, [str(p) for p in pitches], removed


def block_chord_left_hand(s: Score) -> Score:
    """Replace every measure's staff-2 content with one whole-measure chord."""
    return _block_chord(s)[0]


def _block_chord(s: Score):
    if not has_staff(s, 2):
        warning = "score has no staff-2 content; left hand left unchanged"
        return s, {p.part_id: [[] for _ in p.measures] for p in s.parts}, 0, [warning]

    lh_pitches: dict[str, list[list[str]]] = {}
    removed_total = 0
    parts = []
    for part in s.parts:
        voice = _lh_voice(part)
        per_measure = []
        measures = []
        for measure in part.measures:
            kept = [ev for ev in measure.events if ev.staff != 2]
            chord, names, removed = _block_chord_measure(measure, s.divisions, voice)
            removed_total += removed
            per_measure.append(names)
            events = sorted(kept + chord, key=lambda e: e.voice)
            measures.append(replace(measure, events=tuple(events)))
        lh_pitches[part.part_id] = per_measure
        parts.append(replace(part, measures=tuple(measures)))
    return replace(s, parts=tuple(parts)), lh_pitches, removed_total, []


def _grouped_units(events):
    """Split an event list into (anchor, [chord members]) units, in order."""
    units = []
    for ev in events:
        if ev.chord_member and units:
            units[-1][1].append(ev)
        else:
            units.append((ev, []))
    return units


def _simplify_rh_measure(measure: Measure, divisions: int):
    staff1 = [ev for ev in measure.events if ev.staff == 1]
    others = [ev for ev in measure.events if ev.staff != 1]
    sixteenth = divisions // 4 if divisions % 4 == 0 else None
    beat = measure.time.beat_ticks(divisions)

    out: list[NoteEvent] = []
    pairs = 0
    removed = 0
    by_voice: dict[int, list] = {}
    for unit in _grouped_units(staff1):
        by_voice.setdefault(unit[0].voice, []).append(unit)

    def lone_sixteenth(unit):
        anchor, members = unit
        return (
            sixteenth is not None
            and anchor.pitch is not None
            and not anchor.grace
            and not anchor.tied
            and not members
            and anchor.duration.ticks == sixteenth
        )

    for voice in sorted(by_voice):
        units = [u for u in by_voice[voice] if not u[0].grace]
        removed += len(by_voice[voice]) - len(units)
        i = 0
        while i < len(units):
            unit = units[i]
            nxt = units[i + 1] if i + 1 < len(units) else None
            if (
                lone_sixteenth(unit)
                and nxt is not None
                and lone_sixteenth(nxt)
                and nxt[0].onset == unit[0].onset + sixteenth
                and nxt[0].onset // beat == unit[0].onset // beat
            ):
                anchor = unit[0]
                out.append(
                    replace(anchor, duration=Duration(2 * sixteenth, divisions))
                )
                pairs += 1
                i += 2
            else:
                out.append(unit[0])
                out.extend(unit[1])
                i += 1

    events = sorted(out + others, key=lambda e: e.voice)
    return replace(measure, events=tuple(events)), pairs, removed


def simplify_right_hand(s: Score) -> Score:
    return _simplify_rh(s)[0]


def _simplify_rh(s: Score):
    pairs_total = 0
    removed_total = 0
    parts = []
    for part in s.parts:
        measures = []
        for measure in part.measures:
            simplified, pairs, removed = _simplify_rh_measure(measure, s.divisions)
            pairs_total += pairs
            removed_total += removed
            measures.append(simplified)
        parts.append(replace(part, measures=tuple(measures)))
    return replace(s, parts=tuple(parts)), pairs_total, removed_total


def simplify_score(s: Score) -> SimplificationReport:
    """Full simplification pass; the output score validates cleanly."""
    problems = validate_score(s)
    if problems:
        raise SimplifyError("cannot simplify invalid score: " + "; ".join(problems))
    blocked, lh_pitches, lh_removed, warnings = _block_chord(s)
    output, pairs, rh_removed = _simplify_rh(blocked)
    problems = validate_score(output)
    if problems:
        raise SimplifyError(
            "simplification produced an invalid score: " + "; ".join(problems)
        )
    return SimplificationReport(
        output=output,
        lh_pitches=lh_pitches,
        rh_pair_reductions=pairs,
        removed_ornaments=lh_removed + rh_removed,
        warnings=warnings,
    )
