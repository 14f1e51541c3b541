"""Targeted exercises and method-book bundles built from a simplified score.

Each bundle pairs the simplified arrangement with three drills: diatonic
scales over the chord changes, the melodic rhythm on chord roots, and the
original left-hand accompaniment in isolation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .chords import ChordLabel, ChordQuality, TEMPLATES, name_chord
from .musicxml import serialize_musicxml
from .score import (
    Duration,
    KeySignature,
    Measure,
    NoteEvent,
    Part,
    Score,
    TimeSignature,
    has_staff,
    midi_to_pitch,
    pitch_to_midi,
    validate_score,
)
from .simplify import simplify_score

MAJOR_STEPS = (0, 2, 4, 5, 7, 9, 11)
MINOR_STEPS = (0, 2, 3, 5, 7, 8, 10)  # natural minor


class ExerciseError(ValueError):
    pass


def key_tonic(key: KeySignature) -> int:
    tonic = (key.fifths * 7) % 12
    if key.mode == "minor":
        tonic = (tonic + 9) % 12
    return tonic


def diatonic_pitch_classes(key: KeySignature) -> frozenset[int]:
    steps = MINOR_STEPS if key.mode == "minor" else MAJOR_STEPS
    tonic = key_tonic(key)
    return frozenset((tonic + s) % 12 for s in steps)


def key_name(key: KeySignature) -> str:
    tonic = midi_to_pitch(60 + key_tonic(key), key)
    accidental = {1: "#", -1: "b", 0: ""}[tonic.alter]
    return f"{tonic.step}{accidental} {key.mode}"


@dataclass(frozen=True)
class SkeletonEntry:
    measure_index: int
    label: ChordLabel
    time: TimeSignature


@dataclass(frozen=True)
class HarmonicSkeleton:
    entries: tuple[SkeletonEntry, ...]
    key: KeySignature
    divisions: int
    title: str


def _lead_part(s: Score) -> Part:
    for part in s.parts:
        if any(ev.staff == 2 for m in part.measures for ev in m.events):
            return part
    return s.parts[0]


def harmonic_skeleton(s: Score) -> HarmonicSkeleton:
    """Name the chord of every measure with left-hand content.

    Measures whose staff 2 holds only rests contribute no entry; pitch sets
    matching no template are labeled with unknown quality, not rejected.
    """
    if not s.parts:
        raise ExerciseError("score has no parts")
    part = _lead_part(s)
    entries = []
    for measure in part.measures:
        sounding = [
            ev for ev in measure.events
            if ev.staff == 2 and ev.pitch is not None and not ev.grace
        ]
        if not sounding:
            continue
        midis = sorted(pitch_to_midi(ev.pitch) for ev in sounding)
        pcs = {m % 12 for m in midis}
        label = name_chord(pcs, bass=midis[0] % 12)
        entries.append(SkeletonEntry(measure.index, label, measure.time))
    key = part.measures[0].key if part.measures else KeySignature(0)
    return HarmonicSkeleton(
        entries=tuple(entries),
        key=key,
        divisions=s.divisions,
        title=s.title or "Untitled",
    )


def _block_chord_events(label: ChordLabel, key, capacity, divisions, voice=5):
    """Staff-2 chord for one exercise measure, voiced close above the root."""
    root = label.root if label.root is not None else 0
    if label.quality is ChordQuality.UNKNOWN:
        intervals = (0, 7)
    else:
        intervals = tuple(sorted(TEMPLATES[label.quality]))
    duration = Duration(capacity, divisions)
    events = []
    for i, interval in enumerate(intervals):
        pitch = midi_to_pitch(48 + root + interval, key)
        events.append(
            NoteEvent(pitch, duration, 0, voice=voice, staff=2, chord_member=(i > 0))
        )
    return events


def _scale_midis(root: int, key: KeySignature):
    """Eight ascending diatonic notes from root octave 4, or None off-scale."""
    collection = sorted(diatonic_pitch_classes(key))
    if root not in collection:
        return None
    midis = [60 + root]
    pc = root
    while len(midis) < 8:
        nxt = collection[(collection.index(pc) + 1) % len(collection)]
        midis.append(midis[-1] + (nxt - pc) % 12)
        pc = nxt
    return midis


def scale_exercise(skeleton: HarmonicSkeleton) -> Score:
    """One measure per chord change: the key's scale from the chord root.

    The right hand runs eighth notes up one octave over a sustained chord.
    Entries whose root falls outside the key, or whose quality is unknown,
    keep the sustained chord under a measure of rests.
    """
    if not skeleton.entries:
        raise ExerciseError("harmonic skeleton is empty")
    divisions = skeleton.divisions if skeleton.divisions % 2 == 0 else skeleton.divisions * 2
    eighth = divisions // 2
    key = skeleton.key

    measures = []
    for i, entry in enumerate(skeleton.entries):
        capacity = entry.time.capacity(divisions)
        events = _block_chord_events(entry.label, key, capacity, divisions)
        midis = None
        if entry.label.quality is not ChordQuality.UNKNOWN:
            midis = _scale_midis(entry.label.root, key)
        onset = 0
        if midis is None:
            events.append(NoteEvent(None, Duration(capacity, divisions), 0,
                                    voice=1, staff=1))
        else:
            for midi in midis:
                if onset + eighth > capacity:
                    break
                events.append(NoteEvent(midi_to_pitch(midi, key),
                                        Duration(eighth, divisions), onset,
                                        voice=1, staff=1))
                onset += eighth
            while onset + eighth <= capacity:
                events.append(NoteEvent(None, Duration(eighth, divisions), onset,
                                        voice=1, staff=1))
                onset += eighth
            if onset < capacity:
                events.append(NoteEvent(None, Duration(capacity - onset, divisions),
                                        onset, voice=1, staff=1))
        events.sort(key=lambda e: e.voice)
        measures.append(Measure(index=i + 1, time=entry.time, key=key,
                                events=tuple(events)))

    part = Part("P1", "Piano", tuple(measures))
    return Score(parts=(part,), divisions=divisions,
                 title=f"{skeleton.title}: scales over the changes")


def rhythm_exercise(s: Score) -> Score:
    """Melodic rhythm drill: staff-1 timing kept, every pitch moved to the
    measure's chord root at octave 4; the left hand rests throughout."""
    if not has_staff(s, 1):
        raise ExerciseError("score has no staff-1 melody")
    skeleton = harmonic_skeleton(s)
    roots = {e.measure_index: e.label.root for e in skeleton.entries
             if e.label.root is not None}
    part = _lead_part(s)
    lh_voices = [ev.voice for m in part.measures for ev in m.events if ev.staff == 2]
    lh_voice = min(lh_voices) if lh_voices else None

    measures = []
    for measure in part.measures:
        capacity = measure.time.capacity(s.divisions)
        root_pitch = midi_to_pitch(60 + roots.get(measure.index, 0), measure.key)
        events = []
        for ev in measure.events:
            if ev.staff != 1:
                continue
            if ev.pitch is None:
                events.append(ev)
            else:
                events.append(NoteEvent(root_pitch, ev.duration, ev.onset,
                                        voice=ev.voice, staff=1,
                                        chord_member=ev.chord_member,
                                        tied=ev.tied, grace=ev.grace))
        if lh_voice is not None:
            events.append(NoteEvent(None, Duration(capacity, s.divisions), 0,
                                    voice=lh_voice, staff=2))
        events.sort(key=lambda e: e.voice)
        measures.append(Measure(measure.index, measure.time, measure.key,
                                tuple(events)))
    parts = (Part(part.part_id, part.name, tuple(measures)),)
    return Score(parts=parts, divisions=s.divisions,
                 title=f"{s.title or 'Untitled'}: melodic rhythm")


def lh_accompaniment_exercise(s_original: Score) -> Score:
    """The untouched left-hand pattern with the right hand silenced."""
    if not has_staff(s_original, 2):
        raise ExerciseError("score has no staff-2 accompaniment")
    part = _lead_part(s_original)
    rh_voices = [ev.voice for m in part.measures for ev in m.events if ev.staff == 1]
    rh_voice = min(rh_voices) if rh_voices else None

    measures = []
    for measure in part.measures:
        capacity = measure.time.capacity(s_original.divisions)
        events = [ev for ev in measure.events if ev.staff == 2]
        if rh_voice is not None:
            events.append(NoteEvent(None, Duration(capacity, s_original.divisions), 0,
                                    voice=rh_voice, staff=1))
        events.sort(key=lambda e: e.voice)
        measures.append(Measure(measure.index, measure.time, measure.key,
                                tuple(events)))
    parts = (Part(part.part_id, part.name, tuple(measures)),)
    return Score(parts=parts, divisions=s_original.divisions,
                 title=f"{s_original.title or 'Untitled'}: left-hand pattern")


@dataclass
class ExerciseBundle:
    simplified: Score
    exercises: list[tuple[str, Score]]  # kind -> score
    manifest: dict


def build_method_book(s_original: Score) -> ExerciseBundle:
    """Simplify a piece and derive its drill set; deterministic per input."""
    problems = validate_score(s_original)
    if problems:
        raise ExerciseError("invalid source score: " + "; ".join(problems))
    report = simplify_score(s_original)
    simplified = report.output
    skeleton = harmonic_skeleton(simplified)

    exercises = [
        ("scale", scale_exercise(skeleton)),
        ("melodic-rhythm", rhythm_exercise(simplified)),
        ("lh-accompaniment", lh_accompaniment_exercise(s_original)),
    ]
    for kind, exercise in exercises:
        problems = validate_score(exercise)
        if problems:
            raise ExerciseError(f"{kind} exercise invalid: " + "; ".join(problems))

    manifest = {
        "title": skeleton.title,
        "key": key_name(skeleton.key),
        "chords": [entry.label.text() for entry in skeleton.entries],
        "source_measures": len(_lead_part(s_original).measures),
    }
    return ExerciseBundle(simplified=simplified, exercises=exercises,
                          manifest=manifest)


BUNDLE_FILES = {
    "scale": "exercise-scale.musicxml",
    "melodic-rhythm": "exercise-rhythm.musicxml",
    "lh-accompaniment": "exercise-lh.musicxml",
}


def write_bundle(bundle: ExerciseBundle, out_dir) -> list[str]:
    """Write the bundle directory layout; returns the file names written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    (out / "simplified.musicxml").write_bytes(serialize_musicxml(bundle.simplified))
    written.append("simplified.musicxml")
    for kind, exercise in bundle.exercises:
        name = BUNDLE_FILES[kind]
        (out / name).write_bytes(serialize_musicxml(exercise))
        written.append(name)
    manifest_bytes = json.dumps(bundle.manifest, indent=2, sort_keys=True) + "\n"
    (out / "manifest.json").write_text(manifest_bytes, encoding="utf-8")
    written.append("manifest.json")
    return written
