"""Parse and serialize the uncompressed partwise MusicXML subset.

The subset covers what piano transcription services emit: part-list,
measures, attributes (divisions/key/time/clef), notes with pitch or rest,
chord stacking, ties, voices, staves, plus backup/forward cursors. Anything
presentational that the score model does not need (directions, lyrics,
notation markup) is skipped with a warning rather than rejected.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .score import (
    Duration,
    KeySignature,
    Measure,
    NoteEvent,
    Part,
    Pitch,
    Score,
    TimeSignature,
    validate_score,
)

DEFAULT_TIME = TimeSignature(4, 4)
DEFAULT_KEY = KeySignature(0, "major")

# Note children that carry no model information; dropped without comment.
_SILENT_NOTE_CHILDREN = {
    "type", "dot", "accidental", "stem", "beam", "notehead", "instrument",
    "time-modification", "notehead-text", "print-object", "cue", "level",
    "footnote",
}
_SILENT_MEASURE_CHILDREN = {"barline", "print"}

_ZIP_MAGIC = b"PK\x03\x04"


class MusicXMLError(ValueError):
    """Raised for documents outside the supported subset."""


@dataclass
class ParseReport:
    score: Score
    warnings: list[tuple[str, str]]


def _text(elem, tag, default=None):
    child = elem.find(tag)
    if child is None or child.text is None:
        return default
    return child.text.strip()


def _int_text(elem, tag, default=None, where=""):
    raw = _text(elem, tag)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise MusicXMLError(f"{where}: non-integer <{tag}> value {raw!r}") from None


class _PartParser:
    """Cursor-based walk of one <part>, producing Measures."""

    def __init__(self, part_id, divisions, warnings):
        self.part_id = part_id
        self.divisions = divisions  # None until seen
        self.warnings = warnings
        self.time = DEFAULT_TIME
        self.key = DEFAULT_KEY
        self.measure_counter = 0

    def warn(self, where, message):
        self.warnings.append((where, message))

    def parse_measure(self, elem) -> Measure:
        number = elem.get("number")
        try:
            index = int(number)
        except (TypeError, ValueError):
            index = self.measure_counter + 1
        self.measure_counter = index
        where = f"part {self.part_id} measure {index}"

        events: list[NoteEvent] = []
        position = 0
        last_anchor: NoteEvent | None = None
        for child in elem:
            if child.tag == "attributes":
                self._parse_attributes(child, where)
            elif child.tag == "note":
                note, advances = self._parse_note(child, position, last_anchor, where)
                if note is None:
                    continue
                events.append(note)
                if not note.chord_member:
                    last_anchor = note
                    if advances:
                        position += note.duration.ticks
            elif child.tag == "backup":
                ticks = _int_text(child, "duration", where=where)
                if ticks is None:
                    raise MusicXMLError(f"{where}: <backup> without duration")
                position -= ticks
                if position < 0:
                    raise MusicXMLError(f"{where}: backup before measure start")
            elif child.tag == "forward":
                ticks = _int_text(child, "duration", where=where)
                if ticks is None:
                    raise MusicXMLError(f"{where}: <forward> without duration")
                position += ticks
            elif child.tag in _SILENT_MEASURE_CHILDREN:
                pass
            else:
                self.warn(where, f"skipped unsupported element <{child.tag}>")

        capacity = self.time.capacity(self.divisions) if self.divisions else None
        if capacity is not None:
            for ev in events:
                if ev.onset + ev.duration.ticks > capacity:
                    raise MusicXMLError(
                        f"{where}: voice {ev.voice} overflows the measure "
                        f"({ev.onset} + {ev.duration.ticks} > {capacity} ticks)"
                    )

        events.sort(key=lambda ev: ev.voice)  # stable: document order kept per voice
        return Measure(index=index, time=self.time, key=self.key, events=tuple(events))

    def _parse_attributes(self, elem, where):
        divisions = _int_text(elem, "divisions", where=where)
        if divisions is not None:
            if self.divisions is not None and divisions != self.divisions:
                raise MusicXMLError(
                    f"{where}: divisions changed from {self.divisions} to {divisions}; "
                    "mid-score divisions changes are not supported"
                )
            self.divisions = divisions
        key = elem.find("key")
        if key is not None:
            fifths = _int_text(key, "fifths", default=0, where=where)
            mode = _text(key, "mode", default="major")
            if mode not in ("major", "minor"):
                self.warn(where, f"mode {mode!r} read as major")
                mode = "major"
            self.key = KeySignature(fifths, mode)
        time = elem.find("time")
        if time is not None:
            beats = _int_text(time, "beats", where=where)
            unit = _int_text(time, "beat-type", where=where)
            if beats is None or unit is None:
                raise MusicXMLError(f"{where}: incomplete <time> signature")
            self.time = TimeSignature(beats, unit)
        # clef and staves are accepted but not modeled

    def _parse_note(self, elem, position, last_anchor, where):
        if elem.find("cue") is not None:
            self.warn(where, "skipped cue note")
            return None, False
        grace = elem.find("grace") is not None
        chord_member = elem.find("chord") is not None

        pitch_elem = elem.find("pitch")
        if pitch_elem is not None:
            step = _text(pitch_elem, "step")
            if step is None:
                raise MusicXMLError(f"{where}: <pitch> without step")
            alter = _int_text(pitch_elem, "alter", default=0, where=where)
            octave = _int_text(pitch_elem, "octave", where=where)
            if octave is None:
                raise MusicXMLError(f"{where}: <pitch> without octave")
            pitch = Pitch(step, alter, octave)
        elif elem.find("rest") is not None:
            pitch = None
        else:
            raise MusicXMLError(f"{where}: note with neither <pitch> nor <rest>")

        if grace:
            ticks = 0
        else:
            ticks = _int_text(elem, "duration", where=where)
            if ticks is None:
                raise MusicXMLError(f"{where}: note without <duration>")
            if self.divisions is None:
                raise MusicXMLError(
                    f"{where}: note encountered before <divisions> was declared"
                )

        tied = any(t.get("type") == "start" for t in elem.findall("tie"))
        voice = _int_text(elem, "voice", default=1, where=where)
        staff = _int_text(elem, "staff", default=1, where=where)

        for child in elem:
            if child.tag in (
                "grace", "chord", "pitch", "rest", "duration", "tie", "voice", "staff",
            ):
                continue
            if child.tag in _SILENT_NOTE_CHILDREN:
                continue
            self.warn(where, f"skipped unsupported element <{child.tag}> in note")

        if chord_member:
            if last_anchor is None:
                raise MusicXMLError(f"{where}: <chord> note with no preceding note")
            onset = last_anchor.onset
        else:
            onset = position

        note = NoteEvent(
            pitch=pitch,
            duration=Duration(ticks, self.divisions or 1),
            onset=onset,
            voice=voice,
            staff=staff,
            chord_member=chord_member,
            tied=tied,
            grace=grace,
        )
        return note, not (grace or chord_member)


def parse_musicxml(document: bytes) -> ParseReport:
    """Parse an uncompressed partwise MusicXML document into a Score.

    Raises MusicXMLError for malformed XML, timewise scores, compressed
    containers, or content that violates the score invariants.
    """
    if document[:4] == _ZIP_MAGIC:
        raise MusicXMLError(
            "compressed .mxl containers are not supported; unpack to plain .musicxml"
        )
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise MusicXMLError(f"malformed XML: {exc}") from None

    if root.tag == "score-timewise":
        raise MusicXMLError("score-timewise documents are not supported; use partwise")
    if root.tag != "score-partwise":
        raise MusicXMLError(f"unexpected root element <{root.tag}>")

    title = _text(root, "movement-title")
    if title is None:
        work = root.find("work")
        if work is not None:
            title = _text(work, "work-title")

    part_names = {}
    part_list = root.find("part-list")
    if part_list is not None:
        for sp in part_list.findall("score-part"):
            pid = sp.get("id")
            if pid:
                part_names[pid] = _text(sp, "part-name", default=pid)

    warnings: list[tuple[str, str]] = []
    parts = []
    divisions = None
    for part_elem in root.findall("part"):
        pid = part_elem.get("id") or f"P{len(parts) + 1}"
        parser = _PartParser(pid, divisions, warnings)
        measures = tuple(parser.parse_measure(m) for m in part_elem.findall("measure"))
        divisions = parser.divisions
        parts.append(Part(part_id=pid, name=part_names.get(pid, pid), measures=measures))

    if divisions is None:
        raise MusicXMLError("document declares no <divisions>")

    score = Score(parts=tuple(parts), divisions=divisions, title=title)
    problems = validate_score(score)
    if problems:
        raise MusicXMLError("document violates score invariants: " + "; ".join(problems))
    return ParseReport(score=score, warnings=warnings)


_TYPE_BY_QUARTERS = [
    (4.0, "whole"),
    (2.0, "half"),
    (1.0, "quarter"),
    (0.5, "eighth"),
    (0.25, "16th"),
    (0.125, "32nd"),
]


def _note_type(ticks: int, divisions: int):
    """MusicXML type name and dot count for a tick length, if expressible."""
    quarters = ticks / divisions
    for base, name in _TYPE_BY_QUARTERS:
        if quarters == base:
            return name, 0
        if quarters == base * 1.5:
            return name, 1
        if quarters == base * 1.75:
            return name, 2
    return None, 0


def _emit_note(parent, ev: NoteEvent, divisions: int, emit_staff: bool):
    note = ET.SubElement(parent, "note")
    if ev.grace:
        ET.SubElement(note, "grace")
    if ev.chord_member:
        ET.SubElement(note, "chord")
    if ev.pitch is None:
        ET.SubElement(note, "rest")
    else:
        pitch = ET.SubElement(note, "pitch")
        ET.SubElement(pitch, "step").text = ev.pitch.step
        if ev.pitch.alter:
            ET.SubElement(pitch, "alter").text = str(ev.pitch.alter)
        ET.SubElement(pitch, "octave").text = str(ev.pitch.octave)
    if not ev.grace:
        ET.SubElement(note, "duration").text = str(ev.duration.ticks)
    if ev.tied:
        ET.SubElement(note, "tie", type="start")
    ET.SubElement(note, "voice").text = str(ev.voice)
    type_name, dots = _note_type(ev.duration.ticks, divisions) if not ev.grace else (None, 0)
    if type_name:
        ET.SubElement(note, "type").text = type_name
        for _ in range(dots):
            ET.SubElement(note, "dot")
    if emit_staff:
        ET.SubElement(note, "staff").text = str(ev.staff)


def _emit_measure(part_elem, measure: Measure, score: Score, prev: Measure | None,
                  two_staves: bool):
    m = ET.SubElement(part_elem, "measure", number=str(measure.index))

    first = prev is None
    if first or measure.key != prev.key or measure.time != prev.time:
        attrs = ET.SubElement(m, "attributes")
        if first:
            ET.SubElement(attrs, "divisions").text = str(score.divisions)
        if first or measure.key != prev.key:
            key = ET.SubElement(attrs, "key")
            ET.SubElement(key, "fifths").text = str(measure.key.fifths)
            ET.SubElement(key, "mode").text = measure.key.mode
        if first or measure.time != prev.time:
            time = ET.SubElement(attrs, "time")
            ET.SubElement(time, "beats").text = str(measure.time.beats)
            ET.SubElement(time, "beat-type").text = str(measure.time.beat_unit)
        if first and two_staves:
            ET.SubElement(attrs, "staves").text = "2"
            treble = ET.SubElement(attrs, "clef", number="1")
            ET.SubElement(treble, "sign").text = "G"
            ET.SubElement(treble, "line").text = "2"
            bass = ET.SubElement(attrs, "clef", number="2")
            ET.SubElement(bass, "sign").text = "F"
            ET.SubElement(bass, "line").text = "4"

    by_voice: dict[int, list[NoteEvent]] = {}
    for ev in measure.events:
        by_voice.setdefault(ev.voice, []).append(ev)

    position = 0
    for voice in sorted(by_voice):
        events = by_voice[voice]
        for ev in events:
            if not ev.chord_member and ev.onset != position:
                delta = position - ev.onset
                cursor = ET.SubElement(m, "backup" if delta > 0 else "forward")
                ET.SubElement(cursor, "duration").text = str(abs(delta))
                position = ev.onset
            _emit_note(m, ev, score.divisions, emit_staff=two_staves)
            if not ev.chord_member and not ev.grace:
                position += ev.duration.ticks


def serialize_musicxml(s: Score) -> bytes:
    """Serialize a valid Score; byte output is deterministic per input."""
    problems = validate_score(s)
    if problems:
        raise MusicXMLError("cannot serialize invalid score: " + "; ".join(problems))

    root = ET.Element("score-partwise", version="3.1")
    if s.title is not None:
        ET.SubElement(root, "movement-title").text = s.title
    part_list = ET.SubElement(root, "part-list")
    for part in s.parts:
        sp = ET.SubElement(part_list, "score-part", id=part.part_id)
        ET.SubElement(sp, "part-name").text = part.name

    for part in s.parts:
        two_staves = any(
            ev.staff == 2 for measure in part.measures for ev in measure.events
        )
        part_elem = ET.SubElement(root, "part", id=part.part_id)
        prev = None
        for measure in part.measures:
            _emit_measure(part_elem, measure, s, prev, two_staves)
            prev = measure

    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    header = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<!DOCTYPE score-partwise PUBLIC "-//Recordare//DTD MusicXML 3.1 Partwise//EN"'
        ' "http://www.musicxml.org/dtds/partwise.dtd">\n'
    )
    return (header + body + "\n").encode("utf-8")
