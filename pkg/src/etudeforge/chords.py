"""Chord naming over pitch-class sets, and the inverse expansion to tones.

Matching is exact-template only: symbolic input is noiseless, so fuzzy
scoring belongs to the audio layer, not here. Ambiguous matches (e.g.
Csus2 and Gsus4 share one pitch-class set) resolve deterministically:
prefer the root equal to the bass, then the larger template, then the
lowest root.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional


class ChordQuality(str, Enum):
    MAJ = "maj"
    MIN = "min"
    DIM = "dim"
    AUG = "aug"
    DOM7 = "dom7"
    MAJ7 = "maj7"
    MIN7 = "min7"
    MIN7B5 = "min7b5"
    SUS2 = "sus2"
    SUS4 = "sus4"
    UNKNOWN = "unknown"


TEMPLATES: dict[ChordQuality, frozenset[int]] = {
    ChordQuality.MAJ: frozenset({0, 4, 7}),
    ChordQuality.MIN: frozenset({0, 3, 7}),
    ChordQuality.DIM: frozenset({0, 3, 6}),
    ChordQuality.AUG: frozenset({0, 4, 8}),
    ChordQuality.DOM7: frozenset({0, 4, 7, 10}),
    ChordQuality.MAJ7: frozenset({0, 4, 7, 11}),
    ChordQuality.MIN7: frozenset({0, 3, 7, 10}),
    ChordQuality.MIN7B5: frozenset({0, 3, 6, 10}),
    ChordQuality.SUS2: frozenset({0, 2, 7}),
    ChordQuality.SUS4: frozenset({0, 5, 7}),
}

PITCH_CLASS_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]
_NAME_TO_PC = {name: pc for pc, name in enumerate(PITCH_CLASS_NAMES)}

NO_CHORD_TEXT = "N"


class ChordError(ValueError):
    pass


@dataclass(frozen=True)
class ChordLabel:
    """A named harmony. `root` is None only for the no-chord label."""

    root: Optional[int]
    quality: ChordQuality = ChordQuality.UNKNOWN
    bass: Optional[int] = None

    @property
    def is_no_chord(self) -> bool:
        return self.root is None

    def text(self) -> str:
        """Canonical form "<Root>:<quality>[/<Bass>]", sharp-preferred."""
        if self.root is None:
            return NO_CHORD_TEXT
        s = f"{PITCH_CLASS_NAMES[self.root]}:{self.quality.value}"
        if self.bass is not None:
            s += f"/{PITCH_CLASS_NAMES[self.bass]}"
        return s

    def __str__(self) -> str:
        return self.text()


NO_CHORD = ChordLabel(root=None, quality=ChordQuality.UNKNOWN)


def parse_label(text: str) -> ChordLabel:
    """Parse the canonical chord grammar; inverse of ChordLabel.text()."""
    if text == NO_CHORD_TEXT:
        return NO_CHORD
    body, slash, bass_name = text.partition("/")
    root_name, colon, quality_name = body.partition(":")
    if not colon or root_name not in _NAME_TO_PC:
        raise ChordError(f"unparseable chord label {text!r}")
    try:
        quality = ChordQuality(quality_name)
    except ValueError:
        raise ChordError(f"unknown chord quality {quality_name!r}") from None
    bass = None
    if slash:
        if bass_name not in _NAME_TO_PC:
            raise ChordError(f"unknown bass note {bass_name!r}")
        bass = _NAME_TO_PC[bass_name]
    return ChordLabel(_NAME_TO_PC[root_name], quality, bass)


def name_chord(pcs: Iterable[int], bass: Optional[int] = None) -> ChordLabel:
    """Name a pitch-class set, optionally anchored by its bass note.

    Every member of the set is tried as a root; an exact template match
    wins. With no match the label has unknown quality, rooted at the bass
    when given, else at the lowest pitch class.
    """
    pcs = frozenset(p % 12 for p in pcs)
    if not pcs:
        raise ChordError("cannot name an empty pitch-class set")
    if bass is not None:
        bass %= 12
        if bass not in pcs:
            raise ChordError(f"bass {bass} not in pitch-class set {sorted(pcs)}")

    matches = []
    for root in sorted(pcs):
        intervals = frozenset((p - root) % 12 for p in pcs)
        for quality, template in TEMPLATES.items():
            if intervals == template:
                matches.append((root, quality, len(template)))
    if not matches:
        root = bass if bass is not None else min(pcs)
        return ChordLabel(root, ChordQuality.UNKNOWN, bass)

    def rank(match):
        root, _quality, size = match
        return (0 if root == bass else 1, -size, root)

    root, quality, _ = min(matches, key=rank)
    label_bass = bass if (bass is not None and bass != root) else None
    return ChordLabel(root, quality, label_bass)


def chord_tones(label: ChordLabel) -> set[int]:
    """Pitch classes sounded by a labeled chord."""
    if label.quality is ChordQuality.UNKNOWN or label.root is None:
        raise ChordError(f"cannot expand chord of unknown quality: {label}")
    return {(label.root + i) % 12 for i in TEMPLATES[label.quality]}
