"""Value types shared across the audio pipeline, plus the analysis JSON form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chords import ChordLabel, parse_label


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono audio, samples in [-1, 1]."""

    sample_rate: int
    samples: np.ndarray

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True, eq=False)
class ChromaSequence:
    """Per-frame pitch-class energy profiles.

    Non-silent frames carry unit L2 norm; silent frames are all-zero.
    """

    hop_seconds: float
    frames: np.ndarray  # shape (n, 12)
    duration_s: float

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True, eq=False)
class BeatGrid:
    tempo_bpm: float
    beat_times: np.ndarray  # strictly ascending seconds
    downbeat_phase: int = 0


@dataclass(frozen=True)
class ChordSegment:
    start_s: float
    end_s: float
    label: ChordLabel
    confidence: float

    @property
    def length_s(self) -> float:
        return self.end_s - self.start_s


@dataclass
class TrackAnalysis:
    """Exportable result of a full track analysis."""

    duration_s: float
    tempo_bpm: float
    beats: list[float]
    segments: list[ChordSegment]

    def to_dict(self) -> dict:
        return {
            "duration_s": self.duration_s,
            "tempo_bpm": self.tempo_bpm,
            "beats": self.beats,
            "segments": [
                {
                    "start_s": seg.start_s,
                    "end_s": seg.end_s,
                    "label": seg.label.text(),
                    "confidence": seg.confidence,
                }
                for seg in self.segments
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrackAnalysis":
        segments = [
            ChordSegment(
                start_s=item["start_s"],
                end_s=item["end_s"],
                label=parse_label(item["label"]),
                confidence=item["confidence"],
            )
            for item in data["segments"]
        ]
        return cls(
            duration_s=data["duration_s"],
            tempo_bpm=data["tempo_bpm"],
            beats=list(data["beats"]),
            segments=segments,
        )

    @property
    def grid(self) -> BeatGrid:
        return BeatGrid(self.tempo_bpm, np.asarray(self.beats, dtype=float))
