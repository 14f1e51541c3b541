"""Full track analysis: chroma, chords, beats, beat-aligned segments."""

from __future__ import annotations

from .beats import detect_beats, snap_to_beats
from .chroma import compute_chroma
from .model import AudioBuffer, TrackAnalysis
from .recognize import recognize_chords


def analyze_buffer(a: AudioBuffer) -> TrackAnalysis:
    chroma = compute_chroma(a)
    segments = recognize_chords(chroma)
    grid = detect_beats(a)
    aligned = snap_to_beats(segments, grid)
    return TrackAnalysis(
        duration_s=a.duration_s,
        tempo_bpm=grid.tempo_bpm,
        beats=[float(t) for t in grid.beat_times],
        segments=aligned,
    )
