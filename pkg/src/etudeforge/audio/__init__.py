"""Audio analysis: WAV decoding, chroma features, chord and beat tracking."""

from .model import AudioBuffer, BeatGrid, ChordSegment, ChromaSequence, TrackAnalysis
from .wav import AudioDecodeError, decode_wav, encode_wav16
from .chroma import compute_chroma
from .recognize import recognize_chords
from .beats import BeatDetectError, detect_beats, snap_to_beats

__all__ = [
    "AudioBuffer",
    "AudioDecodeError",
    "BeatDetectError",
    "BeatGrid",
    "ChordSegment",
    "ChromaSequence",
    "TrackAnalysis",
    "compute_chroma",
    "decode_wav",
    "detect_beats",
    "encode_wav16",
    "recognize_chords",
    "snap_to_beats",
]
