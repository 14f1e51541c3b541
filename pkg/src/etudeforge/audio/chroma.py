"""Chroma features: octave-folded pitch-class energy per analysis frame."""

from __future__ import annotations

import numpy as np

from .model import AudioBuffer, ChromaSequence

REFERENCE_RATE = 44100
REFERENCE_FRAME = 4096  # with hop = frame / 2; durations scale to other rates
MIDI_LOW = 24
MIDI_HIGH = 96
SILENCE_DBFS = -60.0


class ChromaError(ValueError):
    pass


def frame_geometry(sample_rate: int) -> tuple[int, int]:
    """Frame and hop lengths in samples, scaled to keep ~93 ms windows."""
    frame = max(16, int(round(REFERENCE_FRAME * sample_rate / REFERENCE_RATE)))
    return frame, frame // 2


def _pitch_class_mapping(frame: int, sample_rate: int) -> np.ndarray:
    """12 x nbins matrix folding spectrum bins onto their nearest pitch class."""
    freqs = np.fft.rfftfreq(frame, d=1.0 / sample_rate)
    mapping = np.zeros((12, len(freqs)))
    positive = freqs > 0
    midi = np.full(len(freqs), -1, dtype=int)
    midi[positive] = np.round(69 + 12 * np.log2(freqs[positive] / 440.0)).astype(int)
    in_range = (midi >= MIDI_LOW) & (midi <= MIDI_HIGH)
    for k in np.nonzero(in_range)[0]:
        mapping[midi[k] % 12, k] = 1.0
    return mapping


def frame_signal(samples: np.ndarray, frame: int, hop: int) -> np.ndarray:
    """Sequential frames of the signal, shape (n_frames, frame)."""
    n = 1 + (len(samples) - frame) // hop
    view = np.lib.stride_tricks.sliding_window_view(samples, frame)
    return view[:: hop][:n]


def compute_chroma(a: AudioBuffer) -> ChromaSequence:
    """Hann-windowed magnitude spectra folded to pitch classes.

    Frames below the silence floor come out all-zero; every other frame is
    L2-normalized so chord matching is level-independent.
    """
    frame, hop = frame_geometry(a.sample_rate)
    if len(a.samples) < frame:
        raise ChromaError(
            f"buffer of {len(a.samples)} samples is shorter than one "
            f"{frame}-sample frame"
        )
    frames = frame_signal(a.samples, frame, hop)
    window = np.hanning(frame)
    spectra = np.abs(np.fft.rfft(frames * window, axis=1))
    mapping = _pitch_class_mapping(frame, a.sample_rate)
    chroma = spectra @ mapping.T

    rms = np.sqrt(np.mean(frames**2, axis=1))
    floor = 10.0 ** (SILENCE_DBFS / 20.0)
    silent = rms < floor
    chroma[silent] = 0.0
    norms = np.linalg.norm(chroma, axis=1)
    audible = norms > 0
    chroma[audible] /= norms[audible, None]

    return ChromaSequence(
        hop_seconds=hop / a.sample_rate,
        frames=chroma,
        duration_s=a.duration_s,
    )
