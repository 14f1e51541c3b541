"""Additive piano-like chord synthesis and snippet extraction.

Synthesis keeps to a handful of decaying harmonics per tone: enough to
read as a piano preview, simple enough that tests can verify every
fundamental in the spectrum.
"""

from __future__ import annotations

import numpy as np

from .audio.model import AudioBuffer
from .chords import ChordLabel, ChordQuality, chord_tones

SAMPLE_RATE = 44100
PARTIAL_AMPS = (1.0, 0.5, 0.25, 0.125)
DECAY_S = 1.5
PEAK = 0.8
MIN_DURATION_S = 0.2
MAX_DURATION_S = 8.0
FADE_S = 0.010


class SynthError(ValueError):
    pass


def midi_frequency(midi: int) -> float:
    return 440.0 * 2.0 ** ((midi - 69) / 12.0)


def chord_midis(label: ChordLabel) -> list[int]:
    """Chord tones at octave 4 with the root doubled an octave below."""
    tones = sorted(chord_tones(label))
    return [48 + label.root] + [60 + pc for pc in tones]


def synthesize_chord(label: ChordLabel, duration_s: float) -> AudioBuffer:
    """Render a chord preview at 44.1 kHz, peak-normalized to 0.8."""
    if label.quality is ChordQuality.UNKNOWN or label.root is None:
        raise SynthError(f"cannot synthesize chord of unknown quality: {label}")
    if not MIN_DURATION_S <= duration_s <= MAX_DURATION_S:
        raise SynthError(
            f"duration {duration_s} s outside {MIN_DURATION_S}..{MAX_DURATION_S} s"
        )
    n = int(round(duration_s * SAMPLE_RATE))
    t = np.arange(n) / SAMPLE_RATE
    envelope = np.exp(-t / DECAY_S)
    wave = np.zeros(n)
    for midi in chord_midis(label):
        f = midi_frequency(midi)
        for k, amp in enumerate(PARTIAL_AMPS, start=1):
            wave += amp * np.sin(2 * np.pi * k * f * t)
    wave *= envelope
    peak = np.max(np.abs(wave))
    if peak > 0:
        wave *= PEAK / peak
    return AudioBuffer(SAMPLE_RATE, wave)


def extract_snippet(a: AudioBuffer, start_s: float, end_s: float) -> AudioBuffer:
    """Sample-accurate slice with 10 ms linear fades at both ends."""
    if not (0.0 <= start_s < end_s <= a.duration_s + 1e-9):
        raise SynthError(
            f"snippet bounds [{start_s}, {end_s}] outside [0, {a.duration_s:.3f}]"
        )
    lo = int(round(start_s * a.sample_rate))
    hi = min(int(round(end_s * a.sample_rate)), len(a.samples))
    clip = a.samples[lo:hi].copy()
    fade = min(int(round(FADE_S * a.sample_rate)), len(clip) // 2)
    if fade > 0:
        ramp = np.linspace(0.0, 1.0, fade, endpoint=False)
        clip[:fade] *= ramp
        clip[-fade:] *= ramp[::-1]
    return AudioBuffer(a.sample_rate, clip)
