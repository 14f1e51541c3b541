"""Beat tracking: spectral-flux onsets, autocorrelation tempo, DP beat grid.

The dynamic program places beats to maximize onset energy minus a
squared-log penalty for intervals deviating from the tempo period, the
classic formulation for offline beat tracking. Onset times are taken at
the midpoint of each hop's newly covered samples, which keeps reported
beats within half a hop of the true attack.
"""

from __future__ import annotations

import numpy as np

from .chroma import frame_geometry, frame_signal
from .model import AudioBuffer, BeatGrid, ChordSegment

TEMPO_MIN = 60.0
TEMPO_MAX = 200.0
TEMPO_CENTER = 120.0  # log-normal prior center, one-octave spread
TIGHTNESS = 100.0
MIN_DURATION_S = 2.0


class BeatDetectError(ValueError):
    pass


def onset_envelope(a: AudioBuffer) -> tuple[np.ndarray, np.ndarray, float]:
    """Half-wave-rectified spectral flux; returns (envelope, times, fps)."""
    frame, hop = frame_geometry(a.sample_rate)
    if len(a.samples) < 2 * frame:
        raise BeatDetectError("buffer too short for an onset envelope")
    frames = frame_signal(a.samples, frame, hop)
    # No analysis window here: rectangular framing keeps magnitudes
    # shift-invariant, so an attack's flux lands in exactly one hop span
    # instead of smearing across two with window-dependent weights.
    spectra = np.abs(np.fft.rfft(frames, axis=1))
    flux = np.zeros(len(spectra))
    diffs = np.maximum(spectra[1:] - spectra[:-1], 0.0)
    flux[1:] = diffs.sum(axis=1)
    # flux k measures energy arriving in [(k+1)*hop, (k+2)*hop); timestamp
    # its midpoint so beats land within half a hop of the true attack
    times = (np.arange(len(flux)) + 1.5) * hop / a.sample_rate
    return flux, times, a.sample_rate / hop


def _estimate_tempo(envelope: np.ndarray, fps: float) -> float:
    ac = np.correlate(envelope, envelope, mode="full")[len(envelope) - 1 :]
    lag_min = max(1, int(np.ceil(60.0 * fps / TEMPO_MAX)))
    lag_max = min(len(ac) - 2, int(np.floor(60.0 * fps / TEMPO_MIN)))
    if lag_max <= lag_min:
        raise BeatDetectError("envelope too short to estimate a tempo")
    lags = np.arange(lag_min, lag_max + 1)
    bpms = 60.0 * fps / lags
    weight = np.exp(-0.5 * np.log2(bpms / TEMPO_CENTER) ** 2)
    curve = ac[lags] * weight
    best = int(np.argmax(curve))

    offset = 0.0
    if 0 < best < len(curve) - 1:
        left, mid, right = curve[best - 1], curve[best], curve[best + 1]
        denom = left - 2 * mid + right
        if denom != 0:
            offset = float(np.clip(0.5 * (left - right) / denom, -0.5, 0.5))
    lag = lags[best] + offset
    return float(np.clip(60.0 * fps / lag, TEMPO_MIN, TEMPO_MAX))


def _dp_beats(envelope: np.ndarray, period: float) -> np.ndarray:
    """Indices of beat frames for a given period (in frames)."""
    n = len(envelope)
    window = np.arange(-int(round(2 * period)), -max(1, int(round(period / 2))) + 1)
    txwt = -TIGHTNESS * np.log(window / -period) ** 2

    cumscore = np.zeros(n)
    backlink = np.full(n, -1, dtype=int)
    threshold = 0.01 * envelope.max()
    starting = True
    for i in range(n):
        candidates_idx = i + window
        valid = candidates_idx >= 0
        if valid.any():
            scores = txwt[valid] + cumscore[candidates_idx[valid]]
            best = int(np.argmax(scores))
            cumscore[i] = envelope[i] + scores[best]
            if starting and envelope[i] < threshold:
                backlink[i] = -1
            else:
                backlink[i] = candidates_idx[valid][best]
                starting = False
        else:
            cumscore[i] = envelope[i]

    # last beat: strongest recent local maximum of the cumulative score
    interior = np.zeros(n, dtype=bool)
    interior[1:-1] = (cumscore[1:-1] >= cumscore[:-2]) & (
        cumscore[1:-1] >= cumscore[2:]
    )
    if not interior.any():
        raise BeatDetectError("no beat candidates found")
    median = np.median(cumscore[interior])
    strong = np.nonzero(interior & (cumscore >= 0.5 * median))[0]
    tail = int(strong[-1]) if strong.size else int(np.argmax(cumscore))

    beats = [tail]
    while backlink[beats[-1]] >= 0:
        beats.append(backlink[beats[-1]])
    beats = np.array(beats[::-1], dtype=int)

    # drop leading/trailing beats that carry no onset energy at all
    carrying = envelope[beats] > 1e-6 * envelope.max()
    if carrying.any():
        beats = beats[carrying.argmax() : len(carrying) - carrying[::-1].argmax()]
    return beats


def _refine(beats: np.ndarray, envelope: np.ndarray) -> np.ndarray:
    """Sub-frame beat offsets via a parabola through each onset peak.

    An attack landing near a hop boundary splits its flux between two
    frames; the parabola vertex recovers the in-between position.
    """
    offsets = np.zeros(len(beats))
    for i, b in enumerate(beats):
        if 0 < b < len(envelope) - 1:
            left, mid, right = envelope[b - 1 : b + 2]
            denom = left - 2 * mid + right
            if denom != 0:
                offsets[i] = np.clip(0.5 * (left - right) / denom, -0.5, 0.5)
    return offsets


def detect_beats(a: AudioBuffer) -> BeatGrid:
    """Estimate tempo and a beat grid for a buffer of at least 2 seconds."""
    if a.duration_s < MIN_DURATION_S:
        raise BeatDetectError(
            f"need at least {MIN_DURATION_S:.0f} s of audio, got {a.duration_s:.2f} s"
        )
    envelope, times, fps = onset_envelope(a)
    if envelope.max() <= 0.0:
        raise BeatDetectError("input is silent; no onsets to track")
    std = envelope.std(ddof=1)
    if std > 0:
        envelope = envelope / std

    tempo = _estimate_tempo(envelope, fps)
    beats = _dp_beats(envelope, fps * 60.0 / tempo)
    if beats.size == 0:
        raise BeatDetectError("no beats found")
    beat_times = times[beats] + _refine(beats, envelope) / fps
    return BeatGrid(tempo_bpm=tempo, beat_times=beat_times)


def snap_to_beats(
    segments: list[ChordSegment], grid: BeatGrid
) -> list[ChordSegment]:
    """Align interior segment boundaries to the nearest beats.

    Segments squeezed to zero length vanish into their neighbors; adjacent
    equal labels merge so the output still tiles the input span.
    """
    if not segments:
        return []
    beats = np.asarray(grid.beat_times, dtype=float)
    if beats.size == 0:
        raise BeatDetectError("beat grid is empty")

    bounds = [segments[0].start_s]
    for seg in segments[:-1]:
        snapped = float(beats[np.argmin(np.abs(beats - seg.end_s))])
        bounds.append(max(snapped, bounds[-1]))
    bounds.append(segments[-1].end_s)

    out: list[ChordSegment] = []
    for seg, start, end in zip(segments, bounds, bounds[1:]):
        if end - start <= 0:
            continue
        if out and out[-1].label == seg.label:
            prev = out[-1]
            total = (prev.end_s - prev.start_s) + (end - start)
            conf = (
                prev.confidence * (prev.end_s - prev.start_s)
                + seg.confidence * (end - start)
            ) / total
            out[-1] = ChordSegment(prev.start_s, end, prev.label, conf)
        else:
            out.append(ChordSegment(start, end, seg.label, seg.confidence))
    return out
