"""Template chord recognition with Viterbi smoothing.

25 states: 12 major and 12 minor triads as unit-normalized binary chroma
masks, plus a no-chord state matched by flat or silent frames. Per-frame
emission is cosine similarity, which the chroma normalization makes
level-independent. A sticky self-transition suppresses frame-rate label
flicker; equal-label runs merge into timed segments.
"""

from __future__ import annotations

import numpy as np

from ..chords import NO_CHORD, ChordLabel, ChordQuality
from .model import ChordSegment, ChromaSequence

SELF_TRANSITION = 0.9
# Cosine fits are scores, not probabilities; Viterbi needs a likelihood.
# Squaring calibrates the contrast so a genuine chord change outweighs the
# sticky transition within a few frames, while frame-level noise does not.
EMISSION_SHARPNESS = 2.0
_EPS = 1e-12


class RecognizeError(ValueError):
    pass


def _state_templates() -> np.ndarray:
    """(25, 12) matrix: rows are unit-normalized state templates."""
    templates = np.zeros((25, 12))
    for root in range(12):
        for offset in (0, 4, 7):  # major triad mask
            templates[root, (root + offset) % 12] = 1.0
        for offset in (0, 3, 7):  # minor triad mask
            templates[12 + root, (root + offset) % 12] = 1.0
    templates[24, :] = 1.0  # flat no-chord profile
    return templates / np.linalg.norm(templates, axis=1, keepdims=True)


_TEMPLATES = _state_templates()

_STATE_LABELS = (
    [ChordLabel(r, ChordQuality.MAJ) for r in range(12)]
    + [ChordLabel(r, ChordQuality.MIN) for r in range(12)]
    + [NO_CHORD]
)


def _emissions(frames: np.ndarray) -> np.ndarray:
    """(n, 25) cosine similarities; silent frames emit only the N state."""
    e = frames @ _TEMPLATES.T  # frames carry unit norm already
    silent = ~frames.any(axis=1)
    e[silent] = 0.0
    e[silent, 24] = 1.0
    return e


def _viterbi(emissions: np.ndarray) -> np.ndarray:
    n, k = emissions.shape
    log_e = EMISSION_SHARPNESS * np.log(np.maximum(emissions, _EPS))
    log_trans = np.full((k, k), np.log((1.0 - SELF_TRANSITION) / (k - 1)))
    np.fill_diagonal(log_trans, np.log(SELF_TRANSITION))

    delta = np.log(1.0 / k) + log_e[0]
    back = np.zeros((n, k), dtype=int)
    for t in range(1, n):
        scores = delta[:, None] + log_trans
        back[t] = np.argmax(scores, axis=0)
        delta = scores[back[t], np.arange(k)] + log_e[t]

    path = np.zeros(n, dtype=int)
    path[-1] = int(np.argmax(delta))
    for t in range(n - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path


def recognize_chords(c: ChromaSequence) -> list[ChordSegment]:
    """Decode a chord segment list tiling [0, duration]."""
    if len(c) == 0:
        raise RecognizeError("empty chroma sequence")
    emissions = _emissions(c.frames)
    path = _viterbi(emissions)
    frame_fit = emissions[np.arange(len(path)), path]

    segments: list[ChordSegment] = []
    run_start = 0
    for i in range(1, len(path) + 1):
        if i < len(path) and path[i] == path[run_start]:
            continue
        start_s = run_start * c.hop_seconds
        end_s = c.duration_s if i == len(path) else i * c.hop_seconds
        segments.append(
            ChordSegment(
                start_s=start_s,
                end_s=end_s,
                label=_STATE_LABELS[path[run_start]],
                confidence=float(np.mean(frame_fit[run_start:i])),
            )
        )
        run_start = i
    return segments
