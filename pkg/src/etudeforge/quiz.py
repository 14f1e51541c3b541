"""Ear-training questions over analyzed tracks: building, grading, pacing.

A question plays a beat-aligned snippet containing one chord segment and
offers four labels. Distractor difficulty scales from same-root quality
contrasts (L1) through mixed labels (L2) to near roots and relative or
parallel chords (L3). A sliding window over the last ten answers promotes
or demotes the level.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .audio.model import TrackAnalysis
from .chords import ChordLabel, ChordQuality

MIN_SNIPPET_S = 1.5
N_OPTIONS = 4
WINDOW = 10
PROMOTE_AT = 0.8
DEMOTE_BELOW = 0.5

NAMED_QUALITIES = tuple(q for q in ChordQuality if q is not ChordQuality.UNKNOWN)


class QuizError(ValueError):
    pass


class NoEligibleSegment(QuizError):
    pass


class DifficultyLevel(str, Enum):
    L1 = "L1"
    L2 = "L2"
    L3 = "L3"


LEVELS = (DifficultyLevel.L1, DifficultyLevel.L2, DifficultyLevel.L3)


@dataclass(frozen=True)
class Track:
    id: str
    title: str
    audio_path: str
    analysis: Optional[TrackAnalysis] = None
    status: str = "pending"  # pending | running | ready | failed

    @property
    def ready(self) -> bool:
        return self.status == "ready" and self.analysis is not None


@dataclass(frozen=True)
class QuizQuestion:
    id: str
    track_id: str
    snippet_start_s: float
    snippet_end_s: float
    options: tuple[ChordLabel, ...]
    correct_index: int  # server-side only; stripped before serving
    difficulty: DifficultyLevel


@dataclass(frozen=True)
class AnswerRecord:
    question_id: str
    choice: int
    correct: bool
    timestamp: float
    quality: str  # quality token of the true label, for tallies


@dataclass(frozen=True)
class GradeResult:
    question_id: str
    correct: bool
    true_label: ChordLabel
    correct_index: int


@dataclass
class SessionState:
    id: str
    track_ids: list[str]
    difficulty: DifficultyLevel
    base_seed: int
    history: list[AnswerRecord] = field(default_factory=list)
    questions: dict[str, QuizQuestion] = field(default_factory=dict)
    outstanding: Optional[str] = None
    tallies: dict[str, list[int]] = field(default_factory=dict)  # quality -> [n, hits]

    @property
    def answered(self) -> int:
        return len(self.history)


def eligible_segments(analysis: TrackAnalysis):
    return [
        seg
        for seg in analysis.segments
        if not seg.label.is_no_chord and seg.length_s >= MIN_SNIPPET_S
    ]


def _swap_mode(quality: ChordQuality) -> Optional[ChordQuality]:
    if quality is ChordQuality.MAJ:
        return ChordQuality.MIN
    if quality is ChordQuality.MIN:
        return ChordQuality.MAJ
    return None


def _l1_distractors(correct: ChordLabel, rng: random.Random):
    """Same root, different qualities; the parallel mode always appears."""
    others = [q for q in NAMED_QUALITIES if q is not correct.quality]
    picked = []
    parallel = _swap_mode(correct.quality)
    if parallel is not None:
        picked.append(parallel)
        others.remove(parallel)
    picked.extend(rng.sample(others, N_OPTIONS - 1 - len(picked)))
    return [ChordLabel(correct.root, q) for q in picked]


def _l2_distractors(correct: ChordLabel, rng: random.Random):
    chosen: list[ChordLabel] = []
    while len(chosen) < N_OPTIONS - 1:
        candidate = ChordLabel(rng.randrange(12), rng.choice(NAMED_QUALITIES))
        if candidate != correct and candidate not in chosen:
            chosen.append(candidate)
    return chosen


def _l3_distractors(correct: ChordLabel, rng: random.Random):
    """Near misses: roots within two semitones, parallel and relative chords."""
    pool = []
    for delta in (-2, -1, 1, 2):
        for quality in (ChordQuality.MAJ, ChordQuality.MIN):
            pool.append(ChordLabel((correct.root + delta) % 12, quality))
    parallel = _swap_mode(correct.quality)
    if parallel is not None:
        pool.append(ChordLabel(correct.root, parallel))
    if correct.quality is ChordQuality.MAJ:
        pool.append(ChordLabel((correct.root + 9) % 12, ChordQuality.MIN))
    elif correct.quality is ChordQuality.MIN:
        pool.append(ChordLabel((correct.root + 3) % 12, ChordQuality.MAJ))
    unique = []
    for label in pool:
        if label != correct and label not in unique:
            unique.append(label)
    return rng.sample(unique, N_OPTIONS - 1)


_DISTRACTORS = {
    DifficultyLevel.L1: _l1_distractors,
    DifficultyLevel.L2: _l2_distractors,
    DifficultyLevel.L3: _l3_distractors,
}


def build_question(track: Track, difficulty: DifficultyLevel, seed: int) -> QuizQuestion:
    """Deterministically build one question from (track, difficulty, seed)."""
    if not track.ready:
        raise QuizError(f"track {track.id} is not ready")
    segments = eligible_segments(track.analysis)
    if not segments:
        raise NoEligibleSegment(f"track {track.id} has no usable chord segment")

    rng = random.Random(seed)
    segment = segments[rng.randrange(len(segments))]

    beats = track.analysis.beats
    start = max([0.0] + [b for b in beats if b <= segment.start_s])
    end = min([track.analysis.duration_s] + [b for b in beats if b >= segment.end_s])

    correct = ChordLabel(segment.label.root, segment.label.quality)
    options = [correct] + _DISTRACTORS[difficulty](correct, rng)
    rng.shuffle(options)

    digest = hashlib.sha1(
        f"{track.id}:{difficulty.value}:{seed}".encode()
    ).hexdigest()[:12]
    return QuizQuestion(
        id=f"q{digest}",
        track_id=track.id,
        snippet_start_s=start,
        snippet_end_s=end,
        options=tuple(options),
        correct_index=options.index(correct),
        difficulty=difficulty,
    )


def issue_question(session: SessionState, question: QuizQuestion) -> None:
    if session.outstanding is not None:
        raise QuizError("previous question is still unanswered")
    session.questions[question.id] = question
    session.outstanding = question.id


def grade(session: SessionState, question_id: str, choice: int) -> GradeResult:
    """Record an answer; reject unknown ids and repeat answers."""
    question = session.questions.get(question_id)
    if question is None:
        raise KeyError(f"unknown question id {question_id!r}")
    if any(record.question_id == question_id for record in session.history):
        raise QuizError(f"question {question_id} was already answered")
    if not 0 <= choice < len(question.options):
        raise QuizError(f"choice {choice} out of range")

    correct = choice == question.correct_index
    true_label = question.options[question.correct_index]
    record = AnswerRecord(
        question_id=question_id,
        choice=choice,
        correct=correct,
        timestamp=time.time(),
        quality=true_label.quality.value,
    )
    session.history.append(record)
    tally = session.tallies.setdefault(record.quality, [0, 0])
    tally[0] += 1
    if correct:
        tally[1] += 1
    if session.outstanding == question_id:
        session.outstanding = None
    return GradeResult(
        question_id=question_id,
        correct=correct,
        true_label=true_label,
        correct_index=question.correct_index,
    )


def recompute_tallies(history: list[AnswerRecord]) -> dict[str, list[int]]:
    tallies: dict[str, list[int]] = {}
    for record in history:
        tally = tallies.setdefault(record.quality, [0, 0])
        tally[0] += 1
        if record.correct:
            tally[1] += 1
    return tallies


def next_difficulty(session: SessionState) -> DifficultyLevel:
    """Sliding-window pacing: promote at >= 80%, demote under 50%."""
    if len(session.history) < WINDOW:
        return session.difficulty
    window = session.history[-WINDOW:]
    accuracy = sum(1 for r in window if r.correct) / WINDOW
    index = LEVELS.index(session.difficulty)
    if accuracy >= PROMOTE_AT:
        index = min(index + 1, len(LEVELS) - 1)
    elif accuracy < DEMOTE_BELOW:
        index = max(index - 1, 0)
    return LEVELS[index]
