"""Core gateway logic behind the HTTP layer.

Analysis runs on a small worker pool so uploads return immediately with a
pending status. Per-session mutations serialize through one lock per
session; track bookkeeping goes through a registry lock. Every mutation
persists before it is visible, so a process kill loses at most the job in
flight, which restart re-queues.
"""

from __future__ import annotations

import random
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Optional

import numpy as np

from ..audio.model import AudioBuffer
from ..audio.pipeline import analyze_buffer
from ..audio.wav import decode_wav, encode_wav16
from ..chords import ChordError, parse_label
from ..quiz import (
    DifficultyLevel,
    QuizQuestion,
    QuizError,
    SessionState,
    Track,
    build_question,
    eligible_segments,
    grade,
    issue_question,
    next_difficulty,
)
from .store import DataStore

PREVIEW_CHORD_S = 2.0
TARGET_RATE = 44100


class NotFound(KeyError):
    pass


class Conflict(RuntimeError):
    pass


class Unprocessable(ValueError):
    pass


class BadRequest(ValueError):
    pass


class GatewayService:
    def __init__(self, store: DataStore, max_workers: int = 2) -> None:
        self.store = store
        self._registry_lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}
        self._tracks, self._track_errors = store.load_tracks()
        self._sessions = store.load_sessions()
        self._question_index = {
            qid: session.id
            for session in self._sessions.values()
            for qid in session.questions
        }
        self._executor = ThreadPoolExecutor(max_workers=max_workers)
        for track in list(self._tracks.values()):
            if track.status in ("pending", "running"):
                self._set_track(replace(track, status="pending"))
                self._executor.submit(self._analyze_job, track.id)

    def close(self) -> None:
        self._executor.shutdown(wait=False, cancel_futures=True)

    # -- tracks -----------------------------------------------------------

    def _set_track(self, track: Track, error: Optional[str] = None) -> None:
        with self._registry_lock:
            self._tracks[track.id] = track
            if error:
                self._track_errors[track.id] = error
            else:
                self._track_errors.pop(track.id, None)
        self.store.save_track(track, error)

    def add_track(self, title: str, wav_bytes: bytes) -> Track:
        track_id = uuid.uuid4().hex[:12]
        path = self.store.save_audio(track_id, wav_bytes)
        track = Track(id=track_id, title=title, audio_path=str(path),
                      status="pending")
        self._set_track(track)
        self._executor.submit(self._analyze_job, track_id)
        return track

    def _analyze_job(self, track_id: str) -> None:
        track = self._tracks.get(track_id)
        if track is None:
            return
        self._set_track(replace(track, status="running"))
        try:
            with open(self.store.audio_path(track_id), "rb") as handle:
                buffer = decode_wav(handle.read())
            analysis = analyze_buffer(buffer)
        except Exception as exc:
            self._set_track(replace(track, status="failed"), error=str(exc))
            return
        self.store.save_analysis(track_id, analysis)
        self._set_track(replace(track, status="ready", analysis=analysis))

    def list_tracks(self) -> list[Track]:
        with self._registry_lock:
            return sorted(self._tracks.values(), key=lambda t: t.id)

    def get_track(self, track_id: str) -> tuple[Track, Optional[str]]:
        track = self._tracks.get(track_id)
        if track is None:
            raise NotFound(f"track {track_id} not found")
        return track, self._track_errors.get(track_id)

    # -- sessions ----------------------------------------------------------

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def _session(self, session_id: str) -> SessionState:
        session = self._sessions.get(session_id)
        if session is None:
            raise NotFound(f"session {session_id} not found")
        return session

    def create_session(
        self,
        track_ids: list[str],
        difficulty: DifficultyLevel = DifficultyLevel.L1,
        seed: Optional[int] = None,
    ) -> SessionState:
        usable = []
        for track_id in track_ids:
            track = self._tracks.get(track_id)
            if track is None:
                raise Unprocessable(f"unknown track id {track_id!r}")
            if track.ready and eligible_segments(track.analysis):
                usable.append(track_id)
        if not usable:
            raise Unprocessable("no ready track with usable chord segments")
        session = SessionState(
            id=uuid.uuid4().hex[:12],
            track_ids=list(track_ids),
            difficulty=difficulty,
            base_seed=seed if seed is not None else random.randrange(2**31),
        )
        with self._registry_lock:
            self._sessions[session.id] = session
        self.store.save_session(session)
        return session

    def next_question(self, session_id: str) -> QuizQuestion:
        session = self._session(session_id)
        with self._lock_for(session_id):
            if session.outstanding is not None:
                raise Conflict("previous question is still unanswered")
            seed = session.base_seed + len(session.questions)
            rng = random.Random(seed)
            candidates = [
                self._tracks[tid]
                for tid in session.track_ids
                if tid in self._tracks
                and self._tracks[tid].ready
                and eligible_segments(self._tracks[tid].analysis)
            ]
            if not candidates:
                raise Unprocessable("session has no ready track to quiz on")
            track = candidates[rng.randrange(len(candidates))]
            question = build_question(track, session.difficulty, seed)
            issue_question(session, question)
            with self._registry_lock:
                self._question_index[question.id] = session_id
            self.store.save_session(session)
            return question

    def answer(self, session_id: str, question_id: str, choice: int):
        session = self._session(session_id)
        with self._lock_for(session_id):
            try:
                result = grade(session, question_id, choice)
            except KeyError as exc:
                raise NotFound(str(exc)) from None
            except QuizError as exc:
                raise Conflict(str(exc)) from None
            session.difficulty = next_difficulty(session)
            self.store.save_session(session)
            return result, session.difficulty

    def stats(self, session_id: str) -> dict:
        session = self._session(session_id)
        with self._lock_for(session_id):
            answered = len(session.history)
            correct = sum(1 for r in session.history if r.correct)
            per_quality = {
                quality: {
                    "answered": n,
                    "correct": hits,
                    "accuracy": hits / n if n else None,
                }
                for quality, (n, hits) in sorted(session.tallies.items())
            }
            return {
                "session_id": session.id,
                "answered": answered,
                "accuracy": correct / answered if answered else None,
                "per_quality": per_quality,
                "difficulty": session.difficulty.value,
            }

    # -- audio ---------------------------------------------------------------

    def _resampled(self, buffer: AudioBuffer) -> AudioBuffer:
        if buffer.sample_rate == TARGET_RATE:
            return buffer
        n_out = int(round(len(buffer.samples) * TARGET_RATE / buffer.sample_rate))
        grid_in = np.arange(len(buffer.samples)) / buffer.sample_rate
        grid_out = np.arange(n_out) / TARGET_RATE
        return AudioBuffer(TARGET_RATE, np.interp(grid_out, grid_in, buffer.samples))

    def snippet_wav(self, question_id: str) -> bytes:
        from ..synth import extract_snippet

        session_id = self._question_index.get(question_id)
        if session_id is None:
            raise NotFound(f"question {question_id} not found")
        question = self._sessions[session_id].questions[question_id]
        track, _ = self.get_track(question.track_id)
        with open(self.store.audio_path(track.id), "rb") as handle:
            buffer = decode_wav(handle.read())
        snippet = extract_snippet(
            buffer, question.snippet_start_s, question.snippet_end_s
        )
        return encode_wav16(self._resampled(snippet))

    def chord_wav(self, label_text: str) -> bytes:
        from ..synth import SynthError, synthesize_chord

        try:
            label = parse_label(label_text)
            preview = synthesize_chord(label, PREVIEW_CHORD_S)
        except (ChordError, SynthError) as exc:
            raise BadRequest(str(exc)) from None
        return encode_wav16(preview)
