"""File-backed persistence: everything is JSON (or WAV) under one root.

Layout:
    tracks/<id>.wav        uploaded audio
    tracks/<id>.json       track metadata (title, status, error)
    analyses/<id>.json     analysis export (beats, tempo, segments)
    sessions/<id>.json     quiz session state, including issued questions
    bundles/<name>/        method-book output directories

Writes go through write-temp-then-rename so concurrent readers never see a
torn file and a crash cannot corrupt the store.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Optional

from ..audio.model import TrackAnalysis
from ..chords import parse_label
from ..quiz import (
    AnswerRecord,
    DifficultyLevel,
    QuizQuestion,
    SessionState,
    Track,
)


class DataStore:
    def __init__(self, root) -> None:
        self.root = Path(root)
        for sub in ("tracks", "analyses", "sessions", "bundles"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    # -- atomic primitives ------------------------------------------------

    def _write_atomic(self, path: Path, data: bytes) -> None:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _write_json(self, path: Path, payload: dict) -> None:
        body = json.dumps(payload, indent=2, sort_keys=True).encode("utf-8")
        self._write_atomic(path, body)

    @staticmethod
    def _read_json(path: Path) -> dict:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)

    # -- tracks -----------------------------------------------------------

    def audio_path(self, track_id: str) -> Path:
        return self.root / "tracks" / f"{track_id}.wav"

    def save_audio(self, track_id: str, data: bytes) -> Path:
        path = self.audio_path(track_id)
        self._write_atomic(path, data)
        return path

    def save_track(self, track: Track, error: Optional[str] = None) -> None:
        payload = {
            "id": track.id,
            "title": track.title,
            "status": track.status,
            "error": error,
        }
        self._write_json(self.root / "tracks" / f"{track.id}.json", payload)

    def load_tracks(self) -> tuple[dict[str, Track], dict[str, str]]:
        """All persisted tracks plus any failure messages."""
        tracks: dict[str, Track] = {}
        errors: dict[str, str] = {}
        for path in sorted((self.root / "tracks").glob("*.json")):
            meta = self._read_json(path)
            track_id = meta["id"]
            analysis = self.load_analysis(track_id)
            status = meta["status"]
            if status == "ready" and analysis is None:
                status = "pending"  # analysis file lost; redo the work
            tracks[track_id] = Track(
                id=track_id,
                title=meta["title"],
                audio_path=str(self.audio_path(track_id)),
                analysis=analysis,
                status=status,
            )
            if meta.get("error"):
                errors[track_id] = meta["error"]
        return tracks, errors

    # -- analyses ---------------------------------------------------------

    def save_analysis(self, track_id: str, analysis: TrackAnalysis) -> None:
        self._write_json(
            self.root / "analyses" / f"{track_id}.json", analysis.to_dict()
        )

    def load_analysis(self, track_id: str) -> Optional[TrackAnalysis]:
        path = self.root / "analyses" / f"{track_id}.json"
        if not path.exists():
            return None
        return TrackAnalysis.from_dict(self._read_json(path))

    # -- sessions ---------------------------------------------------------

    def save_session(self, session: SessionState) -> None:
        self._write_json(
            self.root / "sessions" / f"{session.id}.json", session_to_dict(session)
        )

    def load_sessions(self) -> dict[str, SessionState]:
        sessions = {}
        for path in sorted((self.root / "sessions").glob("*.json")):
            session = session_from_dict(self._read_json(path))
            sessions[session.id] = session
        return sessions

    def bundle_dir(self, name: str) -> Path:
        return self.root / "bundles" / name


# -- session serialization ---------------------------------------------------


def question_to_dict(question: QuizQuestion) -> dict:
    return {
        "id": question.id,
        "track_id": question.track_id,
        "snippet_start_s": question.snippet_start_s,
        "snippet_end_s": question.snippet_end_s,
        "options": [label.text() for label in question.options],
        "correct_index": question.correct_index,
        "difficulty": question.difficulty.value,
    }


def question_from_dict(data: dict) -> QuizQuestion:
    return QuizQuestion(
        id=data["id"],
        track_id=data["track_id"],
        snippet_start_s=data["snippet_start_s"],
        snippet_end_s=data["snippet_end_s"],
        options=tuple(parse_label(text) for text in data["options"]),
        correct_index=data["correct_index"],
        difficulty=DifficultyLevel(data["difficulty"]),
    )


def session_to_dict(session: SessionState) -> dict:
    return {
        "id": session.id,
        "track_ids": session.track_ids,
        "difficulty": session.difficulty.value,
        "base_seed": session.base_seed,
        "history": [
            {
                "question_id": r.question_id,
                "choice": r.choice,
                "correct": r.correct,
                "timestamp": r.timestamp,
                "quality": r.quality,
            }
            for r in session.history
        ],
        "questions": {
            qid: question_to_dict(q) for qid, q in session.questions.items()
        },
        "outstanding": session.outstanding,
        "tallies": session.tallies,
    }


def session_from_dict(data: dict) -> SessionState:
    return SessionState(
        id=data["id"],
        track_ids=list(data["track_ids"]),
        difficulty=DifficultyLevel(data["difficulty"]),
        base_seed=data["base_seed"],
        history=[
            AnswerRecord(
                question_id=r["question_id"],
                choice=r["choice"],
                correct=r["correct"],
                timestamp=r["timestamp"],
                quality=r["quality"],
            )
            for r in data["history"]
        ],
        questions={
            qid: question_from_dict(q) for qid, q in data["questions"].items()
        },
        outstanding=data["outstanding"],
        tallies={k: list(v) for k, v in data["tallies"].items()},
    )
