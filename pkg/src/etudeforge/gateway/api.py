"""HTTP surface of the gateway. All errors share one JSON body shape."""

from __future__ import annotations

from pathlib import Path
from typing import Optional
from urllib.parse import quote

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..quiz import DifficultyLevel, GradeResult, QuizQuestion, Track
from .service import BadRequest, Conflict, GatewayService, NotFound, Unprocessable


class SessionRequest(BaseModel):
    track_ids: list[str] = Field(min_length=1)
    difficulty: DifficultyLevel = DifficultyLevel.L1
    seed: Optional[int] = None


class AnswerRequest(BaseModel):
    question_id: str
    choice: int = Field(ge=0, le=3)


def track_summary(track: Track, error: Optional[str] = None) -> dict:
    body = {"id": track.id, "title": track.title, "status": track.status}
    if error:
        body["error"] = error
    return body


def track_detail(track: Track, error: Optional[str] = None) -> dict:
    body = track_summary(track, error)
    if track.analysis is not None:
        analysis = track.analysis
        body["analysis"] = {
            "duration_s": analysis.duration_s,
            "tempo_bpm": analysis.tempo_bpm,
            "beat_count": len(analysis.beats),
            "segment_count": len(analysis.segments),
            "labels": sorted({s.label.text() for s in analysis.segments}),
        }
    return body


def public_question(question: QuizQuestion) -> dict:
    """The served form of a question; correct_index never leaves the server."""
    return {
        "id": question.id,
        "track_id": question.track_id,
        "snippet_start_s": question.snippet_start_s,
        "snippet_end_s": question.snippet_end_s,
        "options": [label.text() for label in question.options],
        "difficulty": question.difficulty.value,
        "snippet_url": f"/api/audio/snippets/{question.id}.wav",
        "option_preview_urls": [
            f"/api/audio/chords/{quote(label.text(), safe=':')}.wav"
            for label in question.options
        ],
    }


def grade_body(result: GradeResult, difficulty: DifficultyLevel) -> dict:
    return {
        "question_id": result.question_id,
        "correct": result.correct,
        "true_label": result.true_label.text(),
        "correct_index": result.correct_index,
        "difficulty": difficulty.value,
    }


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(service: GatewayService, webapp_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="EtudeForge", docs_url=None, redoc_url=None)

    @app.exception_handler(NotFound)
    async def _not_found(request: Request, exc: NotFound):
        return _error(404, "not_found", str(exc.args[0]) if exc.args else "not found")

    @app.exception_handler(Conflict)
    async def _conflict(request: Request, exc: Conflict):
        return _error(409, "conflict", str(exc))

    @app.exception_handler(Unprocessable)
    async def _unprocessable(request: Request, exc: Unprocessable):
        return _error(422, "unprocessable", str(exc))

    @app.exception_handler(BadRequest)
    async def _bad_request(request: Request, exc: BadRequest):
        return _error(400, "bad_request", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation(request: Request, exc: RequestValidationError):
        return _error(400, "bad_request", str(exc.errors()[:1]))

    @app.post("/api/tracks", status_code=202)
    async def upload_track(
        file: UploadFile = File(...), title: str = Form("Untitled track")
    ):
        data = await file.read()
        track = service.add_track(title, data)
        return {"id": track.id, "status": track.status}

    @app.get("/api/tracks")
    def list_tracks():
        return [
            track_summary(t, service.get_track(t.id)[1]) for t in service.list_tracks()
        ]

    @app.get("/api/tracks/{track_id}")
    def get_track(track_id: str):
        track, error = service.get_track(track_id)
        return track_detail(track, error)

    @app.post("/api/sessions", status_code=201)
    def create_session(body: SessionRequest):
        session = service.create_session(body.track_ids, body.difficulty, body.seed)
        return {"session_id": session.id, "difficulty": session.difficulty.value}

    @app.get("/api/sessions/{session_id}/next")
    def next_question(session_id: str):
        return public_question(service.next_question(session_id))

    @app.post("/api/sessions/{session_id}/answers")
    def answer(session_id: str, body: AnswerRequest):
        result, difficulty = service.answer(session_id, body.question_id, body.choice)
        return grade_body(result, difficulty)

    @app.get("/api/sessions/{session_id}/stats")
    def stats(session_id: str):
        return service.stats(session_id)

    @app.get("/api/audio/snippets/{question_id}.wav")
    def snippet(question_id: str):
        return Response(service.snippet_wav(question_id), media_type="audio/wav")

    @app.get("/api/audio/chords/{label}.wav")
    def chord_preview(label: str):
        return Response(service.chord_wav(label), media_type="audio/wav")

    if webapp_dir and Path(webapp_dir).is_dir():
        app.mount("/", StaticFiles(directory=webapp_dir, html=True), name="webapp")

    return app
