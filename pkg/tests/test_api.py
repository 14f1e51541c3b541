import io
import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from etudeforge.gateway.api import create_app
from etudeforge.gateway.service import GatewayService
from etudeforge.gateway.store import DataStore

from audio_helpers import mulaw_wav, quiz_track_wav

READY_TIMEOUT_S = 60.0


@pytest.fixture()
def data_dir(tmp_path):
    return tmp_path / "data"


@pytest.fixture()
def service(data_dir):
    svc = GatewayService(DataStore(data_dir))
    yield svc
    svc.close()


@pytest.fixture()
def client(service):
    app = create_app(service)
    with TestClient(app) as c:
        yield c


def upload(client, wav_bytes=None, title="Test song"):
    wav_bytes = wav_bytes if wav_bytes is not None else quiz_track_wav()
    response = client.post(
        "/api/tracks",
        files={"file": ("song.wav", io.BytesIO(wav_bytes), "audio/wav")},
        data={"title": title},
    )
    assert response.status_code == 202, response.text
    return response.json()["id"]


def wait_ready(client, track_id, timeout=READY_TIMEOUT_S):
    deadline = time.time() + timeout
    while time.time() < deadline:
        body = client.get(f"/api/tracks/{track_id}").json()
        if body["status"] in ("ready", "failed"):
            return body
        time.sleep(0.05)
    raise AssertionError(f"track {track_id} never finished analysis")


def start_session(client, track_ids, difficulty="L1", seed=7):
    response = client.post(
        "/api/sessions",
        json={"track_ids": track_ids, "difficulty": difficulty, "seed": seed},
    )
    assert response.status_code == 201, response.text
    return response.json()["session_id"]


class TestTracks:
    def test_upload_and_poll_to_ready(self, client):
        track_id = upload(client)
        body = client.get(f"/api/tracks/{track_id}").json()
        assert body["status"] in ("pending", "running", "ready")
        body = wait_ready(client, track_id)
        assert body["status"] == "ready"
        assert body["analysis"]["duration_s"] == pytest.approx(4.0, abs=0.01)
        assert body["analysis"]["beat_count"] > 4

    def test_track_listing(self, client):
        a = upload(client, title="First")
        b = upload(client, title="Second")
        listing = client.get("/api/tracks").json()
        ids = {t["id"] for t in listing}
        assert {a, b} <= ids
        titles = {t["id"]: t["title"] for t in listing}
        assert titles[a] == "First" and titles[b] == "Second"
        assert all(set(t) <= {"id", "title", "status", "error"} for t in listing)

    def test_bad_audio_becomes_failed(self, client):
        track_id = upload(client, wav_bytes=mulaw_wav())
        body = wait_ready(client, track_id)
        assert body["status"] == "failed"
        assert "non-PCM" in body["error"]

    def test_unknown_track_404(self, client):
        response = client.get("/api/tracks/missing")
        assert response.status_code == 404
        assert response.json()["code"] == "not_found"

    def test_malformed_upload_400(self, client):
        response = client.post("/api/tracks", data={"title": "no file"})
        assert response.status_code == 400
        assert response.json()["code"] == "bad_request"


class TestSessions:
    def test_session_requires_ready_track(self, client):
        track_id = upload(client)
        response = client.post(
            "/api/sessions", json={"track_ids": ["nonexistent"], "difficulty": "L1"}
        )
        assert response.status_code == 422
        wait_ready(client, track_id)
        assert start_session(client, [track_id])

    def test_full_five_question_round(self, client):
        track_id = upload(client)
        wait_ready(client, track_id)
        session_id = start_session(client, [track_id])

        answered = 0
        for _ in range(5):
            q = client.get(f"/api/sessions/{session_id}/next")
            assert q.status_code == 200, q.text
            question = q.json()
            assert "correct_index" not in json.dumps(question)
            assert len(question["options"]) == 4
            graded = client.post(
                f"/api/sessions/{session_id}/answers",
                json={"question_id": question["id"], "choice": 0},
            )
            assert graded.status_code == 200, graded.text
            body = graded.json()
            assert body["true_label"] in question["options"]
            assert question["options"][body["correct_index"]] == body["true_label"]
            answered += 1

        stats = client.get(f"/api/sessions/{session_id}/stats").json()
        assert stats["answered"] == 5
        correct_total = sum(v["correct"] for v in stats["per_quality"].values())
        answered_total = sum(v["answered"] for v in stats["per_quality"].values())
        assert answered_total == 5
        assert stats["accuracy"] == pytest.approx(correct_total / 5)

    def test_second_next_without_answer_conflicts(self, client):
        track_id = upload(client)
        wait_ready(client, track_id)
        session_id = start_session(client, [track_id])
        first = client.get(f"/api/sessions/{session_id}/next")
        assert first.status_code == 200
        second = client.get(f"/api/sessions/{session_id}/next")
        assert second.status_code == 409
        assert second.json()["code"] == "conflict"

    def test_stale_question_404(self, client):
        track_id = upload(client)
        wait_ready(client, track_id)
        session_id = start_session(client, [track_id])
        response = client.post(
            f"/api/sessions/{session_id}/answers",
            json={"question_id": "qdeadbeef0000", "choice": 0},
        )
        assert response.status_code == 404

    def test_double_answer_conflicts(self, client):
        track_id = upload(client)
        wait_ready(client, track_id)
        session_id = start_session(client, [track_id])
        question = client.get(f"/api/sessions/{session_id}/next").json()
        first = client.post(
            f"/api/sessions/{session_id}/answers",
            json={"question_id": question["id"], "choice": 0},
        )
        assert first.status_code == 200
        again = client.post(
            f"/api/sessions/{session_id}/answers",
            json={"question_id": question["id"], "choice": 1},
        )
        assert again.status_code == 409

    def test_unknown_session_404(self, client):
        assert client.get("/api/sessions/zzz/next").status_code == 404
        assert client.get("/api/sessions/zzz/stats").status_code == 404


class TestAudioEndpoints:
    def test_snippet_wav(self, client):
        track_id = upload(client)
        wait_ready(client, track_id)
        session_id = start_session(client, [track_id])
        question = client.get(f"/api/sessions/{session_id}/next").json()
        response = client.get(question["snippet_url"])
        assert response.status_code == 200
        assert response.headers["content-type"] == "audio/wav"
        assert response.content[:4] == b"RIFF"
        expected_s = question["snippet_end_s"] - question["snippet_start_s"]
        n_samples = (len(response.content) - 44) // 2
        assert n_samples == pytest.approx(expected_s * 44100, rel=0.01)

    def test_chord_preview_wav(self, client):
        response = client.get("/api/audio/chords/C:maj.wav")
        assert response.status_code == 200
        assert response.content[:4] == b"RIFF"

    def test_chord_preview_spectrum_matches_synthesis_contract(self, client):
        import numpy as np

        from etudeforge.audio.wav import decode_wav

        response = client.get("/api/audio/chords/C:maj.wav")
        buf = decode_wav(response.content)
        assert buf.sample_rate == 44100
        spectrum = np.abs(np.fft.rfft(buf.samples))
        freqs = np.fft.rfftfreq(len(buf.samples), d=1.0 / buf.sample_rate)
        for expected in (130.81, 261.63, 329.63, 392.00):
            mask = np.abs(freqs - expected) <= 10.0
            idx = np.nonzero(mask)[0]
            peak = freqs[idx[np.argmax(spectrum[idx])]]
            assert abs(peak - expected) <= 2.0, expected
        assert np.max(np.abs(buf.samples)) == pytest.approx(0.8, abs=0.01)

    def test_chord_preview_sharp_label(self, client):
        response = client.get("/api/audio/chords/F%23:min.wav")
        assert response.status_code == 200

    def test_bad_label_400(self, client):
        response = client.get("/api/audio/chords/H:weird.wav")
        assert response.status_code == 400
        assert response.json()["code"] == "bad_request"

    def test_unknown_snippet_404(self, client):
        assert client.get("/api/audio/snippets/qnope.wav").status_code == 404

    def test_snippet_from_lower_rate_source_resampled_to_44k(self, client):
        from etudeforge.audio.wav import decode_wav

        track_id = upload(client, wav_bytes=quiz_track_wav(sr=22050))
        body = wait_ready(client, track_id)
        assert body["status"] == "ready", body
        session_id = start_session(client, [track_id])
        question = client.get(f"/api/sessions/{session_id}/next").json()
        response = client.get(question["snippet_url"])
        buf = decode_wav(response.content)
        assert buf.sample_rate == 44100
        expected_s = question["snippet_end_s"] - question["snippet_start_s"]
        assert buf.duration_s == pytest.approx(expected_s, rel=0.01)


class TestRestartSafety:
    def test_state_survives_service_restart(self, data_dir):
        service = GatewayService(DataStore(data_dir))
        with TestClient(create_app(service)) as client:
            track_id = upload(client)
            wait_ready(client, track_id)
            session_id = start_session(client, [track_id])
            for _ in range(3):
                q = client.get(f"/api/sessions/{session_id}/next").json()
                client.post(
                    f"/api/sessions/{session_id}/answers",
                    json={"question_id": q["id"], "choice": 1},
                )
            before = client.get(f"/api/sessions/{session_id}/stats").json()
        service.close()

        reloaded = GatewayService(DataStore(data_dir))
        with TestClient(create_app(reloaded)) as client:
            track = client.get(f"/api/tracks/{track_id}").json()
            assert track["status"] == "ready"
            after = client.get(f"/api/sessions/{session_id}/stats").json()
            assert after == before
            q = client.get(f"/api/sessions/{session_id}/next").json()
            graded = client.post(
                f"/api/sessions/{session_id}/answers",
                json={"question_id": q["id"], "choice": 2},
            )
            assert graded.status_code == 200
            final = client.get(f"/api/sessions/{session_id}/stats").json()
            assert final["answered"] == 4
        reloaded.close()


class TestConcurrentSessions:
    def test_sixteen_parallel_sessions_stay_consistent(self, client):
        track_id = upload(client)
        wait_ready(client, track_id)
        session_ids = [
            start_session(client, [track_id], seed=1000 + i) for i in range(16)
        ]
        rounds = 6
        failures = []

        def run_session(session_id):
            try:
                for _ in range(rounds):
                    q = client.get(f"/api/sessions/{session_id}/next")
                    assert q.status_code == 200, q.text
                    question = q.json()
                    graded = client.post(
                        f"/api/sessions/{session_id}/answers",
                        json={"question_id": question["id"], "choice": 0},
                    )
                    assert graded.status_code == 200, graded.text
            except AssertionError as exc:
                failures.append((session_id, str(exc)))

        threads = [
            threading.Thread(target=run_session, args=(sid,)) for sid in session_ids
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert failures == []
        for session_id in session_ids:
            stats = client.get(f"/api/sessions/{session_id}/stats").json()
            assert stats["answered"] == rounds
            assert sum(v["answered"] for v in stats["per_quality"].values()) == rounds
