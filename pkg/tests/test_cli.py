import json
import os
import stat
from pathlib import Path

from click.testing import CliRunner

from etudeforge.gateway.cli import main
from etudeforge.musicxml import parse_musicxml

from audio_helpers import mulaw_wav, quiz_track_wav

FIXTURES = Path(__file__).parent / "fixtures"


class TestAnalyze:
    def test_valid_wav(self, tmp_path):
        wav = tmp_path / "song.wav"
        wav.write_bytes(quiz_track_wav())
        out = tmp_path / "analysis.json"
        result = CliRunner().invoke(main, ["analyze", str(wav), "--out", str(out)])
        assert result.exit_code == 0, result.output
        body = json.loads(out.read_text())
        assert body["segments"][0]["start_s"] == 0.0
        assert body["segments"][-1]["end_s"] == body["duration_s"]
        for prev, nxt in zip(body["segments"], body["segments"][1:]):
            assert prev["end_s"] == nxt["start_s"]
        assert body["beats"] == sorted(body["beats"])

    def test_missing_file_exit_2(self, tmp_path):
        result = CliRunner().invoke(
            main, ["analyze", str(tmp_path / "nope.wav"), "--out", "x.json"]
        )
        assert result.exit_code == 2

    def test_non_pcm_exit_3(self, tmp_path):
        wav = tmp_path / "mulaw.wav"
        wav.write_bytes(mulaw_wav())
        result = CliRunner().invoke(
            main, ["analyze", str(wav), "--out", str(tmp_path / "x.json")]
        )
        assert result.exit_code == 3
        assert "codec" in result.output or "decode" in result.output


class TestSimplify:
    def test_simplifies_fixture(self, tmp_path):
        out = tmp_path / "simple.musicxml"
        result = CliRunner().invoke(
            main,
            ["simplify", str(FIXTURES / "comptine_excerpt.musicxml"),
             "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        report = parse_musicxml(out.read_bytes())
        assert len(report.score.parts[0].measures) == 5

    def test_malformed_xml_exit_4(self, tmp_path):
        bad = tmp_path / "bad.musicxml"
        bad.write_bytes(b"<score-partwise><oops")
        result = CliRunner().invoke(
            main, ["simplify", str(bad), "--out", str(tmp_path / "o.musicxml")]
        )
        assert result.exit_code == 4


class TestMethodbook:
    def test_builds_bundle(self, tmp_path):
        out_dir = tmp_path / "bundle"
        result = CliRunner().invoke(
            main,
            ["methodbook", str(FIXTURES / "comptine_excerpt.musicxml"),
             "--out", str(out_dir)],
        )
        assert result.exit_code == 0, result.output
        names = sorted(p.name for p in out_dir.iterdir())
        assert names == [
            "exercise-lh.musicxml", "exercise-rhythm.musicxml",
            "exercise-scale.musicxml", "manifest.json", "simplified.musicxml",
        ]
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["chords"] == ["E:min", "C:maj", "G:maj", "D:maj", "E:min"]
        for name in names:
            if name.endswith(".musicxml"):
                parse_musicxml((out_dir / name).read_bytes())

    def test_malformed_xml_exit_4(self, tmp_path):
        bad = tmp_path / "bad.musicxml"
        bad.write_bytes(b"not xml at all")
        result = CliRunner().invoke(
            main, ["methodbook", str(bad), "--out", str(tmp_path / "bundle")]
        )
        assert result.exit_code == 4

    def test_unwritable_output_exit_5(self, tmp_path):
        blocker = tmp_path / "occupied"
        blocker.write_text("a file, not a directory")
        result = CliRunner().invoke(
            main,
            ["methodbook", str(FIXTURES / "comptine_excerpt.musicxml"),
             "--out", str(blocker / "bundle")],
        )
        assert result.exit_code == 5

    def test_unwritable_output_permissions_exit_5(self, tmp_path):
        if os.geteuid() == 0:
            import pytest

            pytest.skip("permission bits do not bind as root")
        locked = tmp_path / "locked"
        locked.mkdir()
        locked.chmod(stat.S_IRUSR | stat.S_IXUSR)
        result = CliRunner().invoke(
            main,
            ["methodbook", str(FIXTURES / "comptine_excerpt.musicxml"),
             "--out", str(locked / "bundle")],
        )
        assert result.exit_code == 5
