"""Command-line entry points: analyze, simplify, methodbook, serve."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from ..audio.pipeline import analyze_buffer
from ..audio.wav import AudioDecodeError, decode_wav
from ..exercises import ExerciseError, build_method_book, write_bundle
from ..musicxml import MusicXMLError, parse_musicxml, serialize_musicxml
from ..simplify import SimplifyError, simplify_score

EXIT_MISSING_INPUT = 2
EXIT_DECODE = 3
EXIT_PARSE = 4
EXIT_UNWRITABLE = 5


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_input(path: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        _fail(EXIT_MISSING_INPUT, f"input file not found: {path}")
    return p.read_bytes()


def _write_output(path: Path, data: bytes) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        _fail(EXIT_UNWRITABLE, f"cannot write {path}: {exc}")


@click.group()
def main() -> None:
    """Audio analysis, score simplification, and the quiz service."""


@main.command()
@click.argument("wav_path")
@click.option("--out", "out_path", required=True, help="Analysis JSON destination.")
def analyze(wav_path: str, out_path: str) -> None:
    """Detect beats and chords in WAV_PATH; write analysis JSON."""
    data = _read_input(wav_path)
    try:
        buffer = decode_wav(data)
    except AudioDecodeError as exc:
        _fail(EXIT_DECODE, f"cannot decode {wav_path}: {exc}")
    try:
        analysis = analyze_buffer(buffer)
    except ValueError as exc:
        _fail(1, f"analysis failed: {exc}")
    body = json.dumps(analysis.to_dict(), indent=2, sort_keys=True) + "\n"
    _write_output(Path(out_path), body.encode("utf-8"))
    click.echo(f"wrote {out_path}")


@main.command()
@click.argument("xml_path")
@click.option("--out", "out_path", required=True, help="Simplified MusicXML destination.")
def simplify(xml_path: str, out_path: str) -> None:
    """Simplify a piano score: block-chord left hand, lighter right hand."""
    data = _read_input(xml_path)
    try:
        report_in = parse_musicxml(data)
        result = simplify_score(report_in.score)
    except (MusicXMLError, SimplifyError) as exc:
        _fail(EXIT_PARSE, str(exc))
    _write_output(Path(out_path), serialize_musicxml(result.output))
    summary = {
        "rh_pair_reductions": result.rh_pair_reductions,
        "removed_ornaments": result.removed_ornaments,
        "warnings": result.warnings,
    }
    click.echo(json.dumps(summary))


@main.command()
@click.argument("xml_path")
@click.option("--out", "out_dir", required=True, help="Bundle output directory.")
def methodbook(xml_path: str, out_dir: str) -> None:
    """Build a method-book bundle: simplified score plus targeted drills."""
    data = _read_input(xml_path)
    try:
        report = parse_musicxml(data)
        bundle = build_method_book(report.score)
    except (MusicXMLError, SimplifyError, ExerciseError) as exc:
        _fail(EXIT_PARSE, str(exc))
    try:
        written = write_bundle(bundle, out_dir)
    except OSError as exc:
        _fail(EXIT_UNWRITABLE, f"cannot write bundle to {out_dir}: {exc}")
    for name in written:
        click.echo(f"wrote {Path(out_dir) / name}")


@main.command()
@click.option("--port", default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data-dir",
    default=lambda: os.environ.get("ETUDEFORGE_DATA_DIR", "./data"),
    help="Persistence root [env: ETUDEFORGE_DATA_DIR].",
)
@click.option(
    "--webapp-dir",
    default=lambda: os.environ.get("ETUDEFORGE_WEBAPP_DIR"),
    help="Static webapp bundle to serve at / [env: ETUDEFORGE_WEBAPP_DIR].",
)
@click.option("--workers", default=2, show_default=True,
              help="Background analysis worker threads.")
def serve(port: int, host: str, data_dir: str, webapp_dir, workers: int) -> None:
    """Run the quiz service until terminated."""
    import uvicorn

    from .api import create_app
    from .service import GatewayService
    from .store import DataStore

    if webapp_dir is None:
        default_dist = Path.cwd() / "frontend" / "dist"
        if default_dist.is_dir():
            webapp_dir = str(default_dist)

    store = DataStore(data_dir)
    service = GatewayService(store, max_workers=workers)
    app = create_app(service, webapp_dir=webapp_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        service.close()


if __name__ == "__main__":
    main()
