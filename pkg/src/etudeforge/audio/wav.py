"""RIFF/WAVE PCM decoding and 16-bit encoding.

Only what upload handling needs: PCM 16- or 24-bit, mono or stereo. Stereo
mixes down by channel averaging. Everything else fails loudly so the error
reaches the user instead of producing garbage analysis.
"""

from __future__ import annotations

import struct

import numpy as np

from .model import AudioBuffer

_PCM = 1
_EXTENSIBLE = 0xFFFE


class AudioDecodeError(ValueError):
    pass


def _chunks(document: bytes):
    offset = 12
    while offset + 8 <= len(document):
        tag, size = struct.unpack_from("<4sI", document, offset)
        body = document[offset + 8 : offset + 8 + size]
        yield tag, body
        offset += 8 + size + (size & 1)  # chunks are word-aligned


def decode_wav(document: bytes) -> AudioBuffer:
    """Decode PCM WAV bytes into a mono buffer scaled to [-1, 1]."""
    if len(document) < 12 or document[:4] != b"RIFF" or document[8:12] != b"WAVE":
        raise AudioDecodeError("truncated or non-WAV header")

    fmt = None
    data = None
    for tag, body in _chunks(document):
        if tag == b"fmt ":
            fmt = body
        elif tag == b"data":
            data = body
    if fmt is None or len(fmt) < 16:
        raise AudioDecodeError("missing or truncated fmt chunk")
    if data is None:
        raise AudioDecodeError("missing data chunk")

    audio_format, channels, sample_rate, _, _, bits = struct.unpack_from(
        "<HHIIHH", fmt
    )
    if audio_format == _EXTENSIBLE and len(fmt) >= 40:
        # first two bytes of the subformat GUID carry the real format code
        audio_format = struct.unpack_from("<H", fmt, 24)[0]
    if audio_format != _PCM:
        raise AudioDecodeError(f"non-PCM codec (format tag {audio_format})")
    if channels not in (1, 2):
        raise AudioDecodeError(f"unsupported channel count {channels}")
    if bits not in (16, 24):
        raise AudioDecodeError(f"unsupported bit depth {bits}")
    if sample_rate <= 0:
        raise AudioDecodeError(f"bad sample rate {sample_rate}")
    if len(data) == 0:
        raise AudioDecodeError("zero-length data chunk")

    bytes_per_sample = bits // 8
    frame_bytes = bytes_per_sample * channels
    usable = len(data) - len(data) % frame_bytes
    if usable == 0:
        raise AudioDecodeError("data chunk shorter than one sample frame")
    data = data[:usable]

    if bits == 16:
        samples = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    else:
        raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3)
        as_int = (
            raw[:, 0].astype(np.int32)
            | (raw[:, 1].astype(np.int32) << 8)
            | (raw[:, 2].astype(np.int32) << 16)
        )
        as_int = np.where(as_int >= 1 << 23, as_int - (1 << 24), as_int)
        samples = as_int.astype(np.float64) / float(1 << 23)

    if channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)
    return AudioBuffer(sample_rate=sample_rate, samples=samples)


def encode_wav16(buffer: AudioBuffer) -> bytes:
    """Encode a buffer as 16-bit PCM mono WAV bytes."""
    clipped = np.clip(buffer.samples, -1.0, 1.0)
    pcm = (clipped * 32767.0).astype("<i2").tobytes()
    sr = buffer.sample_rate
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, _PCM, 1, sr, sr * 2, 2, 16,
        b"data", len(pcm),
    )
    return header + pcm
