"""Audio ingestion: WAV loading, full-scale normalization, timestamp parsing.

Clips are mono float64 arrays scaled to [-1, 1] full scale. Absolute start
times come from the common long-deployment archive convention of embedding
``YYYYMMDD_HHMMSS`` in the filename; files without one get epoch zero and a
warning flag so downstream diel placement can skip them.
"""

from __future__ import annotations

import io
import os
import re
import wave
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from scipy.io import wavfile

from .errors import AudioReadError, EmptyAudioError, EmptySpanError, UnsupportedAudioError

EPOCH_UTC = datetime(1970, 1, 1, tzinfo=timezone.utc)

_TIMESTAMP_RE = re.compile(r"(\d{8})_(\d{6})")


@dataclass
class AudioClip:
    """Mono waveform with sample rate and absolute-time provenance."""

    samples: np.ndarray
    sample_rate_hz: int
    start_utc: datetime = EPOCH_UTC
    source_id: str = ""
    timestamp_warning: bool = field(default=False, compare=False)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    def span_samples(self, t0_s: float, t1_s: float) -> np.ndarray:
        """Samples covering [t0, t1); raises EmptySpanError on a degenerate span."""
        i0 = max(0, int(np.floor(t0_s * self.sample_rate_hz)))
        i1 = min(len(self.samples), int(np.ceil(t1_s * self.sample_rate_hz)))
        if i1 <= i0:
            raise EmptySpanError(f"span [{t0_s}, {t1_s}] s holds no samples")
        return self.samples[i0:i1]


def parse_filename_timestamp(name: str) -> datetime | None:
    """Extract a YYYYMMDD_HHMMSS stamp from a filename, if one is present and valid."""
    for m in _TIMESTAMP_RE.finditer(name):
        try:
            stamp = datetime.strptime(m.group(1) + m.group(2), "%Y%m%d%H%M%S")
        except ValueError:
            continue
        return stamp.replace(tzinfo=timezone.utc)
    return None


def load_audio(path: str | os.PathLike) -> AudioClip:
    """Load a linear-PCM WAV file as a normalized mono clip.

    Accepts 16-bit integer and 32/64-bit float encodings; multichannel files
    contribute only their first channel. Yields samples in [-1, 1].
    """
    try:
        rate, data = wavfile.read(os.fspath(path))
    except FileNotFoundError as e:
        raise AudioReadError(f"cannot read {path}: {e}") from e
    except ValueError as e:
        # wavfile raises ValueError both for non-WAV garbage and for WAV
        # encodings it knows but cannot decode; either way the file is
        # unusable, but report compressed encodings as unsupported.
        msg = str(e).lower()
        if "unknown wave file format" in msg or "unsupported" in msg:
            raise UnsupportedAudioError(f"{path}: {e}") from e
        raise AudioReadError(f"cannot parse {path}: {e}") from e
    except OSError as e:
        raise AudioReadError(f"cannot read {path}: {e}") from e

    if data.ndim > 1:
        data = data[:, 0]
    if data.size == 0:
        raise EmptyAudioError(f"{path}: empty audio")

    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise UnsupportedAudioError(
            f"{path}: unsupported sample encoding {data.dtype}; need 16-bit PCM or float"
        )

    name = os.path.basename(os.fspath(path))
    stamp = parse_filename_timestamp(name)
    return AudioClip(
        samples=samples,
        sample_rate_hz=int(rate),
        start_utc=stamp if stamp is not None else EPOCH_UTC,
        source_id=os.path.splitext(name)[0],
        timestamp_warning=stamp is None,
    )


def save_wav(path: str | os.PathLike, samples: np.ndarray, sample_rate_hz: int) -> None:
    """Write a mono 16-bit PCM WAV (clipped to full scale)."""
    scaled = np.clip(samples, -1.0, 1.0)
    pcm = np.round(scaled * 32767.0).astype(np.int16)
    wavfile.write(os.fspath(path), sample_rate_hz, pcm)


def wav_bytes(samples: np.ndarray, sample_rate_hz: int) -> bytes:
    """Render a mono 16-bit PCM WAV in memory (for HTTP responses)."""
    pcm = np.round(np.clip(samples, -1.0, 1.0) * 32767.0).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sample_rate_hz)
        w.writeframes(pcm.tobytes())
    return buf.getvalue()
