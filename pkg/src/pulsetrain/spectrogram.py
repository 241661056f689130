"""STFT spectrogram computation and band-level percentile statistics.

The dB scale is full-scale amplitude (dBFS): magnitudes are normalized by
the window's coherent gain so a full-scale sine reads near 0 dB at its bin,
then clamped below at ``floor_db``. Frame f covers samples
[f*hop, f*hop + window); frame count is floor((N - window)/hop) + 1.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .audio import AudioClip
from .errors import ClipTooShortError, EmptyBandError

WINDOW_KINDS = ("hann", "rect")


@dataclass
class StftParams:
    window_len_samples: int = 256
    hop_samples: int = 128
    window_kind: str = "hann"
    floor_db: float = -120.0

    def __post_init__(self):
        if self.window_len_samples < 2:
            raise ValueError("window_len_samples must be >= 2")
        if not 1 <= self.hop_samples <= self.window_len_samples:
            raise ValueError("hop_samples must be in [1, window_len_samples]")
        if self.window_kind not in WINDOW_KINDS:
            raise ValueError(f"window_kind must be one of {WINDOW_KINDS}")

    def taper(self) -> np.ndarray:
        if self.window_kind == "hann":
            return np.hanning(self.window_len_samples)
        return np.ones(self.window_len_samples)


@dataclass
class Spectrogram:
    """Log-magnitude time-frequency matrix with axis metadata."""

    cells_db: np.ndarray          # [frames x bins]
    frame_times_s: np.ndarray     # frame centers
    bin_freqs_hz: np.ndarray      # bin centers, strictly increasing
    params: StftParams
    sample_rate_hz: int = 0

    @property
    def n_frames(self) -> int:
        return self.cells_db.shape[0]

    @property
    def n_bins(self) -> int:
        return self.cells_db.shape[1]

    @property
    def hop_s(self) -> float:
        return self.params.hop_samples / self.sample_rate_hz

    @property
    def bin_width_hz(self) -> float:
        return self.bin_freqs_hz[1] - self.bin_freqs_hz[0]

    def band_bins(self, lo_hz: float, hi_hz: float) -> np.ndarray:
        """Indices of bins whose center frequency lies in [lo, hi]."""
        idx = np.nonzero((self.bin_freqs_hz >= lo_hz) & (self.bin_freqs_hz <= hi_hz))[0]
        if idx.size == 0:
            raise EmptyBandError(f"band [{lo_hz}, {hi_hz}] Hz covers no bins")
        return idx

    def frames_in_span(self, t0_s: float, t1_s: float) -> np.ndarray:
        """Indices of frames whose center time lies in [t0, t1]."""
        return np.nonzero((self.frame_times_s >= t0_s) & (self.frame_times_s <= t1_s))[0]


def compute_spectrogram(clip: AudioClip, params: StftParams | None = None) -> Spectrogram:
    """STFT log-magnitude spectrogram of a clip.

    Deterministic for identical inputs; raises ClipTooShortError when the
    clip cannot fill one analysis window.
    """
    params = params or StftParams()
    x = np.asarray(clip.samples, dtype=np.float64)
    win = params.window_len_samples
    hop = params.hop_samples
    if len(x) < win:
        raise ClipTooShortError(f"clip of {len(x)} samples shorter than window {win}")

    n_frames = (len(x) - win) // hop + 1
    taper = params.taper()
    # gain normalization: full-scale sine at a bin center -> ~0 dB
    gain = 2.0 / taper.sum()

    starts = np.arange(n_frames) * hop
    frames = np.lib.stride_tricks.sliding_window_view(x, win)[starts]
    mags = np.abs(np.fft.rfft(frames * taper, axis=1)) * gain

    with np.errstate(divide="ignore"):
        cells = 20.0 * np.log10(mags)
    cells = np.maximum(cells, params.floor_db)

    fs = clip.sample_rate_hz
    frame_times = (starts + win / 2.0) / fs
    bin_freqs = np.arange(win // 2 + 1) * (fs / win)
    return Spectrogram(
        cells_db=cells,
        frame_times_s=frame_times,
        bin_freqs_hz=bin_freqs,
        params=params,
        sample_rate_hz=fs,
    )


def band_percentiles(
    spec: Spectrogram, band: tuple[float, float], pcts: list[float]
) -> list[float]:
    """Nearest-rank percentiles of all cell dB levels inside a frequency band.

    Nearest rank = ceil(p/100 * n), clamped to [1, n]; exact on small
    matrices, no interpolation.
    """
    bins = spec.band_bins(*band)
    cells = np.sort(spec.cells_db[:, bins].ravel())
    out = []
    for p in pcts:
        if not 0.0 <= p <= 100.0:
            raise ValueError(f"percentile {p} outside [0, 100]")
        rank = max(1, math.ceil(p / 100.0 * cells.size))
        out.append(float(cells[rank - 1]))
    return out


def write_spectrogram_text(spec: Spectrogram, path: str | os.PathLike) -> None:
    """Export as plain text: header lines, then one whitespace row per frame."""
    with open(path, "w") as f:
        f.write(f"#fs {spec.sample_rate_hz}\n")
        f.write(f"#hop {spec.params.hop_samples}\n")
        f.write(f"#nfft {spec.params.window_len_samples}\n")
        f.write(f"#floor_db {spec.params.floor_db!r}\n")
        for row in spec.cells_db:
            f.write(" ".join(repr(v) for v in row.tolist()) + "\n")


def read_spectrogram_text(path: str | os.PathLike) -> Spectrogram:
    """Inverse of write_spectrogram_text (round-trips cells exactly)."""
    header: dict[str, str] = {}
    rows = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].partition(" ")
                header[key] = val
            else:
                rows.append([float(tok) for tok in line.split()])
    fs = int(header["fs"])
    params = StftParams(
        window_len_samples=int(header["nfft"]),
        hop_samples=int(header["hop"]),
        floor_db=float(header.get("floor_db", -120.0)),
    )
    cells = np.array(rows, dtype=np.float64)
    win, hop = params.window_len_samples, params.hop_samples
    starts = np.arange(cells.shape[0]) * hop
    return Spectrogram(
        cells_db=cells,
        frame_times_s=(starts + win / 2.0) / fs,
        bin_freqs_hz=np.arange(win // 2 + 1) * (fs / win),
        params=params,
        sample_rate_hz=fs,
    )
