"""Seeded synthetic clip generation.

Ground-truth generator used throughout the test suites and the end-to-end
experiment: broadband noise bursts with known onsets, durations, band and
SNR, embedded in white noise. SNR is defined in-band: burst RMS within the
band exceeds the white floor's in-band RMS by ``snr_db``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .audio import EPOCH_UTC, AudioClip
from .errors import InfeasiblePackingError

NOISE_FLOOR_RMS = 0.01  # -40 dBFS white floor leaves headroom for +30 dB bursts


@dataclass
class SynthesisSpec:
    """Regular pulse-train recipe; defaults sit inside the song envelope
    (40-60 ms pulses, 100-1400 Hz band)."""

    n_pulses: int = 30
    pulse_duration_s: float = 0.05
    inter_onset_interval_s: float = 0.3
    band_lo_hz: float = 200.0
    band_hi_hz: float = 1200.0
    snr_db: float = 20.0
    noise_seed: int = 0


def bandlimited_noise(rng: np.random.Generator, n: int, fs: int, lo_hz: float, hi_hz: float) -> np.ndarray:
    """Unit-RMS noise with spectral support limited to [lo, hi] Hz."""
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, 1.0 / fs)
    spec[(freqs < lo_hz) | (freqs > hi_hz)] = 0.0
    shaped = np.fft.irfft(spec, n)
    rms = np.sqrt(np.mean(shaped**2))
    return shaped / rms if rms > 0 else shaped


def _burst_envelope(n: int) -> np.ndarray:
    # raised-cosine ramps over the outer 20% to avoid onset clicks
    ramp = max(1, int(round(0.1 * n)))
    env = np.ones(n)
    up = 0.5 * (1.0 - np.cos(np.pi * np.arange(ramp) / ramp))
    env[:ramp] = up
    env[n - ramp:] = up[::-1]
    return env


def synthesize_bursts(
    onsets_s: list[float],
    durations_s: list[float],
    band_lo_hz: float,
    band_hi_hz: float,
    snr_db: float,
    noise_seed: int,
    duration_s: float,
    sample_rate_hz: int,
    start_utc: datetime = EPOCH_UTC,
    source_id: str = "synth",
) -> AudioClip:
    """White-noise clip with band-limited bursts at the given onsets.

    Reproducible: the same arguments always yield bit-identical samples.
    """
    fs = sample_rate_hz
    n_total = int(round(duration_s * fs))
    rng = np.random.default_rng(noise_seed)
    samples = rng.standard_normal(n_total) * NOISE_FLOOR_RMS

    # white floor's RMS inside the burst band; bursts are scaled against it
    band_frac = (band_hi_hz - band_lo_hz) / (fs / 2.0)
    inband_noise_rms = NOISE_FLOOR_RMS * math.sqrt(band_frac)
    burst_rms = 0.0 if snr_db == -math.inf else inband_noise_rms * 10.0 ** (snr_db / 20.0)

    for onset, dur in zip(onsets_s, durations_s):
        i0 = int(round(onset * fs))
        n = int(round(dur * fs))
        if i0 < 0 or i0 + n > n_total:
            raise InfeasiblePackingError(
                f"burst at {onset:.3f}s/{dur:.3f}s falls outside the {duration_s:.3f}s clip"
            )
        if burst_rms == 0.0 or n == 0:
            continue
        burst = bandlimited_noise(rng, n, fs, band_lo_hz, band_hi_hz)
        samples[i0 : i0 + n] += burst * _burst_envelope(n) * burst_rms

    return AudioClip(
        samples=samples,
        sample_rate_hz=fs,
        start_utc=start_utc,
        source_id=source_id,
    )


def synthesize_pulse_train(
    spec: SynthesisSpec,
    duration_s: float,
    sample_rate_hz: int,
    start_utc: datetime = EPOCH_UTC,
    source_id: str = "synth",
) -> AudioClip:
    """Clip containing one regular pulse train, centered in time."""
    span = (spec.n_pulses - 1) * spec.inter_onset_interval_s + spec.pulse_duration_s
    if spec.n_pulses * spec.inter_onset_interval_s > duration_s or span > duration_s:
        raise InfeasiblePackingError(
            f"{spec.n_pulses} pulses every {spec.inter_onset_interval_s}s do not fit in {duration_s}s"
        )
    t0 = (duration_s - span) / 2.0
    onsets = [t0 + k * spec.inter_onset_interval_s for k in range(spec.n_pulses)]
    durations = [spec.pulse_duration_s] * spec.n_pulses
    return synthesize_bursts(
        onsets,
        durations,
        spec.band_lo_hz,
        spec.band_hi_hz,
        spec.snr_db,
        spec.noise_seed,
        duration_s,
        sample_rate_hz,
        start_utc=start_utc,
        source_id=source_id,
    )


def planted_train_span(spec: SynthesisSpec, duration_s: float) -> tuple[float, float]:
    """Ground-truth [start, end] of the train placed by synthesize_pulse_train."""
    span = (spec.n_pulses - 1) * spec.inter_onset_interval_s + spec.pulse_duration_s
    t0 = (duration_s - span) / 2.0
    return t0, t0 + span
