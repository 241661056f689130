"""Per-event feature vector computation and input standardization.

Each detected train yields 18 features, F1..F18:

  F1   event duration (s)
  F2   minimum frequency over pulses (Hz)
  F3   maximum frequency over pulses (Hz)
  F4   pulse count
  F5   mean pulse bandwidth (Hz)
  F6   center frequency, (F2 + F3) / 2 (Hz)
  F7   equivalent continuous level over the event span (dBFS)
  F8   mean pulse duration (s)
  F9   maximum pulse duration (s)
  F10  minimum pulse duration (s)
  F11  mean inter-pulse onset interval (s)
  F12  modal inter-pulse onset interval (s), 10 ms histogram bins
  F13  maximum inter-pulse onset interval (s)
  F14  minimum inter-pulse onset interval (s)
  F15  SNR re 5th percentile of band level in a 60 s context window (dB)
  F16  SNR re 10th percentile (dB)
  F17  SNR re 20th percentile (dB)
  F18  SNR re 25th percentile (dB)

The modal interval is the mean of the samples falling in the most populated
10 ms bin (ties broken toward the smaller bin), so single-interval events
collapse to F11 = F12 = F13 = F14 exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audio import AudioClip
from .detector import DetectorConfig, PulseTrainEvent
from .spectrogram import Spectrogram, band_percentiles

N_FEATURES = 18
FEATURE_NAMES = tuple(f"F{i}" for i in range(1, N_FEATURES + 1))
SNR_PERCENTILES = (5.0, 10.0, 20.0, 25.0)

LEQ_FLOOR_DB = -120.0
SIGMA_FLOOR = 1e-12


@dataclass
class FeatureVector:
    values: np.ndarray  # shape (18,), finite
    event_id: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (N_FEATURES,):
            raise ValueError(f"feature vector must have {N_FEATURES} entries")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature vector contains non-finite values")


@dataclass
class StandardizerStats:
    mean: np.ndarray
    std: np.ndarray  # floored at SIGMA_FLOOR


def compute_leq(clip: AudioClip, t0_s: float, t1_s: float) -> float:
    """10*log10(mean squared sample) over [t0, t1), clamped at -120 dBFS."""
    span = clip.span_samples(t0_s, t1_s)
    mean_sq = float(np.mean(span**2))
    if mean_sq <= 0.0:
        return LEQ_FLOOR_DB
    return max(LEQ_FLOOR_DB, 10.0 * math.log10(mean_sq))


def interval_mode(intervals: np.ndarray, bin_s: float = 0.01) -> float:
    """Mean of the samples in the most populated histogram bin.

    Ties break toward the smaller bin; continuous data has no exact mode,
    so the modal bin's members stand in for it.
    """
    bins = np.floor(intervals / bin_s).astype(np.int64)
    counts: dict[int, int] = {}
    for b in bins.tolist():
        counts[b] = counts.get(b, 0) + 1
    best = min(counts, key=lambda b: (-counts[b], b))
    return float(intervals[bins == best].mean())


def extract_features(
    event: PulseTrainEvent,
    spec: Spectrogram,
    clip: AudioClip,
    cfg: DetectorConfig,
    snr_window_s: float = 60.0,
    mode_bin_s: float = 0.01,
) -> FeatureVector:
    """The 18-feature vector for one detected event.

    Pure function of its inputs; the SNR context window is centered on the
    event and clipped at the clip edges.
    """
    pulses = event.pulses
    if not pulses:
        raise ValueError(f"event {event.event_id} has no pulses")

    durations = np.array([p.duration_s for p in pulses])
    bandwidths = np.array([p.bandwidth_hz for p in pulses])
    onsets = np.array([p.t_start_s for p in pulses])

    f_lo = min(p.f_lo_hz for p in pulses)
    f_hi = max(p.f_hi_hz for p in pulses)
    leq = compute_leq(clip, event.t_start_s, event.t_end_s)

    if len(pulses) >= 2:
        intervals = np.diff(onsets)
        ioi_mean = float(intervals.mean())
        ioi_mode = interval_mode(intervals, mode_bin_s)
        ioi_max = float(intervals.max())
        ioi_min = float(intervals.min())
    else:
        # degenerate single-pulse trains are excluded upstream (min_pulses);
        # keep the vector finite if one is handed in anyway
        ioi_mean = ioi_mode = ioi_max = ioi_min = 0.0

    mid = (event.t_start_s + event.t_end_s) / 2.0
    w0 = max(0.0, mid - snr_window_s / 2.0)
    w1 = min(clip.duration_s, mid + snr_window_s / 2.0)
    noise_levels = _windowed_band_percentiles(spec, (cfg.band_lo_hz, cfg.band_hi_hz), (w0, w1))
    snrs = [leq - lvl for lvl in noise_levels]

    values = np.array(
        [
            event.duration_s,            # F1
            f_lo,                        # F2
            f_hi,                        # F3
            float(len(pulses)),          # F4
            float(bandwidths.mean()),    # F5
            (f_lo + f_hi) / 2.0,         # F6
            leq,                         # F7
            float(durations.mean()),     # F8
            float(durations.max()),      # F9
            float(durations.min()),      # F10
            ioi_mean,                    # F11
            ioi_mode,                    # F12
            ioi_max,                     # F13
            ioi_min,                     # F14
            snrs[0],                     # F15
            snrs[1],                     # F16
            snrs[2],                     # F17
            snrs[3],                     # F18
        ]
    )
    return FeatureVector(values=values, event_id=event.event_id)


def _windowed_band_percentiles(spec, band, span) -> list[float]:
    frames = spec.frames_in_span(*span)
    if frames.size == 0:
        frames = np.arange(spec.n_frames)
    sub = Spectrogram(
        cells_db=spec.cells_db[frames],
        frame_times_s=spec.frame_times_s[frames],
        bin_freqs_hz=spec.bin_freqs_hz,
        params=spec.params,
        sample_rate_hz=spec.sample_rate_hz,
    )
    return band_percentiles(sub, band, list(SNR_PERCENTILES))


def fit_standardizer(vectors: list[FeatureVector]) -> StandardizerStats:
    """Per-feature mean and population standard deviation, sigma floored."""
    if not vectors:
        raise ValueError("cannot fit a standardizer on an empty set")
    mat = np.stack([fv.values for fv in vectors])
    mean = mat.mean(axis=0)
    std = np.maximum(mat.std(axis=0), SIGMA_FLOOR)
    return StandardizerStats(mean=mean, std=std)


def standardize(fv: FeatureVector, stats: StandardizerStats) -> FeatureVector:
    if stats.mean.shape != (N_FEATURES,):
        raise ValueError("standardizer was not fitted on 18 features")
    z = (fv.values - stats.mean) / stats.std
    return FeatureVector(values=z, event_id=fv.event_id)


def unstandardize(fv: FeatureVector, stats: StandardizerStats) -> FeatureVector:
    return FeatureVector(values=fv.values * stats.std + stats.mean, event_id=fv.event_id)
