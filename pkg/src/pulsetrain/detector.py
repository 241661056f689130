"""Energy-based pulse detection on the spectrogram.

Pipeline: adaptive binarization of the analysis band, 8-connected component
extraction into pulse candidates, duration gating, then greedy grouping of
pulses into candidate trains by inter-onset gap. Every stage is a pure
function of its inputs, so whole-clip detection is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np
from scipy import ndimage

from .audio import AudioClip
from .errors import NyquistError
from .spectrogram import Spectrogram, StftParams, band_percentiles, compute_spectrogram

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass
class DetectorConfig:
    band_lo_hz: float = 100.0
    band_hi_hz: float = 1400.0
    binarize_pct: float = 85.0
    binarize_offset_db: float = 6.0
    pulse_dur_min_s: float = 0.02
    pulse_dur_max_s: float = 0.10
    max_gap_s: float = 1.5
    min_pulses: int = 5
    train_dur_min_s: float = 10.0
    train_dur_max_s: float = 90.0

    def __post_init__(self):
        if self.band_hi_hz <= self.band_lo_hz:
            raise ValueError("band_hi_hz must exceed band_lo_hz")
        if self.pulse_dur_max_s <= self.pulse_dur_min_s:
            raise ValueError("pulse duration gate inverted")
        if self.train_dur_max_s <= self.train_dur_min_s:
            raise ValueError("train duration gate inverted")
        if self.min_pulses < 2:
            raise ValueError("min_pulses must be >= 2")


@dataclass
class BinaryMask:
    cells: np.ndarray  # bool, aligned to the source spectrogram
    threshold_db_used: float


@dataclass
class Pulse:
    t_start_s: float
    t_end_s: float
    f_lo_hz: float
    f_hi_hz: float
    peak_db: float
    cell_count: int

    @property
    def duration_s(self) -> float:
        return self.t_end_s - self.t_start_s

    @property
    def bandwidth_hz(self) -> float:
        return self.f_hi_hz - self.f_lo_hz


@dataclass
class PulseTrainEvent:
    event_id: str
    pulses: list[Pulse]
    t_start_s: float
    t_end_s: float
    start_utc: datetime
    source_id: str

    @property
    def duration_s(self) -> float:
        return self.t_end_s - self.t_start_s


def binarize(spec: Spectrogram, cfg: DetectorConfig) -> BinaryMask:
    """Threshold the analysis band at its noise percentile plus a margin.

    A cell is true iff it strictly exceeds P(binarize_pct over band cells)
    + binarize_offset_db and its bin lies inside the band; raising the
    offset can only turn cells off.
    """
    band = (cfg.band_lo_hz, cfg.band_hi_hz)
    (pct_level,) = band_percentiles(spec, band, [cfg.binarize_pct])
    threshold = pct_level + cfg.binarize_offset_db

    cells = np.zeros(spec.cells_db.shape, dtype=bool)
    bins = spec.band_bins(*band)
    cells[:, bins] = spec.cells_db[:, bins] > threshold
    return BinaryMask(cells=cells, threshold_db_used=threshold)


def extract_pulses(mask: BinaryMask, spec: Spectrogram, cfg: DetectorConfig) -> list[Pulse]:
    """8-connected components of the mask, gated by pulse duration.

    Component time extent is measured in frame slots (hop-width each);
    frequency extent in bin cells (center +/- half a bin), so even a
    single-cell component gets a positive bandwidth.
    """
    labels, n = ndimage.label(mask.cells, structure=EIGHT_CONNECTED)
    if n == 0:
        return []

    hop_s = spec.hop_s
    half_bin = spec.bin_width_hz / 2.0
    pulses = []
    # find_objects yields the bounding slice of label i+1 at index i
    for lab, (sl_frames, sl_bins) in enumerate(ndimage.find_objects(labels), start=1):
        f0, f1 = sl_frames.start, sl_frames.stop - 1
        duration = (f1 - f0 + 1) * hop_s
        if not cfg.pulse_dur_min_s <= duration <= cfg.pulse_dur_max_s:
            continue
        comp = labels[sl_frames, sl_bins] == lab
        pulses.append(
            Pulse(
                t_start_s=f0 * hop_s,
                t_end_s=(f1 + 1) * hop_s,
                f_lo_hz=float(spec.bin_freqs_hz[sl_bins.start] - half_bin),
                f_hi_hz=float(spec.bin_freqs_hz[sl_bins.stop - 1] + half_bin),
                peak_db=float(spec.cells_db[sl_frames, sl_bins][comp].max()),
                cell_count=int(comp.sum()),
            )
        )
    pulses.sort(key=lambda p: (p.t_start_s, p.f_lo_hz))
    return pulses


def coalesce_pulses(pulses: list[Pulse], cfg: DetectorConfig) -> list[Pulse]:
    """Merge pulse candidates that overlap in time, re-applying the duration gate.

    One broadband pulse often splits into several components across bins
    (spectral nulls punch holes in the mask); events must hold pulses that
    are non-overlapping in time, so time-overlapping fragments are unioned.
    """
    merged: list[Pulse] = []
    for p in sorted(pulses, key=lambda p: (p.t_start_s, p.f_lo_hz)):
        if merged and p.t_start_s < merged[-1].t_end_s:
            q = merged[-1]
            merged[-1] = Pulse(
                t_start_s=q.t_start_s,
                t_end_s=max(q.t_end_s, p.t_end_s),
                f_lo_hz=min(q.f_lo_hz, p.f_lo_hz),
                f_hi_hz=max(q.f_hi_hz, p.f_hi_hz),
                peak_db=max(q.peak_db, p.peak_db),
                cell_count=q.cell_count + p.cell_count,
            )
        else:
            merged.append(p)
    return [p for p in merged if cfg.pulse_dur_min_s <= p.duration_s <= cfg.pulse_dur_max_s]


def group_pulse_trains(
    pulses: list[Pulse],
    cfg: DetectorConfig,
    start_utc: datetime,
    source_id: str,
) -> list[PulseTrainEvent]:
    """Greedy left-to-right grouping by inter-onset gap, then size/duration gates.

    Candidates are first coalesced so each event's pulse list is
    non-overlapping in time.
    """
    pulses = coalesce_pulses(pulses, cfg)
    groups: list[list[Pulse]] = []
    for p in pulses:
        if groups and p.t_start_s - groups[-1][-1].t_start_s <= cfg.max_gap_s:
            groups[-1].append(p)
        else:
            groups.append([p])

    events = []
    for grp in groups:
        if len(grp) < cfg.min_pulses:
            continue
        t0 = grp[0].t_start_s
        t1 = grp[-1].t_end_s
        if not cfg.train_dur_min_s <= t1 - t0 <= cfg.train_dur_max_s:
            continue
        events.append(
            PulseTrainEvent(
                event_id=f"{source_id}_{int(round(t0 * 1000)):09d}",
                pulses=grp,
                t_start_s=t0,
                t_end_s=t1,
                start_utc=start_utc + timedelta(seconds=t0),
                source_id=source_id,
            )
        )
    return events


def detect_events(
    clip: AudioClip,
    stft: StftParams | None = None,
    cfg: DetectorConfig | None = None,
) -> list[PulseTrainEvent]:
    """Full detection chain: spectrogram -> binarize -> pulses -> trains."""
    cfg = cfg or DetectorConfig()
    if clip.sample_rate_hz < 2 * cfg.band_hi_hz:
        raise NyquistError(
            f"sample rate {clip.sample_rate_hz} Hz cannot represent the "
            f"analysis band up to {cfg.band_hi_hz} Hz"
        )
    spec = compute_spectrogram(clip, stft)
    mask = binarize(spec, cfg)
    pulses = extract_pulses(mask, spec, cfg)
    return group_pulse_trains(pulses, cfg, clip.start_utc, clip.source_id)
