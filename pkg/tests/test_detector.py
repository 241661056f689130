import math
from datetime import datetime, timezone

import numpy as np
import pytest

from pulsetrain.audio import AudioClip
from pulsetrain.detector import (
    DetectorConfig,
    Pulse,
    binarize,
    coalesce_pulses,
    detect_events,
    extract_pulses,
    group_pulse_trains,
)
from pulsetrain.errors import EmptyBandError, NyquistError
from pulsetrain.spectrogram import Spectrogram, StftParams
from pulsetrain.synth import SynthesisSpec, planted_train_span, synthesize_pulse_train

FS = 8000
STFT = StftParams(256, 128)
T0 = datetime(2009, 4, 1, tzinfo=timezone.utc)


def make_spec(cells):
    cells = np.asarray(cells, dtype=np.float64)
    n_frames, n_bins = cells.shape
    assert n_bins == 129
    starts = np.arange(n_frames) * STFT.hop_samples
    return Spectrogram(
        cells_db=cells,
        frame_times_s=(starts + STFT.window_len_samples / 2) / FS,
        bin_freqs_hz=np.arange(n_bins) * (FS / 256),
        params=STFT,
        sample_rate_hz=FS,
    )


def wide_cfg(**kw):
    base = dict(
        band_lo_hz=100.0,
        band_hi_hz=1400.0,
        binarize_pct=85.0,
        binarize_offset_db=6.0,
        pulse_dur_min_s=0.02,
        pulse_dur_max_s=0.10,
        max_gap_s=1.5,
        min_pulses=5,
        train_dur_min_s=1.0,
        train_dur_max_s=90.0,
    )
    base.update(kw)
    return DetectorConfig(**base)


def make_pulse(t0, dur=0.05, f_lo=200.0, f_hi=1200.0):
    return Pulse(t_start_s=t0, t_end_s=t0 + dur, f_lo_hz=f_lo, f_hi_hz=f_hi,
                 peak_db=-20.0, cell_count=10)


# ---------------------------------------------------------------- binarize

def test_binarize_single_hot_cell():
    cells = np.full((40, 129), -60.0)
    cells[10, 20] = -10.0
    mask = binarize(make_spec(cells), wide_cfg(binarize_pct=90.0, binarize_offset_db=6.0))
    # percentile of the near-constant band is -60, threshold -54
    assert mask.threshold_db_used == -54.0
    assert mask.cells[10, 20]
    assert mask.cells.sum() == 1


def test_binarize_all_equal_is_all_false():
    cells = np.full((20, 129), -50.0)
    mask = binarize(make_spec(cells), wide_cfg(binarize_offset_db=0.0))
    assert not mask.cells.any()


def test_binarize_shape_and_band_gating():
    rng = np.random.default_rng(8)
    cells = rng.uniform(-90, -10, size=(30, 129))
    spec = make_spec(cells)
    cfg = wide_cfg(band_lo_hz=200.0, band_hi_hz=1200.0)
    mask = binarize(spec, cfg)
    assert mask.cells.shape == cells.shape
    outside = (spec.bin_freqs_hz < 200.0) | (spec.bin_freqs_hz > 1200.0)
    assert not mask.cells[:, outside].any()


def test_binarize_offset_monotonicity():
    rng = np.random.default_rng(21)
    for _ in range(5):
        spec = make_spec(rng.uniform(-90, -10, size=(25, 129)))
        counts = [
            binarize(spec, wide_cfg(binarize_offset_db=off)).cells.sum()
            for off in (0.0, 3.0, 6.0, 12.0)
        ]
        assert counts == sorted(counts, reverse=True)


def test_binarize_empty_band():
    spec = make_spec(np.full((10, 129), -60.0))
    with pytest.raises(EmptyBandError):
        binarize(spec, wide_cfg(band_lo_hz=3990.0, band_hi_hz=3999.0))


# ---------------------------------------------------------------- extract

def test_single_block_geometry():
    cells = np.full((40, 129), -90.0)
    bins = np.arange(7, 39)  # centers 218.75 .. 1187.5 Hz
    cells[np.ix_(np.arange(10, 14), bins)] = -10.0
    spec = make_spec(cells)
    mask = binarize(spec, wide_cfg())
    pulses = extract_pulses(mask, spec, wide_cfg())
    assert len(pulses) == 1
    p = pulses[0]
    assert math.isclose(p.duration_s, 4 * 0.016)
    assert abs(p.f_lo_hz - 200.0) <= spec.bin_width_hz
    assert abs(p.f_hi_hz - 1200.0) <= spec.bin_width_hz
    assert p.peak_db == -10.0
    assert p.cell_count == 4 * len(bins)


def test_two_separated_blocks_are_two_pulses():
    cells = np.full((40, 129), -90.0)
    cells[np.ix_(np.arange(5, 8), np.arange(10, 20))] = -10.0
    cells[np.ix_(np.arange(9, 12), np.arange(30, 40))] = -10.0  # gap in both axes
    spec = make_spec(cells)
    pulses = extract_pulses(binarize(spec, wide_cfg()), spec, wide_cfg())
    assert len(pulses) == 2
    assert pulses[0].t_start_s < pulses[1].t_start_s


def test_single_frame_block_fails_duration_gate():
    cells = np.full((40, 129), -90.0)
    cells[10, 10:20] = -10.0
    spec = make_spec(cells)
    pulses = extract_pulses(binarize(spec, wide_cfg()), spec, wide_cfg(pulse_dur_min_s=0.02))
    assert pulses == []


def test_long_component_fails_duration_gate():
    cells = np.full((200, 129), -90.0)
    cells[:, 32] = -10.0  # continuous tone track
    spec = make_spec(cells)
    pulses = extract_pulses(binarize(spec, wide_cfg()), spec, wide_cfg())
    assert pulses == []


# ---------------------------------------------------------------- coalesce

def test_coalesce_merges_time_overlapping_fragments():
    a = Pulse(1.0, 1.05, 200.0, 600.0, -20.0, 12)
    b = Pulse(1.016, 1.06, 700.0, 1200.0, -15.0, 9)
    merged = coalesce_pulses([a, b], wide_cfg())
    assert len(merged) == 1
    m = merged[0]
    assert (m.t_start_s, m.t_end_s) == (1.0, 1.06)
    assert (m.f_lo_hz, m.f_hi_hz) == (200.0, 1200.0)
    assert m.peak_db == -15.0
    assert m.cell_count == 21


def test_coalesce_keeps_disjoint_pulses():
    a = make_pulse(1.0)
    b = make_pulse(1.3)
    assert coalesce_pulses([a, b], wide_cfg()) == [a, b]


def test_coalesce_regates_merged_duration():
    # chain of overlapping fragments builds a pseudo-pulse that is too long
    frags = [make_pulse(1.0 + 0.04 * k, dur=0.05) for k in range(5)]
    assert coalesce_pulses(frags, wide_cfg()) == []


# ---------------------------------------------------------------- grouping

def test_group_all_gaps_under_limit():
    pulses = [make_pulse(0.5 * k) for k in range(10)]
    events = group_pulse_trains(pulses, wide_cfg(), T0, "site")
    assert len(events) == 1
    assert len(events[0].pulses) == 10
    assert events[0].t_start_s == pulses[0].t_start_s
    assert events[0].t_end_s == pulses[-1].t_end_s


def test_group_splits_at_large_gap():
    onsets = [0.5 * k for k in range(5)] + [4.5 + 0.5 * k for k in range(5)]
    events = group_pulse_trains([make_pulse(t) for t in onsets], wide_cfg(), T0, "site")
    assert [len(e.pulses) for e in events] == [5, 5]


def test_group_min_pulses_gate():
    events = group_pulse_trains([make_pulse(0.5 * k) for k in range(3)], wide_cfg(), T0, "site")
    assert events == []


def test_group_train_duration_gate():
    short = [make_pulse(0.1 * k) for k in range(6)]  # span ~0.55 s
    events = group_pulse_trains(short, wide_cfg(train_dur_min_s=1.0), T0, "site")
    assert events == []


def test_event_ids_deterministic_and_utc_offset():
    pulses = [make_pulse(2.0 + 0.5 * k) for k in range(6)]
    ev1 = group_pulse_trains(pulses, wide_cfg(), T0, "siteA")[0]
    ev2 = group_pulse_trains(pulses, wide_cfg(), T0, "siteA")[0]
    assert ev1.event_id == ev2.event_id == "siteA_000002000"
    assert (ev1.start_utc - T0).total_seconds() == pytest.approx(2.0)


# ---------------------------------------------------------------- full chain

def test_detect_planted_train():
    spec = SynthesisSpec(n_pulses=30, pulse_duration_s=0.05, inter_onset_interval_s=0.3,
                         snr_db=20.0, noise_seed=4)
    clip = synthesize_pulse_train(spec, duration_s=15.0, sample_rate_hz=8000)
    events = detect_events(clip, STFT, wide_cfg(train_dur_min_s=5.0))
    assert len(events) == 1
    assert 29 <= len(events[0].pulses) <= 31
    lo, hi = planted_train_span(spec, 15.0)
    assert events[0].t_start_s < hi and events[0].t_end_s > lo


def test_detect_seeded_noise_yields_nothing():
    # default config on pure noise; seed recorded with the suite
    spec = SynthesisSpec(n_pulses=0, snr_db=-math.inf, noise_seed=20130313)
    clip = synthesize_pulse_train(spec, duration_s=60.0, sample_rate_hz=8000)
    assert detect_events(clip, STFT, DetectorConfig()) == []


def test_detect_continuous_tone_yields_nothing():
    t = np.arange(60 * FS) / FS
    clip = AudioClip(samples=0.5 * np.sin(2 * np.pi * 600 * t), sample_rate_hz=FS)
    assert detect_events(clip, STFT, DetectorConfig()) == []


def test_detect_rejects_sub_nyquist_sample_rate():
    clip = AudioClip(samples=np.zeros(4000), sample_rate_hz=2000)
    with pytest.raises(NyquistError):
        detect_events(clip, STFT, DetectorConfig(band_hi_hz=1400.0))


def test_detect_events_deterministic_and_inside_bounds():
    spec = SynthesisSpec(noise_seed=6, snr_db=20.0)
    clip = synthesize_pulse_train(spec, duration_s=15.0, sample_rate_hz=8000)
    cfg = wide_cfg(train_dur_min_s=5.0)
    a = detect_events(clip, STFT, cfg)
    b = detect_events(clip, STFT, cfg)
    assert a == b
    for event in a:
        for p in event.pulses:
            assert cfg.band_lo_hz <= p.f_lo_hz < p.f_hi_hz <= cfg.band_hi_hz
            assert 0.0 <= p.t_start_s < p.t_end_s <= clip.duration_s


def test_event_pulses_non_overlapping():
    spec = SynthesisSpec(noise_seed=14, snr_db=15.0)
    clip = synthesize_pulse_train(spec, duration_s=15.0, sample_rate_hz=8000)
    for event in detect_events(clip, STFT, wide_cfg(train_dur_min_s=5.0)):
        for prev, nxt in zip(event.pulses, event.pulses[1:]):
            assert prev.t_end_s <= nxt.t_start_s


def test_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(band_lo_hz=1400, band_hi_hz=100)
    with pytest.raises(ValueError):
        DetectorConfig(pulse_dur_min_s=0.1, pulse_dur_max_s=0.02)
    with pytest.raises(ValueError):
        DetectorConfig(min_pulses=1)
    with pytest.raises(ValueError):
        DetectorConfig(train_dur_min_s=90, train_dur_max_s=10)
