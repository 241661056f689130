from datetime import datetime, timezone

import numpy as np
import pytest

from pulsetrain.detector import Pulse, PulseTrainEvent
from pulsetrain.features import FEATURE_NAMES, FeatureVector
from pulsetrain.records import (
    FEATURES_HEADER,
    TRAINING_HEADER,
    read_events_jsonl,
    read_features_csv,
    read_labels_csv,
    read_scored_csv,
    read_training_csv,
    write_events_jsonl,
    write_features_csv,
    write_labels_csv,
    write_scored_csv,
    write_training_csv,
)

T0 = datetime(2009, 4, 1, 6, 30, tzinfo=timezone.utc)


def sample_events(n=3):
    events = []
    for k in range(n):
        pulses = [
            Pulse(t_start_s=1.0 + k + 0.3 * i, t_end_s=1.05 + k + 0.3 * i,
                  f_lo_hz=203.125, f_hi_hz=1196.875, peak_db=-23.456789 + i, cell_count=40 + i)
            for i in range(5)
        ]
        events.append(
            PulseTrainEvent(
                event_id=f"siteA_{k:09d}",
                pulses=pulses,
                t_start_s=pulses[0].t_start_s,
                t_end_s=pulses[-1].t_end_s,
                start_utc=T0,
                source_id="siteA",
            )
        )
    return events


def sample_vectors(n=3):
    rng = np.random.default_rng(7)
    return [FeatureVector(values=rng.normal(0, 10, 18), event_id=f"siteA_{k:09d}") for k in range(n)]


def test_events_round_trip_exact(tmp_path):
    path = tmp_path / "events.jsonl"
    events = sample_events()
    write_events_jsonl(events, path)
    assert read_events_jsonl(path) == events


def test_events_file_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_events_jsonl(sample_events(), a)
    write_events_jsonl(sample_events(), b)
    assert a.read_bytes() == b.read_bytes()


def test_features_round_trip_and_header(tmp_path):
    path = tmp_path / "features.csv"
    rows = [(fv, T0) for fv in sample_vectors()]
    write_features_csv(rows, path)
    header = path.read_text().splitlines()[0].split(",")
    assert header == FEATURES_HEADER
    assert header[2:] == list(FEATURE_NAMES)
    loaded = read_features_csv(path)
    for (fv, when), (fv2, when2) in zip(rows, loaded):
        assert np.array_equal(fv.values, fv2.values)
        assert fv.event_id == fv2.event_id
        assert when == when2


def test_labels_round_trip(tmp_path):
    path = tmp_path / "labels.csv"
    labels = {"b": 4, "a": 0, "c": 3}
    write_labels_csv(labels, path)
    assert read_labels_csv(path) == labels


def test_training_layout_is_features_then_score(tmp_path):
    path = tmp_path / "training.csv"
    rows = [(fv, k % 5) for k, fv in enumerate(sample_vectors())]
    write_training_csv(rows, path)
    header = path.read_text().splitlines()[0].split(",")
    assert header == TRAINING_HEADER == ["event_id"] + list(FEATURE_NAMES) + ["score"]
    loaded = read_training_csv(path)
    for (fv, s), (fv2, s2) in zip(rows, loaded):
        assert np.array_equal(fv.values, fv2.values)
        assert s == s2


def test_scored_round_trip(tmp_path):
    path = tmp_path / "scored.csv"
    rows = [
        {
            "event_id": fv.event_id,
            "start_utc": T0,
            "values": fv.values,
            "argmax_score": 4,
            "expected_score": 3.2109876543210987,
            "accept": True,
        }
        for fv in sample_vectors()
    ]
    write_scored_csv(rows, path)
    loaded = read_scored_csv(path)
    assert loaded[0]["expected_score"] == 3.2109876543210987
    assert loaded[0]["accept"] is True
    assert np.array_equal(loaded[1]["values"], rows[1]["values"])


def test_header_mismatch_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("wrong,header\n1,2\n")
    with pytest.raises(ValueError):
        read_features_csv(path)
    with pytest.raises(ValueError):
        read_training_csv(path)
    with pytest.raises(ValueError):
        read_scored_csv(path)
