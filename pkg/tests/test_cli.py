import json
from datetime import datetime, timezone

import numpy as np
import pytest

from pulsetrain.audio import save_wav
from pulsetrain.cli import main
from pulsetrain.records import (
    read_events_jsonl,
    read_features_csv,
    read_scored_csv,
    write_labels_csv,
    write_scored_csv,
)

from synthcorpus import confusable_clip, train_clip

CONFIG_TEXT = """
detector.train_dur_min_s = 4.0
train.max_epochs = 60
train.learning_rate = 0.5
train.target_mse = 0.001
train.seed = 3
site.utc_offset_hours = -4
"""


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Corpus directory with two planted trains, one confusable, one corrupt file."""
    root = tmp_path_factory.mktemp("pipeline")
    audio = root / "audio"
    audio.mkdir()
    stamps = ["20090401_060000", "20090402_070000", "20090403_200000"]
    clips = [train_clip(1)[0], train_clip(2)[0], confusable_clip(1)]
    for clip, stamp in zip(clips, stamps):
        save_wav(audio / f"{clip.source_id}_{stamp}.wav", clip.samples, clip.sample_rate_hz)
    (audio / "broken_20090404_000000.wav").write_bytes(b"not audio at all")
    cfg = root / "pipeline.cfg"
    cfg.write_text(CONFIG_TEXT)
    return root, audio, cfg


@pytest.fixture(scope="module")
def detected(workdir):
    root, audio, cfg = workdir
    events_path = root / "events.jsonl"
    assert main(["detect", "--audio-dir", str(audio), "--config", str(cfg),
                 "--out", str(events_path)]) == 0
    return events_path


@pytest.fixture(scope="module")
def extracted(workdir, detected):
    root, audio, cfg = workdir
    features_path = root / "features.csv"
    assert main(["extract", "--events", str(detected), "--audio-dir", str(audio),
                 "--config", str(cfg), "--out", str(features_path)]) == 0
    return features_path


@pytest.fixture(scope="module")
def trained(workdir, extracted):
    root, audio, cfg = workdir
    events = read_events_jsonl(root / "events.jsonl")
    labels = {}
    for ev in events:
        labels[ev.event_id] = 0 if ev.source_id.startswith("conf") else 4
    # one mid-grade label so three classes exist
    labels[events[0].event_id] = 3
    labels_path = root / "labels.csv"
    write_labels_csv(labels, labels_path)
    model_path = root / "model.json"
    assert main(["train", "--features", str(extracted), "--labels", str(labels_path),
                 "--config", str(cfg), "--out", str(model_path)]) == 0
    return model_path, labels_path


def test_detect_skips_corrupt_and_finds_planted(workdir, detected):
    events = read_events_jsonl(detected)
    sources = {e.source_id for e in events}
    assert len(events) == 3
    assert any(s.startswith("train0001") for s in sources)
    assert any(s.startswith("conf0001") for s in sources)
    assert not any(s.startswith("broken") for s in sources)
    # stable ordering by (source_id, t_start)
    keys = [(e.source_id, e.t_start_s) for e in events]
    assert keys == sorted(keys)


def test_detect_parses_filename_timestamps(detected):
    events = read_events_jsonl(detected)
    first = [e for e in events if e.source_id.startswith("train0001")][0]
    assert first.start_utc.date().isoformat() == "2009-04-01"
    assert first.start_utc > datetime(2009, 4, 1, 6, 0, tzinfo=timezone.utc)


def test_detect_empty_dir_writes_empty_file(tmp_path):
    out = tmp_path / "events.jsonl"
    assert main(["detect", "--audio-dir", str(tmp_path), "--out", str(out)]) == 0
    assert out.read_text() == ""


def test_detect_all_failures_exit_1(tmp_path):
    (tmp_path / "bad.wav").write_bytes(b"garbage")
    out = tmp_path / "events.jsonl"
    assert main(["detect", "--audio-dir", str(tmp_path), "--out", str(out)]) == 1


def test_extract_row_per_event_and_idempotent(workdir, detected, extracted):
    root, audio, cfg = workdir
    events = read_events_jsonl(detected)
    rows = read_features_csv(extracted)
    assert len(rows) == len(events)
    assert [fv.event_id for fv, _ in rows] == [e.event_id for e in events]
    first_bytes = extracted.read_bytes()
    assert main(["extract", "--events", str(detected), "--audio-dir", str(audio),
                 "--config", str(cfg), "--out", str(extracted)]) == 0
    assert extracted.read_bytes() == first_bytes


def test_extract_header_names_features(extracted):
    header = extracted.read_text().splitlines()[0]
    assert header == "event_id,start_utc," + ",".join(f"F{i}" for i in range(1, 19))


def test_extract_skips_missing_audio(workdir, detected, tmp_path):
    root, audio, cfg = workdir
    empty_audio = tmp_path / "no_audio"
    empty_audio.mkdir()
    out = tmp_path / "features.csv"
    assert main(["extract", "--events", str(detected), "--audio-dir", str(empty_audio),
                 "--config", str(cfg), "--out", str(out)]) == 0
    assert read_features_csv(out) == []


def test_train_writes_model_and_report(workdir, trained):
    model_path, _ = trained
    assert model_path.exists()
    report = json.loads((model_path.parent / "model.json.report.json").read_text())
    assert report["epochs_run"] <= 60
    assert report["n_train"] == 3
    assert set(report["class_histogram"]) == {"0", "1", "2", "3", "4"}
    assert report["final_mse"] <= report["initial_mse"]


def test_train_is_deterministic(workdir, extracted, trained, tmp_path):
    root, audio, cfg = workdir
    model_path, labels_path = trained
    again = tmp_path / "model2.json"
    assert main(["train", "--features", str(extracted), "--labels", str(labels_path),
                 "--config", str(cfg), "--out", str(again)]) == 0
    assert again.read_bytes() == model_path.read_bytes()


def test_train_rejects_unknown_event_ids(workdir, extracted, tmp_path):
    root, audio, cfg = workdir
    labels_path = tmp_path / "labels.csv"
    write_labels_csv({"ghost_event": 4, "other_ghost": 0}, labels_path)
    assert main(["train", "--features", str(extracted), "--labels", str(labels_path),
                 "--config", str(cfg), "--out", str(tmp_path / "m.json")]) == 1


def test_train_requires_two_classes(workdir, extracted, tmp_path):
    root, audio, cfg = workdir
    rows = read_features_csv(extracted)
    labels_path = tmp_path / "labels.csv"
    write_labels_csv({rows[0][0].event_id: 4}, labels_path)
    assert main(["train", "--features", str(extracted), "--labels", str(labels_path),
                 "--config", str(cfg), "--out", str(tmp_path / "m.json")]) == 1


def test_classify_preserves_rows_and_nests_thresholds(workdir, extracted, trained, tmp_path):
    model_path, _ = trained
    out3 = tmp_path / "scored3.csv"
    out4 = tmp_path / "scored4.csv"
    assert main(["classify", "--features", str(extracted), "--model", str(model_path),
                 "--tau", "3", "--out", str(out3)]) == 0
    assert main(["classify", "--features", str(extracted), "--model", str(model_path),
                 "--tau", "4", "--out", str(out4)]) == 0
    rows3 = read_scored_csv(out3)
    rows4 = read_scored_csv(out4)
    assert len(rows3) == len(rows4) == len(read_features_csv(extracted))
    accepted3 = {r["event_id"] for r in rows3 if r["accept"]}
    accepted4 = {r["event_id"] for r in rows4 if r["accept"]}
    assert accepted4 <= accepted3
    # identical classifier outputs regardless of tau
    assert [r["expected_score"] for r in rows3] == [r["expected_score"] for r in rows4]
    assert main(["classify", "--features", str(extracted), "--model", str(model_path),
                 "--tau", "3", "--out", str(out3)]) == 0
    assert out3.read_bytes() == tmp_path.joinpath("scored3.csv").read_bytes()


def perfect_scored_rows():
    rng = np.random.default_rng(3)
    rows = []
    for k in range(8):
        positive = k < 4
        rows.append(
            {
                "event_id": f"e{k}",
                "start_utc": datetime(2009, 4, 1 + k, 3 + 2 * k, 15, tzinfo=timezone.utc),
                "values": rng.normal(0, 1, 18),
                "argmax_score": 4 if positive else 0,
                "expected_score": 3.5 + k * 0.01 if positive else 0.5 + k * 0.01,
                "accept": positive,
            }
        )
    return rows


def test_roc_perfect_separation(tmp_path):
    scored_path = tmp_path / "scored.csv"
    rows = perfect_scored_rows()
    write_scored_csv(rows, scored_path)
    labels_path = tmp_path / "labels.csv"
    write_labels_csv({r["event_id"]: 4 if r["accept"] else 0 for r in rows}, labels_path)
    out_csv = tmp_path / "roc.csv"
    out_svg = tmp_path / "roc.svg"
    assert main(["roc", "--scored", str(scored_path), "--labels", str(labels_path),
                 "--out-csv", str(out_csv), "--out-svg", str(out_svg)]) == 0
    last = out_csv.read_text().strip().splitlines()[-1]
    assert last.startswith("auc,1.0")
    assert out_svg.read_text().startswith("<svg")


def test_roc_degenerate_labels_exit_1(tmp_path):
    scored_path = tmp_path / "scored.csv"
    rows = perfect_scored_rows()
    write_scored_csv(rows, scored_path)
    labels_path = tmp_path / "labels.csv"
    write_labels_csv({r["event_id"]: 4 for r in rows}, labels_path)
    assert main(["roc", "--scored", str(scored_path), "--labels", str(labels_path),
                 "--out-csv", str(tmp_path / "r.csv"), "--out-svg", str(tmp_path / "r.svg")]) == 1


def test_diel_conserves_accepted_count(tmp_path):
    scored_path = tmp_path / "scored.csv"
    rows = perfect_scored_rows()
    write_scored_csv(rows, scored_path)
    out_csv = tmp_path / "diel.csv"
    out_svg = tmp_path / "diel.svg"
    assert main(["diel", "--scored", str(scored_path), "--tau", "3",
                 "--out-csv", str(out_csv), "--out-svg", str(out_svg)]) == 0
    lines = out_csv.read_text().strip().splitlines()[1:]
    total = sum(sum(int(v) for v in line.split(",")[1:]) for line in lines)
    assert total == sum(1 for r in rows if r["argmax_score"] >= 3)
    assert out_svg.read_text().startswith("<svg")


def test_train_reaches_target_on_clustered_data(tmp_path):
    # five well-separated clusters, one per score, as a combined training CSV
    from pulsetrain.features import FeatureVector
    from pulsetrain.records import write_training_csv

    rng = np.random.default_rng(42)
    centers = rng.normal(0.0, 6.0, size=(5, 18))
    rows = []
    for i in range(200):
        k = i % 5
        fv = FeatureVector(values=centers[k] + rng.normal(0.0, 0.5, 18), event_id=f"c{i}")
        rows.append((fv, k))
    training_path = tmp_path / "training.csv"
    write_training_csv(rows, training_path)
    cfg = tmp_path / "train.cfg"
    cfg.write_text("train.max_epochs = 2000\ntrain.target_mse = 0.01\ntrain.seed = 2\n")
    model_path = tmp_path / "model.json"
    assert main(["train", "--features", str(training_path), "--config", str(cfg),
                 "--out", str(model_path)]) == 0
    report = json.loads((tmp_path / "model.json.report.json").read_text())
    assert report["final_mse"] < 0.01
    assert report["epochs_run"] <= 2000


def test_bad_usage_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["detect"])  # missing required flags
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
