"""On-disk record formats passed between pipeline stages.

Events travel as line-delimited JSON (one event per line, sorted keys);
feature tables, labels, scored events and training sets are plain CSV.
Floats are written with repr so every file round-trips bit-exactly and
re-running a stage on identical inputs is byte-stable.
"""

from __future__ import annotations

import csv
import json
import os
from datetime import datetime, timezone

import numpy as np

from .detector import Pulse, PulseTrainEvent
from .features import FEATURE_NAMES, N_FEATURES, FeatureVector


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _iso(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f+00:00")


def _parse_iso(s: str) -> datetime:
    return datetime.fromisoformat(s)


def event_to_json(event: PulseTrainEvent) -> str:
    doc = {
        "event_id": event.event_id,
        "source_id": event.source_id,
        "start_utc": _iso(event.start_utc),
        "t_start_s": event.t_start_s,
        "t_end_s": event.t_end_s,
        "pulses": [
            {
                "t_start_s": p.t_start_s,
                "t_end_s": p.t_end_s,
                "f_lo_hz": p.f_lo_hz,
                "f_hi_hz": p.f_hi_hz,
                "peak_db": p.peak_db,
                "cell_count": p.cell_count,
            }
            for p in event.pulses
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def event_from_json(line: str) -> PulseTrainEvent:
    doc = json.loads(line)
    return PulseTrainEvent(
        event_id=doc["event_id"],
        source_id=doc["source_id"],
        start_utc=_parse_iso(doc["start_utc"]),
        t_start_s=doc["t_start_s"],
        t_end_s=doc["t_end_s"],
        pulses=[Pulse(**p) for p in doc["pulses"]],
    )


def write_events_jsonl(events: list[PulseTrainEvent], path: str | os.PathLike) -> None:
    with open(path, "w") as f:
        for ev in events:
            f.write(event_to_json(ev) + "\n")


def read_events_jsonl(path: str | os.PathLike) -> list[PulseTrainEvent]:
    events = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                events.append(event_from_json(line))
    return events


FEATURES_HEADER = ["event_id", "start_utc"] + list(FEATURE_NAMES)


def write_features_csv(
    rows: list[tuple[FeatureVector, datetime]], path: str | os.PathLike
) -> None:
    """One row per event: event_id, start_utc, F1..F18."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(FEATURES_HEADER)
        for fv, start_utc in rows:
            w.writerow([fv.event_id, _iso(start_utc)] + [_fmt_float(v) for v in fv.values])


def read_features_csv(path: str | os.PathLike) -> list[tuple[FeatureVector, datetime]]:
    rows = []
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r)
        if header != FEATURES_HEADER:
            raise ValueError(f"{path}: unexpected feature header {header}")
        for rec in r:
            fv = FeatureVector(
                values=np.array([float(v) for v in rec[2 : 2 + N_FEATURES]]), event_id=rec[0]
            )
            rows.append((fv, _parse_iso(rec[1])))
    return rows


def write_labels_csv(labels: dict[str, int], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["event_id", "score"])
        for event_id in sorted(labels):
            w.writerow([event_id, labels[event_id]])


def read_labels_csv(path: str | os.PathLike) -> dict[str, int]:
    labels = {}
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r)
        if header[:2] != ["event_id", "score"]:
            raise ValueError(f"{path}: unexpected label header {header}")
        for rec in r:
            labels[rec[0]] = int(rec[1])
    return labels


TRAINING_HEADER = ["event_id"] + list(FEATURE_NAMES) + ["score"]


def write_training_csv(
    rows: list[tuple[FeatureVector, int]], path: str | os.PathLike
) -> None:
    """Training-set layout: 18 feature columns then the human score."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TRAINING_HEADER)
        for fv, score in rows:
            w.writerow([fv.event_id] + [_fmt_float(v) for v in fv.values] + [score])


def read_training_csv(path: str | os.PathLike) -> list[tuple[FeatureVector, int]]:
    rows = []
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r)
        if header != TRAINING_HEADER:
            raise ValueError(f"{path}: unexpected training header {header}")
        for rec in r:
            fv = FeatureVector(
                values=np.array([float(v) for v in rec[1 : 1 + N_FEATURES]]), event_id=rec[0]
            )
            rows.append((fv, int(rec[-1])))
    return rows


SCORED_HEADER = FEATURES_HEADER + ["argmax_score", "expected_score", "accept"]


def write_scored_csv(rows: list[dict], path: str | os.PathLike) -> None:
    """Feature rows augmented with classifier outputs and the accept flag."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SCORED_HEADER)
        for rec in rows:
            w.writerow(
                [rec["event_id"], _iso(rec["start_utc"])]
                + [_fmt_float(v) for v in rec["values"]]
                + [rec["argmax_score"], _fmt_float(rec["expected_score"]), int(rec["accept"])]
            )


def read_scored_csv(path: str | os.PathLike) -> list[dict]:
    rows = []
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r)
        if header != SCORED_HEADER:
            raise ValueError(f"{path}: unexpected scored header {header}")
        for rec in r:
            rows.append(
                {
                    "event_id": rec[0],
                    "start_utc": _parse_iso(rec[1]),
                    "values": np.array([float(v) for v in rec[2 : 2 + N_FEATURES]]),
                    "argmax_score": int(rec[2 + N_FEATURES]),
                    "expected_score": float(rec[3 + N_FEATURES]),
                    "accept": bool(int(rec[4 + N_FEATURES])),
                }
            )
    return rows


def write_roc_csv(curve, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["fpr", "tpr", "threshold"])
        for (fpr, tpr), thr in zip(curve.points, curve.thresholds):
            w.writerow([_fmt_float(fpr), _fmt_float(tpr), _fmt_float(thr)])
        w.writerow(["auc", _fmt_float(curve.auc), ""])


def write_diel_csv(grid, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["date"] + [f"b{b:03d}" for b in range(grid.bins_per_day)])
        for i, d in enumerate(grid.dates):
            w.writerow([d.isoformat()] + [int(c) for c in grid.counts[i]])
