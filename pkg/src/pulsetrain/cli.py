"""Command-line pipeline: detect, extract, train, classify, roc, diel, serve.

Per-file and per-row failures are logged to stderr and skipped so a long
batch keeps going; a command exits 1 only when it produced nothing usable.
All outputs are byte-stable given identical inputs, config and seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import timedelta

from .audio import load_audio
from .config import PipelineConfig, load_config
from .detector import detect_events
from .errors import DegenerateTruthError, PulsetrainError
from .evaluation import diel_grid, roc_curve
from .features import FeatureVector, N_FEATURES, extract_features, fit_standardizer, standardize
from .network import MlpModel, TrainingVector, forward, init_model, load_model, save_model, train
from .records import (
    read_events_jsonl,
    read_features_csv,
    read_labels_csv,
    read_scored_csv,
    read_training_csv,
    write_diel_csv,
    write_events_jsonl,
    write_features_csv,
    write_roc_csv,
    write_scored_csv,
)
from .spectrogram import compute_spectrogram
from .svgplot import render_diel_svg, render_roc_svg

log = logging.getLogger("pulsetrain")

TRUTH_SCORE_MIN = 3  # an event counts as a true target when its human score >= 3


def _audio_files(audio_dir: str) -> list[str]:
    names = [n for n in os.listdir(audio_dir) if n.lower().endswith(".wav")]
    return [os.path.join(audio_dir, n) for n in sorted(names)]


def cmd_detect(args) -> int:
    cfg = load_config(args.config)
    files = _audio_files(args.audio_dir)
    if not files:
        log.warning("no .wav files in %s; writing an empty events file", args.audio_dir)
        write_events_jsonl([], args.out)
        return 0

    events = []
    failures = 0
    for path in files:
        try:
            clip = load_audio(path)
            found = detect_events(clip, cfg.stft, cfg.detector)
        except PulsetrainError as e:
            log.error("skipping %s: %s", path, e)
            failures += 1
            continue
        events.extend(found)
        log.info("%s: %d event(s)", os.path.basename(path), len(found))
    if failures == len(files):
        log.error("all %d file(s) failed", failures)
        return 1
    events.sort(key=lambda e: (e.source_id, e.t_start_s))
    write_events_jsonl(events, args.out)
    return 0


def cmd_extract(args) -> int:
    cfg = load_config(args.config)
    events = read_events_jsonl(args.events)
    clips = {}
    specs = {}
    rows = []
    for event in events:
        if event.source_id not in clips:
            path = os.path.join(args.audio_dir, event.source_id + ".wav")
            try:
                clips[event.source_id] = load_audio(path)
                specs[event.source_id] = compute_spectrogram(clips[event.source_id], cfg.stft)
            except PulsetrainError as e:
                log.error("skipping events from %s: %s", event.source_id, e)
                clips[event.source_id] = None
        if clips[event.source_id] is None:
            continue
        fv = extract_features(
            event,
            specs[event.source_id],
            clips[event.source_id],
            cfg.detector,
            snr_window_s=cfg.features.snr_window_s,
            mode_bin_s=cfg.features.ioi_mode_bin_s,
        )
        rows.append((fv, event.start_utc))
    write_features_csv(rows, args.out)
    return 0


def _load_training_rows(args) -> list[tuple[FeatureVector, int]]:
    if args.labels is None:
        return read_training_csv(args.features)
    feature_rows = read_features_csv(args.features)
    labels = read_labels_csv(args.labels)
    known = {fv.event_id for fv, _ in feature_rows}
    unknown = sorted(set(labels) - known)
    if unknown:
        raise PulsetrainError(f"labels reference unknown event_ids: {', '.join(unknown)}")
    return [(fv, labels[fv.event_id]) for fv, _ in feature_rows if fv.event_id in labels]


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.hyper.seed = args.seed
    try:
        rows = _load_training_rows(args)
    except PulsetrainError as e:
        log.error("%s", e)
        return 1
    if not rows:
        log.error("no labeled training rows")
        return 1
    scores = sorted({score for _, score in rows})
    if len(scores) < 2:
        log.error("need at least 2 distinct score classes, got %s", scores)
        return 1

    stats = fit_standardizer([fv for fv, _ in rows])
    data = [
        TrainingVector(values=standardize(fv, stats).values, score=score) for fv, score in rows
    ]
    model = init_model([N_FEATURES, *cfg.hidden_sizes, 5], seed=cfg.hyper.seed)
    trained, history = train(model, data, cfg.hyper)
    trained.standardizer = stats
    save_model(trained, args.out)

    histogram = {str(s): sum(1 for _, sc in rows if sc == s) for s in range(5)}
    report = {
        "final_mse": history[-1],
        "initial_mse": history[0],
        "epochs_run": len(history) - 1,
        "n_train": len(rows),
        "class_histogram": histogram,
        "layer_sizes": trained.layer_sizes,
        "seed": cfg.hyper.seed,
        "learning_rate": cfg.hyper.learning_rate,
    }
    report_path = args.report or args.out + ".report.json"
    with open(report_path, "w") as f:
        json.dump(report, f, sort_keys=True, indent=2)
        f.write("\n")
    print(f"trained on {len(rows)} rows: mse {history[-1]:.6f} after {len(history) - 1} epochs")
    return 0


def _apply_model(model: MlpModel, fv: FeatureVector) -> tuple[int, float]:
    values = fv.values
    if model.standardizer is not None:
        values = standardize(fv, model.standardizer).values
    dist = forward(model, values)
    return dist.argmax_score, dist.expected_score


def cmd_classify(args) -> int:
    model = load_model(args.model)
    feature_rows = read_features_csv(args.features)
    out_rows = []
    for fv, start_utc in feature_rows:
        argmax_score, expected = _apply_model(model, fv)
        out_rows.append(
            {
                "event_id": fv.event_id,
                "start_utc": start_utc,
                "values": fv.values,
                "argmax_score": argmax_score,
                "expected_score": expected,
                "accept": argmax_score >= args.tau,
            }
        )
    write_scored_csv(out_rows, args.out)
    return 0


def cmd_roc(args) -> int:
    scored = read_scored_csv(args.scored)
    labels = read_labels_csv(args.labels)
    pairs = []
    for rec in scored:
        if rec["event_id"] not in labels:
            log.warning("no label for %s; skipping", rec["event_id"])
            continue
        pairs.append((rec["expected_score"], labels[rec["event_id"]] >= TRUTH_SCORE_MIN))
    if not pairs:
        log.error("no labeled rows to evaluate")
        return 1
    try:
        curve = roc_curve([p[0] for p in pairs], [p[1] for p in pairs])
    except DegenerateTruthError as e:
        log.error("%s", e)
        return 1
    write_roc_csv(curve, args.out_csv)
    with open(args.out_svg, "w") as f:
        f.write(render_roc_svg(curve))
    print(f"auc {curve.auc:.4f} over {len(pairs)} events")
    return 0


def cmd_diel(args) -> int:
    cfg = load_config(args.config)
    scored = read_scored_csv(args.scored)
    if not scored:
        log.error("scored file holds no rows")
        return 1
    offset = cfg.site.utc_offset_hours
    accepted = [rec for rec in scored if rec["argmax_score"] >= args.tau]
    # grid spans the scored archive's local dates even when nothing is accepted
    pool = accepted or scored
    dates = [(rec["start_utc"] + timedelta(hours=offset)).date() for rec in pool]
    grid = diel_grid(
        [(rec["start_utc"], offset) for rec in accepted],
        (min(dates), max(dates)),
        args.bins_per_day,
        cfg.site,
    )
    write_diel_csv(grid, args.out_csv)
    with open(args.out_svg, "w") as f:
        f.write(render_diel_svg(grid))
    print(f"{int(grid.counts.sum())} accepted event(s) over {len(grid.dates)} day(s)")
    return 0


def cmd_serve(args) -> int:
    from .service import AnnotationService, make_server

    cfg = load_config(args.config)
    events = read_events_jsonl(args.events)
    clips = {}
    for event in events:
        if event.source_id not in clips:
            path = os.path.join(args.audio_dir, event.source_id + ".wav")
            try:
                clips[event.source_id] = load_audio(path)
            except PulsetrainError as e:
                log.warning("audio for %s unavailable: %s", event.source_id, e)
    features = {}
    if args.features:
        features = {fv.event_id: fv for fv, _ in read_features_csv(args.features)}
    service = AnnotationService(
        events=events,
        clips={k: v for k, v in clips.items() if v is not None},
        label_log_path=args.label_log,
        stft_params=cfg.stft,
        features=features,
        export_path=args.export,
        ui_dir=args.ui_dir,
    )
    server = make_server(service, host=args.host, port=args.port)
    host, port = server.server_address[:2]
    print(f"annotation service on http://{host}:{port}/ (ctrl-c to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulsetrain",
        description="Pulse-train detection, feature extraction, human-scored training, and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect pulse-train events in a directory of WAV files")
    p.add_argument("--audio-dir", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True, help="events JSONL output")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("extract", help="compute the 18-feature vector for each event")
    p.add_argument("--events", required=True)
    p.add_argument("--audio-dir", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True, help="features CSV output")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train the score classifier on labeled features")
    p.add_argument("--features", required=True, help="features CSV, or a combined training CSV")
    p.add_argument("--labels", default=None, help="labels CSV (event_id,score)")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="model file output")
    p.add_argument("--report", default=None, help="report JSON path (default: <out>.report.json)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="score feature rows with a trained model")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--tau", type=int, default=3, choices=range(5))
    p.add_argument("--out", required=True, help="scored CSV output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("roc", help="ROC curve of expected score against human labels")
    p.add_argument("--scored", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", required=True)
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("diel", help="date-vs-time activity grid of accepted events")
    p.add_argument("--scored", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--tau", type=int, default=3, choices=range(5))
    p.add_argument("--bins-per-day", type=int, default=144)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", required=True)
    p.set_defaults(func=cmd_diel)

    p = sub.add_parser("serve", help="start the annotation service")
    p.add_argument("--events", required=True)
    p.add_argument("--audio-dir", required=True)
    p.add_argument("--features", default=None)
    p.add_argument("--label-log", required=True)
    p.add_argument("--export", default="training_set.csv")
    p.add_argument("--ui-dir", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PulsetrainError as e:
        log.error("%s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
