"""Annotation service: feeds detected events to a human scorer over HTTP.

The store keeps an append-only label log (JSON lines); the current label
for an event is the last one submitted, and no operation ever rewrites or
deletes history. All mutations funnel through one lock; reads are
unserialized snapshots, which matches the one-expert-at-a-time workflow.

Endpoints (JSON unless noted):

    GET  /api/events?filter=&page=&page_size=
    GET  /api/events/{id}/spectrogram?pad_s=     (PNG)
    GET  /api/events/{id}/audio?pad_s=           (WAV)
    POST /api/events/{id}/score                  body {"score": 0..4, "annotator": ...}
    GET  /api/rubric
    GET  /api/progress
    POST /api/export

Static UI assets are served at /.
"""

from __future__ import annotations

import json
import os
import threading
import urllib.parse
from dataclasses import dataclass
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .audio import AudioClip, wav_bytes
from .detector import PulseTrainEvent
from .features import FeatureVector
from .raster import spectrogram_png
from .records import write_training_csv
from .spectrogram import Spectrogram, StftParams, compute_spectrogram

RUBRIC = {
    0: "Not target species",
    1: "Unsure of target species",
    2: "Faint target species",
    3: "Mediocre target species",
    4: "Strong target species",
}

VALID_FILTERS = ("labeled", "unlabeled", "all")


@dataclass
class Label:
    event_id: str
    score: int
    annotator: str
    labeled_at: str


class AnnotationService:
    """Event store + label log + media rendering behind the HTTP surface."""

    def __init__(
        self,
        events: list[PulseTrainEvent],
        clips: dict[str, AudioClip],
        label_log_path: str | os.PathLike,
        stft_params: StftParams | None = None,
        features: dict[str, FeatureVector] | None = None,
        export_path: str | os.PathLike = "training_set.csv",
        ui_dir: str | os.PathLike | None = None,
        now_fn=None,
    ):
        self.events = sorted(events, key=lambda e: (e.source_id, e.t_start_s))
        self._by_id = {e.event_id: e for e in self.events}
        self.clips = clips
        self.stft_params = stft_params or StftParams()
        self.features = features or {}
        self.export_path = os.fspath(export_path)
        self.ui_dir = os.path.realpath(ui_dir) if ui_dir else None
        self._now = now_fn or (lambda: datetime.now(timezone.utc))

        self._log_path = os.fspath(label_log_path)
        self._write_lock = threading.Lock()
        self._history: list[Label] = []
        self._current: dict[str, Label] = {}
        self._specs: dict[str, Spectrogram] = {}
        self._replay_log()

    # ------------------------------------------------------------------ labels

    def _replay_log(self) -> None:
        if not os.path.exists(self._log_path):
            return
        with open(self._log_path) as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                doc = json.loads(line)
                if doc["score"] not in RUBRIC:
                    raise ValueError(
                        f"{self._log_path}: stored score {doc['score']!r} outside 0..4"
                    )
                label = Label(doc["event_id"], doc["score"], doc["annotator"], doc["labeled_at"])
                self._history.append(label)
                self._current[label.event_id] = label

    def submit_score(self, event_id: str, score, annotator: str) -> dict:
        if event_id not in self._by_id:
            raise KeyError(f"unknown event {event_id!r}")
        if not isinstance(score, int) or isinstance(score, bool) or score not in RUBRIC:
            raise ValueError(f"score must be an integer 0..4, got {score!r}")
        label = Label(event_id, score, str(annotator), self._now().isoformat())
        with self._write_lock:
            with open(self._log_path, "a") as f:
                f.write(
                    json.dumps(
                        {
                            "event_id": label.event_id,
                            "score": label.score,
                            "annotator": label.annotator,
                            "labeled_at": label.labeled_at,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
            self._history.append(label)
            self._current[event_id] = label
        return vars(label)

    def history_for(self, event_id: str) -> list[Label]:
        return [l for l in self._history if l.event_id == event_id]

    # ------------------------------------------------------------------ queries

    def _summary(self, event: PulseTrainEvent) -> dict:
        label = self._current.get(event.event_id)
        fv = self.features.get(event.event_id)
        return {
            "event_id": event.event_id,
            "source_id": event.source_id,
            "start_utc": event.start_utc.isoformat(),
            "t_start_s": event.t_start_s,
            "t_end_s": event.t_end_s,
            "duration_s": event.duration_s,
            "n_pulses": len(event.pulses),
            # SNR re the 5th/25th background percentiles, when features are loaded
            "snr_db": float(fv.values[14]) if fv is not None else None,
            "snr_p25_db": float(fv.values[17]) if fv is not None else None,
            "labeled": label is not None,
            "score": label.score if label else None,
        }

    def list_events(self, filter: str = "all", page: int = 0, page_size: int = 50) -> dict:
        if filter not in VALID_FILTERS:
            raise ValueError(f"filter must be one of {VALID_FILTERS}, got {filter!r}")
        if page < 0 or page_size < 1:
            raise ValueError("page must be >= 0 and page_size >= 1")
        if filter == "labeled":
            pool = [e for e in self.events if e.event_id in self._current]
        elif filter == "unlabeled":
            pool = [e for e in self.events if e.event_id not in self._current]
        else:
            pool = self.events
        window = pool[page * page_size : (page + 1) * page_size]
        return {
            "events": [self._summary(e) for e in window],
            "page": page,
            "page_size": page_size,
            "matched": len(pool),
            "progress": {"labeled": len(self._current), "total": len(self.events)},
        }

    def progress(self) -> dict:
        by_score = {str(k): 0 for k in RUBRIC}
        for label in self._current.values():
            by_score[str(label.score)] += 1
        return {"labeled": len(self._current), "total": len(self.events), "by_score": by_score}

    def rubric(self) -> dict:
        return {str(k): v for k, v in RUBRIC.items()}

    # ------------------------------------------------------------------ media

    def _event_and_clip(self, event_id: str) -> tuple[PulseTrainEvent, AudioClip]:
        event = self._by_id.get(event_id)
        if event is None:
            raise KeyError(f"unknown event {event_id!r}")
        clip = self.clips.get(event.source_id)
        if clip is None:
            raise KeyError(f"audio for {event.source_id!r} not available")
        return event, clip

    def _spectrogram(self, source_id: str) -> Spectrogram:
        if source_id not in self._specs:
            self._specs[source_id] = compute_spectrogram(self.clips[source_id], self.stft_params)
        return self._specs[source_id]

    def event_spectrogram_png(self, event_id: str, pad_s: float = 2.0) -> bytes:
        event, clip = self._event_and_clip(event_id)
        spec = self._spectrogram(event.source_id)
        t0 = max(0.0, event.t_start_s - pad_s)
        t1 = min(clip.duration_s, event.t_end_s + pad_s)
        f_lo = min(p.f_lo_hz for p in event.pulses)
        f_hi = max(p.f_hi_hz for p in event.pulses)
        return spectrogram_png(spec, t0, t1, outline=(event.t_start_s, event.t_end_s, f_lo, f_hi))

    def event_audio_wav(self, event_id: str, pad_s: float = 2.0) -> bytes:
        event, clip = self._event_and_clip(event_id)
        t0 = max(0.0, event.t_start_s - pad_s)
        t1 = min(clip.duration_s, event.t_end_s + pad_s)
        return wav_bytes(clip.span_samples(t0, t1), clip.sample_rate_hz)

    # ------------------------------------------------------------------ export

    def export_training(self) -> dict:
        """Write (event_id, F1..F18, score) rows for labeled events with features."""
        rows = []
        skipped = []
        for event in self.events:
            label = self._current.get(event.event_id)
            if label is None:
                continue
            if label.score not in RUBRIC:  # boundary enforces this; re-check anyway
                raise ValueError(f"label for {event.event_id} holds score {label.score!r}")
            fv = self.features.get(event.event_id)
            if fv is None:
                skipped.append(event.event_id)
                continue
            rows.append((fv, label.score))
        write_training_csv(rows, self.export_path)
        return {"path": self.export_path, "rows": len(rows), "skipped": skipped}


# ---------------------------------------------------------------------- HTTP

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".json": "application/json",
}

_PLACEHOLDER_PAGE = b"""<!doctype html>
<html><head><title>pulsetrain annotation service</title></head>
<body><h1>pulsetrain annotation service</h1>
<p>No UI assets installed. API lives under <code>/api/</code>:
events, rubric, progress, export.</p></body></html>
"""


def _make_handler(service: AnnotationService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send(self, status: int, body: bytes, content_type: str) -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, status: int, doc) -> None:
            self._send(status, json.dumps(doc, sort_keys=True).encode() + b"\n", "application/json")

        def _error(self, status: int, code: str, detail: str) -> None:
            self._send_json(status, {"error": code, "detail": detail})

        def _query(self) -> dict:
            parsed = urllib.parse.urlparse(self.path)
            return {k: v[-1] for k, v in urllib.parse.parse_qs(parsed.query).items()}

        def _route(self) -> list[str]:
            return [p for p in urllib.parse.urlparse(self.path).path.split("/") if p]

        def do_GET(self):
            parts = self._route()
            q = self._query()
            try:
                if not parts:
                    return self._static("index.html")
                if parts[0] != "api":
                    return self._static("/".join(parts))
                if parts[1:] == ["events"]:
                    doc = service.list_events(
                        filter=q.get("filter", "all"),
                        page=int(q.get("page", "0")),
                        page_size=int(q.get("page_size", "50")),
                    )
                    return self._send_json(200, doc)
                if len(parts) == 4 and parts[1] == "events" and parts[3] == "spectrogram":
                    png = service.event_spectrogram_png(parts[2], pad_s=float(q.get("pad_s", "2.0")))
                    return self._send(200, png, "image/png")
                if len(parts) == 4 and parts[1] == "events" and parts[3] == "audio":
                    wav = service.event_audio_wav(parts[2], pad_s=float(q.get("pad_s", "2.0")))
                    return self._send(200, wav, "audio/wav")
                if parts[1:] == ["rubric"]:
                    return self._send_json(200, service.rubric())
                if parts[1:] == ["progress"]:
                    return self._send_json(200, service.progress())
                return self._error(404, "not_found", f"no route for {self.path}")
            except KeyError as e:
                return self._error(404, "not_found", str(e))
            except ValueError as e:
                return self._error(400, "bad_request", str(e))

        def do_POST(self):
            parts = self._route()
            try:
                if len(parts) == 4 and parts[:2] == ["api", "events"] and parts[3] == "score":
                    length = int(self.headers.get("Content-Length", "0"))
                    try:
                        body = json.loads(self.rfile.read(length) or b"{}")
                    except json.JSONDecodeError as e:
                        return self._error(400, "bad_request", f"body is not valid JSON: {e}")
                    stored = service.submit_score(
                        parts[2], body.get("score"), body.get("annotator", "anonymous")
                    )
                    return self._send_json(200, stored)
                if parts == ["api", "export"]:
                    return self._send_json(200, service.export_training())
                return self._error(404, "not_found", f"no route for {self.path}")
            except KeyError as e:
                return self._error(404, "not_found", str(e))
            except ValueError as e:
                return self._error(400, "bad_request", str(e))

        def _static(self, rel: str) -> None:
            if service.ui_dir is None:
                if rel == "index.html":
                    return self._send(200, _PLACEHOLDER_PAGE, "text/html; charset=utf-8")
                return self._error(404, "not_found", "no UI assets installed")
            full = os.path.realpath(os.path.join(service.ui_dir, rel))
            if not full.startswith(service.ui_dir + os.sep) and full != service.ui_dir:
                return self._error(404, "not_found", "path escapes UI directory")
            if os.path.isdir(full):
                full = os.path.join(full, "index.html")
            if not os.path.isfile(full):
                return self._error(404, "not_found", f"no asset {rel!r}")
            ext = os.path.splitext(full)[1].lower()
            with open(full, "rb") as f:
                body = f.read()
            return self._send(200, body, _CONTENT_TYPES.get(ext, "application/octet-stream"))

    return Handler


def make_server(service: AnnotationService, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """Bind (but do not start) an HTTP server for the service."""
    return ThreadingHTTPServer((host, port), _make_handler(service))
