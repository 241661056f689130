/** DOM glue: wires the state machine, keymap and API client to the page.
 * All decisions live in state.ts/keymap.ts; this file only renders and
 * forwards events, so the logic stays testable without a browser.
 */

import { ApiClient, ApiError, Rubric } from "./api.js";
import { barsDescending, histogramTotal } from "./histogram.js";
import { actionForKey } from "./keymap.js";
import {
  ReviewState,
  back,
  beginSubmit,
  currentEvent,
  initialState,
  invalidKey,
  skip,
  submitFailed,
  submitSucceeded,
} from "./state.js";

const api = new ApiClient("");
let state: ReviewState | null = null;
let rubric: Rubric = {};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function render(): void {
  if (!state) {
    return;
  }
  const event = currentEvent(state);
  const review = el<HTMLDivElement>("review");
  const done = el<HTMLDivElement>("complete");
  review.hidden = event === null;
  done.hidden = event !== null;

  el<HTMLSpanElement>("progress-line").textContent =
    `${state.labeledCount}/${state.totalCount} labeled - queue ${Math.min(
      state.index + 1,
      state.events.length,
    )}/${state.events.length} (${state.filter})`;

  const banner = el<HTMLDivElement>("banner");
  if (state.banner) {
    banner.hidden = false;
    banner.className = `banner ${state.banner.kind}`;
    banner.textContent =
      state.banner.kind === "retry"
        ? `Submit failed: ${state.banner.message} - press 0-4 to retry`
        : state.banner.message;
  } else {
    banner.hidden = true;
  }

  if (event) {
    el<HTMLImageElement>("spectrogram").src = api.spectrogramUrl(event.event_id);
    el<HTMLAudioElement>("audio").src = api.audioUrl(event.event_id);
    const started = event.start_utc.replace("T", " ").replace("+00:00", "Z");
    const snr =
      event.snr_db === null ? "n/a" : `${event.snr_db.toFixed(1)} / ${event.snr_p25_db?.toFixed(1)} dB`;
    el<HTMLDivElement>("metadata").textContent =
      `${event.event_id} - ${started} - ${event.duration_s.toFixed(1)} s - ` +
      `${event.n_pulses} pulses - SNR(p5/p25) ${snr}` +
      (event.labeled ? ` - current score ${event.score}` : "");
  }
  el<HTMLDivElement>("pending").hidden = !state.pending;
}

function renderRubric(): void {
  const bar = el<HTMLDivElement>("rubric");
  bar.replaceChildren(
    ...Object.keys(rubric)
      .sort()
      .map((key) => {
        const item = document.createElement("span");
        item.className = "rubric-key";
        item.textContent = `${key}: ${rubric[key]}`;
        return item;
      }),
    Object.assign(document.createElement("span"), {
      className: "rubric-key",
      textContent: "s: skip - b: back",
    }),
  );
}

async function refreshProgressView(): Promise<void> {
  const progress = await api.progress();
  el<HTMLSpanElement>("histogram-total").textContent =
    `${progress.labeled}/${progress.total} labeled (${histogramTotal(progress.by_score)} scored)`;
  const box = el<HTMLDivElement>("histogram");
  const max = Math.max(1, ...Object.values(progress.by_score));
  box.replaceChildren(
    ...barsDescending(progress.by_score).map(({ score, count }) => {
      const row = document.createElement("div");
      row.className = "hist-row";
      const label = document.createElement("span");
      label.className = "hist-label";
      label.textContent = `score ${score}`;
      const bar = document.createElement("div");
      bar.className = "hist-bar";
      bar.style.width = `${(count / max) * 240}px`;
      const n = document.createElement("span");
      n.textContent = String(count);
      row.append(label, bar, n);
      return row;
    }),
  );
}

async function submit(score: number): Promise<void> {
  if (!state) {
    return;
  }
  const event = currentEvent(state);
  const next = beginSubmit(state, score);
  if (!event || !next) {
    return;
  }
  state = next;
  render();
  try {
    const stored = await api.submitScore(event.event_id, score, annotator());
    state = submitSucceeded(state, stored.score);
  } catch (err) {
    const message = err instanceof ApiError ? err.message : "service unreachable";
    state = submitFailed(state, message);
  }
  render();
  void refreshProgressView();
}

function annotator(): string {
  return el<HTMLInputElement>("annotator").value.trim() || "anonymous";
}

function onKey(ev: KeyboardEvent): void {
  if (!state || (ev.target instanceof HTMLInputElement)) {
    return;
  }
  const action = actionForKey(ev.key);
  switch (action.type) {
    case "score":
      void submit(action.score);
      break;
    case "skip":
      state = skip(state);
      render();
      break;
    case "back":
      state = back(state);
      render();
      break;
    case "invalid":
      state = invalidKey(state, action.key);
      render();
      break;
    case "none":
      break;
  }
}

async function exportTraining(): Promise<void> {
  const status = el<HTMLSpanElement>("export-status");
  try {
    const result = await api.exportTraining();
    status.textContent =
      `wrote ${result.rows} rows to ${result.path}` +
      (result.skipped.length ? ` (${result.skipped.length} without features skipped)` : "");
  } catch (err) {
    status.textContent = err instanceof ApiError ? `export failed: ${err.message}` : "service offline";
  }
}

async function boot(): Promise<void> {
  try {
    rubric = await api.rubric();
    renderRubric();
    const listing = await api.listEvents("unlabeled");
    state = initialState(listing.events, listing.progress, "unlabeled");
    render();
    await refreshProgressView();
  } catch {
    el<HTMLDivElement>("banner").hidden = false;
    el<HTMLDivElement>("banner").className = "banner retry";
    el<HTMLDivElement>("banner").textContent = "Annotation service offline";
  }
  document.addEventListener("keydown", onKey);
  el<HTMLButtonElement>("export").addEventListener("click", () => void exportTraining());
  el<HTMLButtonElement>("reload").addEventListener("click", () => void boot());
}

void boot();
