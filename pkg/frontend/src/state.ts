/** Review queue state machine.
 *
 * Pure transitions over an immutable state object so every rule is unit
 * testable: exactly one current event (or the completion view past the
 * end), at most one in-flight submission, and the queue only advances
 * after the service acknowledges a score -- a failed submit keeps the
 * same event current and raises a retry banner.
 */

import { EventSummary } from "./api.js";

export type Banner =
  | { kind: "retry"; message: string }
  | { kind: "hint"; message: string }
  | null;

export interface ReviewState {
  events: EventSummary[];
  index: number; // == events.length means the completion view
  filter: "unlabeled" | "labeled" | "all";
  labeledCount: number;
  totalCount: number;
  lastSubmittedScore: number | null;
  pending: boolean;
  banner: Banner;
}

export function initialState(
  events: EventSummary[],
  progress: { labeled: number; total: number },
  filter: ReviewState["filter"] = "unlabeled",
): ReviewState {
  return {
    events,
    index: 0,
    filter,
    labeledCount: progress.labeled,
    totalCount: progress.total,
    lastSubmittedScore: null,
    pending: false,
    banner: null,
  };
}

export function currentEvent(state: ReviewState): EventSummary | null {
  return state.index < state.events.length ? state.events[state.index] : null;
}

export function isComplete(state: ReviewState): boolean {
  return state.index >= state.events.length;
}

/** Mark a submission in flight; no-op (returns null) if one already is. */
export function beginSubmit(state: ReviewState, score: number): ReviewState | null {
  if (state.pending || currentEvent(state) === null) {
    return null;
  }
  return { ...state, pending: true, lastSubmittedScore: score, banner: null };
}

/** Service acknowledged the score: record it and advance. */
export function submitSucceeded(state: ReviewState, score: number): ReviewState {
  const events = state.events.slice();
  const wasLabeled = events[state.index].labeled;
  events[state.index] = { ...events[state.index], labeled: true, score };
  return {
    ...state,
    events,
    index: state.index + 1,
    labeledCount: state.labeledCount + (wasLabeled ? 0 : 1),
    pending: false,
    banner: null,
  };
}

/** Submission failed: same event stays current, retry offered. */
export function submitFailed(state: ReviewState, message: string): ReviewState {
  return { ...state, pending: false, banner: { kind: "retry", message } };
}

export function skip(state: ReviewState): ReviewState {
  if (state.pending || isComplete(state)) {
    return state;
  }
  return { ...state, index: state.index + 1, banner: null };
}

export function back(state: ReviewState): ReviewState {
  if (state.pending || state.index === 0) {
    return state;
  }
  return { ...state, index: state.index - 1, banner: null };
}

export function invalidKey(state: ReviewState, key: string): ReviewState {
  return { ...state, banner: { kind: "hint", message: `"${key}" does nothing here: 0-4 score, s skip, b back` } };
}
