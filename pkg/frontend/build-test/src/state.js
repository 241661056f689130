/** Review queue state machine.
 *
 * Pure transitions over an immutable state object so every rule is unit
 * testable: exactly one current event (or the completion view past the
 * end), at most one in-flight submission, and the queue only advances
 * after the service acknowledges a score -- a failed submit keeps the
 * same event current and raises a retry banner.
 */
export function initialState(events, progress, filter = "unlabeled") {
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
export function currentEvent(state) {
    return state.index < state.events.length ? state.events[state.index] : null;
}
export function isComplete(state) {
    return state.index >= state.events.length;
}
/** Mark a submission in flight; no-op (returns null) if one already is. */
export function beginSubmit(state, score) {
    if (state.pending || currentEvent(state) === null) {
        return null;
    }
    return { ...state, pending: true, lastSubmittedScore: score, banner: null };
}
/** Service acknowledged the score: record it and advance. */
export function submitSucceeded(state, score) {
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
export function submitFailed(state, message) {
    return { ...state, pending: false, banner: { kind: "retry", message } };
}
export function skip(state) {
    if (state.pending || isComplete(state)) {
        return state;
    }
    return { ...state, index: state.index + 1, banner: null };
}
export function back(state) {
    if (state.pending || state.index === 0) {
        return state;
    }
    return { ...state, index: state.index - 1, banner: null };
}
export function invalidKey(state, key) {
    return { ...state, banner: { kind: "hint", message: `"${key}" does nothing here: 0-4 score, s skip, b back` } };
}
