/** Typed client for the annotation service HTTP API. */
export class ApiError extends Error {
    constructor(status, code, detail) {
        super(detail);
        this.status = status;
        this.code = code;
    }
}
async function asJson(resp) {
    if (!resp.ok) {
        let code = "error";
        let detail = `HTTP ${resp.status}`;
        try {
            const body = (await resp.json());
            code = body.error ?? code;
            detail = body.detail ?? detail;
        }
        catch {
            // non-JSON error body; keep the status text
        }
        throw new ApiError(resp.status, code, detail);
    }
    return (await resp.json());
}
export class ApiClient {
    constructor(base = "", fetchFn = (input, init) => fetch(input, init)) {
        this.base = base;
        this.fetchFn = fetchFn;
    }
    listEvents(filter, page = 0, pageSize = 200) {
        const q = new URLSearchParams({
            filter,
            page: String(page),
            page_size: String(pageSize),
        });
        return this.fetchFn(`${this.base}/api/events?${q}`).then((r) => asJson(r));
    }
    submitScore(eventId, score, annotator) {
        return this.fetchFn(`${this.base}/api/events/${encodeURIComponent(eventId)}/score`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ score, annotator }),
        }).then((r) => asJson(r));
    }
    rubric() {
        return this.fetchFn(`${this.base}/api/rubric`).then((r) => asJson(r));
    }
    progress() {
        return this.fetchFn(`${this.base}/api/progress`).then((r) => asJson(r));
    }
    exportTraining() {
        return this.fetchFn(`${this.base}/api/export`, { method: "POST" }).then((r) => asJson(r));
    }
    spectrogramUrl(eventId, padS = 2.0) {
        return `${this.base}/api/events/${encodeURIComponent(eventId)}/spectrogram?pad_s=${padS}`;
    }
    audioUrl(eventId, padS = 2.0) {
        return `${this.base}/api/events/${encodeURIComponent(eventId)}/audio?pad_s=${padS}`;
    }
}
