import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiClient, ApiError } from "../src/api.js";
function stubFetch(status, body, calls) {
    return (input, init) => {
        calls.push({ input, init });
        return Promise.resolve(new Response(JSON.stringify(body), {
            status,
            headers: { "Content-Type": "application/json" },
        }));
    };
}
test("listEvents builds the query string and parses the listing", async () => {
    const calls = [];
    const listing = { events: [], page: 2, page_size: 10, matched: 0, progress: { labeled: 1, total: 4 } };
    const client = new ApiClient("", stubFetch(200, listing, calls));
    const got = await client.listEvents("unlabeled", 2, 10);
    assert.equal(calls[0].input, "/api/events?filter=unlabeled&page=2&page_size=10");
    assert.deepEqual(got.progress, { labeled: 1, total: 4 });
});
test("submitScore posts JSON with score and annotator", async () => {
    const calls = [];
    const stored = { event_id: "e1", score: 4, annotator: "dr", labeled_at: "t" };
    const client = new ApiClient("", stubFetch(200, stored, calls));
    const got = await client.submitScore("e1", 4, "dr");
    assert.equal(calls[0].input, "/api/events/e1/score");
    assert.equal(calls[0].init?.method, "POST");
    assert.deepEqual(JSON.parse(String(calls[0].init?.body)), { score: 4, annotator: "dr" });
    assert.equal(got.score, 4);
});
test("service errors surface as ApiError with code and detail", async () => {
    const calls = [];
    const client = new ApiClient("", stubFetch(400, { error: "bad_request", detail: "score must be 0..4" }, calls));
    await assert.rejects(() => client.submitScore("e1", 9, "dr"), (err) => {
        assert.ok(err instanceof ApiError);
        assert.equal(err.status, 400);
        assert.equal(err.code, "bad_request");
        assert.match(err.message, /0\.\.4/);
        return true;
    });
});
test("media URLs embed the event id and padding", () => {
    const client = new ApiClient("");
    assert.equal(client.spectrogramUrl("a b", 1.5), "/api/events/a%20b/spectrogram?pad_s=1.5");
    assert.equal(client.audioUrl("e1"), "/api/events/e1/audio?pad_s=2");
});
