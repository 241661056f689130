import assert from "node:assert/strict";
import { test } from "node:test";
import { actionForKey } from "../src/keymap.js";
test("digits 0-4 submit the matching score", () => {
    for (let score = 0; score <= 4; score++) {
        assert.deepEqual(actionForKey(String(score)), { type: "score", score });
    }
});
test("s skips and b goes back", () => {
    assert.deepEqual(actionForKey("s"), { type: "skip" });
    assert.deepEqual(actionForKey("b"), { type: "back" });
});
test("other printable keys are flagged invalid", () => {
    assert.deepEqual(actionForKey("7"), { type: "invalid", key: "7" });
    assert.deepEqual(actionForKey("x"), { type: "invalid", key: "x" });
    assert.deepEqual(actionForKey("5"), { type: "invalid", key: "5" });
});
test("modifier and navigation keys stay silent", () => {
    assert.deepEqual(actionForKey("Shift"), { type: "none" });
    assert.deepEqual(actionForKey("ArrowDown"), { type: "none" });
    assert.deepEqual(actionForKey("Enter"), { type: "none" });
});
