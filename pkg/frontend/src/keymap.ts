/** Keyboard contract of the review loop: one keystroke per decision. */

export type KeyAction =
  | { type: "score"; score: number }
  | { type: "skip" }
  | { type: "back" }
  | { type: "invalid"; key: string }
  | { type: "none" };

export function actionForKey(key: string): KeyAction {
  if (key >= "0" && key <= "4" && key.length === 1) {
    return { type: "score", score: key.charCodeAt(0) - 48 };
  }
  if (key === "s") {
    return { type: "skip" };
  }
  if (key === "b") {
    return { type: "back" };
  }
  // other printable keys get an explicit hint; modifiers stay silent
  if (key.length === 1) {
    return { type: "invalid", key };
  }
  return { type: "none" };
}
