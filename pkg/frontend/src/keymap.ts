import type { Action } from "./types.js";

/**
 * Keyboard bindings.  The map is total over the declared keys and
 * everything else maps to null so strays never reach the server.
 */
const BINDINGS: Record<string, Action> = {
  ArrowUp: "U",
  ArrowDown: "D",
  ArrowLeft: "L",
  ArrowRight: "R",
  " ": "X",
  x: "X",
  X: "X",
  ".": "N",
};

export function actionForKey(key: string): Action | null {
  return Object.prototype.hasOwnProperty.call(BINDINGS, key) ? BINDINGS[key] : null;
}

export function declaredKeys(): string[] {
  return Object.keys(BINDINGS);
}
