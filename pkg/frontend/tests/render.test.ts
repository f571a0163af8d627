import { describe, expect, it } from "vitest";

import { bumped, describeInteraction, viewModel } from "../src/render.js";
import type { StatePayload } from "../src/types.js";

function payload(overrides: Partial<StatePayload> = {}): StatePayload {
  return {
    schema_version: 1,
    width: 6,
    height: 7,
    cells: [
      { pos: [0, 0], sprites: ["wall"] },
      { pos: [3, 3], sprites: ["key"] },
      { pos: [4, 5], sprites: ["goal"] },
    ],
    avatar: { pos: [1, 1], dir: "D", state: "nokey", alive: true },
    tick: 0,
    status: "Running",
    legal_actions: ["U", "D", "L", "R", "X", "N"],
    ...overrides,
  };
}

describe("view model", () => {
  it("is a pure projection of the payload", () => {
    const view = viewModel(payload());
    expect(view.width).toBe(6);
    expect(view.height).toBe(7);
    expect(view.tiles).toHaveLength(4); // 3 cells + avatar
    expect(view.status).toBe("Running");
    expect(viewModel(payload())).toEqual(view);
  });

  it("marks the avatar with a direction triangle", () => {
    for (const [dir, glyph] of [["U", "▲"], ["D", "▼"], ["L", "◀"], ["R", "▶"]] as const) {
      const view = viewModel(payload({ avatar: { pos: [1, 1], dir, state: "nokey", alive: true } }));
      const avatar = view.tiles.find((t) => t.x === 1 && t.y === 1);
      expect(avatar?.glyph).toBe(glyph);
    }
  });

  it("drops the avatar tile when dead", () => {
    const view = viewModel(payload({ avatar: { pos: [1, 1], dir: "D", state: "nokey", alive: false } }));
    expect(view.tiles).toHaveLength(3);
  });

  it("renders the top sprite of a stack and lists the rest in the title", () => {
    const view = viewModel(payload({ cells: [{ pos: [2, 2], sprites: ["water", "debris"] }] }));
    const tile = view.tiles.find((t) => t.x === 2 && t.y === 2);
    expect(tile?.glyph).toBe("░");
    expect(tile?.title).toBe("water, debris");
  });

  it("gives unknown sprites a stable fallback glyph", () => {
    const view = viewModel(payload({ cells: [{ pos: [0, 0], sprites: ["portal"] }] }));
    expect(view.tiles[0].glyph).toBe("p");
    expect(view.tiles[0].color).toMatch(/^hsl\(/);
  });
});

describe("bump detection", () => {
  it("flags a move that left the avatar in place", () => {
    const prev = payload();
    const next = payload({ tick: 1 });
    expect(bumped(prev, next, "U")).toBe(true);
  });

  it("ignores waits, uses and actual moves", () => {
    const prev = payload();
    const moved = payload({ tick: 1, avatar: { pos: [1, 2], dir: "D", state: "nokey", alive: true } });
    expect(bumped(prev, payload({ tick: 1 }), "N")).toBe(false);
    expect(bumped(prev, payload({ tick: 1 }), "X")).toBe(false);
    expect(bumped(prev, moved, "D")).toBe(false);
    expect(bumped(null, moved, "D")).toBe(false);
  });
});

describe("interaction labels", () => {
  it("prints both sprites and the contact cell", () => {
    const text = describeInteraction({
      eta0: "avatar",
      eta1: "wall",
      pos: [1, 0],
      dir: "U",
      type: "Move",
      avatar_state: "nokey",
    });
    expect(text).toBe("avatar -> wall (Move, nokey) at <1,0>");
  });
});
