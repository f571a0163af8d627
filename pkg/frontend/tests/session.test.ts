import { describe, expect, it } from "vitest";

import { ApiError, SessionApi } from "../src/api.js";
import { SessionController } from "../src/session.js";
import type { ActionResponse, StatePayload } from "../src/types.js";
import type { ViewModel } from "../src/render.js";

function statePayload(x: number, tick: number, status: StatePayload["status"] = "Running"): StatePayload {
  return {
    schema_version: 1,
    width: 6,
    height: 7,
    cells: [{ pos: [0, 0], sprites: ["wall"] }],
    avatar: { pos: [x, 1], dir: "R", state: "nokey", alive: true },
    tick,
    status,
    legal_actions: ["U", "D", "L", "R", "N"],
  };
}

interface Pending {
  url: string;
  body: unknown;
  resolve: (resp: Response) => void;
}

/** fetch stub that parks every request until the test releases it. */
function fakeFetch() {
  const pending: Pending[] = [];
  const impl = (url: string, init?: RequestInit): Promise<Response> =>
    new Promise((resolve) => {
      pending.push({
        url,
        body: init?.body === undefined ? null : JSON.parse(String(init.body)),
        resolve,
      });
    });
  const release = (status: number, payload: unknown) => {
    const req = pending.shift();
    if (req === undefined) {
      throw new Error("no request in flight");
    }
    req.resolve(
      new Response(JSON.stringify(payload), {
        status,
        headers: { "content-type": "application/json" },
      }),
    );
  };
  return { impl, pending, release };
}

async function startedController(fetcher = fakeFetch()) {
  const views: ViewModel[] = [];
  const errors: string[] = [];
  const api = new SessionApi("http://test", fetcher.impl);
  const controller = new SessionController(api, (v) => views.push(v), (e) => errors.push(e));
  const starting = controller.start("a", 0);
  fetcher.release(201, { session_id: "s1", state: statePayload(1, 0) });
  await starting;
  return { controller, views, errors, fetcher };
}

describe("session controller", () => {
  it("renders only server payloads", async () => {
    const { controller, views, fetcher } = await startedController();
    expect(views).toHaveLength(1);
    controller.enqueue("R");
    const resp: ActionResponse = {
      session_id: "s1",
      state: statePayload(2, 1),
      interactions: [
        { eta0: "avatar", eta1: "floor", pos: [2, 1], dir: "R", type: "Move", avatar_state: "nokey" },
      ],
    };
    fetcher.release(200, resp);
    await Promise.resolve();
    await new Promise((r) => setTimeout(r));
    expect(views).toHaveLength(2);
    expect(views[1].tiles.some((t) => t.x === 2 && t.y === 1)).toBe(true);
    expect(controller.interactionLog).toHaveLength(1);
    expect(controller.actionCount).toBe(1);
  });

  it("keeps at most one request in flight and preserves order", async () => {
    const { controller, fetcher } = await startedController();
    controller.enqueue("R");
    controller.enqueue("D");
    controller.enqueue("D");
    expect(fetcher.pending).toHaveLength(1);
    expect((fetcher.pending[0].body as { action: string }).action).toBe("R");
    fetcher.release(200, { session_id: "s1", state: statePayload(2, 1), interactions: [] });
    await new Promise((r) => setTimeout(r));
    expect(fetcher.pending).toHaveLength(1);
    expect((fetcher.pending[0].body as { action: string }).action).toBe("D");
    fetcher.release(200, { session_id: "s1", state: statePayload(2, 2), interactions: [] });
    await new Promise((r) => setTimeout(r));
    fetcher.release(200, { session_id: "s1", state: statePayload(2, 3), interactions: [] });
    await new Promise((r) => setTimeout(r));
    expect(fetcher.pending).toHaveLength(0);
    expect(controller.actionCount).toBe(3);
  });

  it("rejects actions the server did not declare legal", async () => {
    const { controller, errors, fetcher } = await startedController();
    controller.enqueue("X"); // not in legal_actions of the fake payload
    expect(fetcher.pending).toHaveLength(0);
    expect(errors).toHaveLength(1);
    expect(errors[0]).toContain("X");
  });

  it("surfaces server errors without changing the view", async () => {
    const { controller, views, errors, fetcher } = await startedController();
    controller.enqueue("R");
    fetcher.release(409, { detail: "game is over (Win)" });
    await new Promise((r) => setTimeout(r));
    expect(errors).toHaveLength(1);
    expect(errors[0]).toContain("game is over");
    expect(views).toHaveLength(1);
    expect(controller.view?.tick).toBe(0);
  });

  it("finishes and blocks further input", async () => {
    const { controller, fetcher } = await startedController();
    const finishing = controller.finish();
    fetcher.release(200, {
      session_id: "s1",
      trajectory: { version: 1, game: "a", level: 0, actions: "", tester: "browser" },
      path: null,
      actions: "",
    });
    const done = await finishing;
    expect(done.trajectory.version).toBe(1);
    controller.enqueue("R");
    expect(fetcher.pending).toHaveLength(0);
  });
});

describe("api client", () => {
  it("raises typed errors with the server detail", async () => {
    const fetcher = fakeFetch();
    const api = new SessionApi("http://test", fetcher.impl);
    const creating = api.createSession("zzz", 0);
    fetcher.release(404, { detail: "unknown game 'zzz'" });
    await expect(creating).rejects.toThrowError(ApiError);
    await expect(
      (async () => {
        const again = api.createSession("zzz", 0);
        fetcher.release(404, { detail: "unknown game 'zzz'" });
        return again;
      })(),
    ).rejects.toThrowError(/unknown game/);
  });
});
