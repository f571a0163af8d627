import type {
  Action,
  ActionResponse,
  CreateResponse,
  FinishResponse,
  GameListing,
  StatePayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

/** Thin typed wrapper over the session endpoints; no game logic. */
export class SessionApi {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, init);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, String(body?.detail ?? resp.statusText));
    }
    return body as T;
  }

  listGames(): Promise<{ games: GameListing[] }> {
    return this.request("/games");
  }

  createSession(game: string, level: number): Promise<CreateResponse> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ game, level }),
    });
  }

  getState(sessionId: string): Promise<{ session_id: string; state: StatePayload }> {
    return this.request(`/sessions/${sessionId}/state`);
  }

  sendAction(sessionId: string, action: Action): Promise<ActionResponse> {
    return this.request(`/sessions/${sessionId}/actions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ action }),
    });
  }

  finish(sessionId: string): Promise<FinishResponse> {
    return this.request(`/sessions/${sessionId}/finish`, { method: "POST" });
  }
}
