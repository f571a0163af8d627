import type { SessionApi } from "./api.js";
import type { Action, FinishResponse, InteractionPayload, StatePayload } from "./types.js";
import { bumped, viewModel, type ViewModel } from "./render.js";

/**
 * One active session per controller.  At most one action request is in
 * flight; keystrokes arriving meanwhile are queued in order.  The view
 * is recomputed only from server payloads.
 */
export class SessionController {
  private sessionId: string | null = null;
  private state: StatePayload | null = null;
  private queue: Action[] = [];
  private inFlight = false;
  private finished = false;
  readonly interactionLog: InteractionPayload[] = [];
  actionCount = 0;

  constructor(
    private readonly api: SessionApi,
    private readonly onView: (view: ViewModel) => void,
    private readonly onError: (message: string) => void = () => {},
  ) {}

  get view(): ViewModel | null {
    return this.state === null ? null : viewModel(this.state);
  }

  async start(game: string, level: number): Promise<void> {
    const created = await this.api.createSession(game, level);
    this.sessionId = created.session_id;
    this.state = created.state;
    this.queue = [];
    this.inFlight = false;
    this.finished = false;
    this.interactionLog.length = 0;
    this.actionCount = 0;
    this.onView(viewModel(this.state));
  }

  /** Queue an action; rejected keys never get here. */
  enqueue(action: Action): void {
    if (this.sessionId === null || this.finished) {
      return;
    }
    if (this.state !== null && !this.state.legal_actions.includes(action)) {
      this.onError(`action ${action} not available in this game`);
      return;
    }
    this.queue.push(action);
    void this.pump();
  }

  private async pump(): Promise<void> {
    if (this.inFlight || this.sessionId === null) {
      return;
    }
    const action = this.queue.shift();
    if (action === undefined) {
      return;
    }
    this.inFlight = true;
    try {
      const prev = this.state;
      const resp = await this.api.sendAction(this.sessionId, action);
      this.state = resp.state;
      // the server records an action only while the game is running
      if (prev === null || prev.status === "Running") {
        this.actionCount += 1;
      }
      this.interactionLog.push(...resp.interactions);
      this.onView(viewModel(resp.state, bumped(prev, resp.state, action)));
    } catch (err) {
      this.onError(err instanceof Error ? err.message : String(err));
    } finally {
      this.inFlight = false;
      void this.pump();
    }
  }

  async finish(): Promise<FinishResponse> {
    if (this.sessionId === null) {
      throw new Error("no active session");
    }
    const done = await this.api.finish(this.sessionId);
    this.finished = true;
    return done;
  }
}
