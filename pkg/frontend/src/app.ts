import { SessionApi } from "./api.js";
import { actionForKey } from "./keymap.js";
import { describeInteraction, type ViewModel } from "./render.js";
import { SessionController } from "./session.js";

const TILE = 36;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function drawView(view: ViewModel): void {
  const board = el<HTMLDivElement>("board");
  board.style.width = `${view.width * TILE}px`;
  board.style.height = `${view.height * TILE}px`;
  board.textContent = "";
  for (const tile of view.tiles) {
    const node = document.createElement("div");
    node.className = "tile";
    node.style.left = `${tile.x * TILE}px`;
    node.style.top = `${tile.y * TILE}px`;
    node.style.color = tile.color;
    node.textContent = tile.glyph;
    node.title = tile.title;
    board.appendChild(node);
  }
  el("status").textContent =
    `${view.status}  tick ${view.tick}  ${view.avatarState}` + (view.bump ? "  (bump)" : "");
  el("status").className = view.status === "Running" ? "" : view.status.toLowerCase();
}

function showError(message: string): void {
  const banner = el("error");
  banner.textContent = message;
  banner.hidden = message === "";
}

async function main(): Promise<void> {
  const api = new SessionApi("");
  const controller = new SessionController(api, drawView, showError);
  const log = el<HTMLUListElement>("log");

  const listing = await api.listGames();
  const gameSelect = el<HTMLSelectElement>("game");
  for (const game of listing.games) {
    for (let level = 0; level < game.levels; level += 1) {
      const option = document.createElement("option");
      option.value = `${game.id}:${level}`;
      option.textContent = `${game.title} L${level + 1}`;
      gameSelect.appendChild(option);
    }
  }

  el<HTMLButtonElement>("start").addEventListener("click", async () => {
    showError("");
    log.textContent = "";
    const [game, level] = gameSelect.value.split(":");
    try {
      await controller.start(game, Number(level));
    } catch (err) {
      showError(err instanceof Error ? err.message : String(err));
    }
  });

  el<HTMLButtonElement>("save").addEventListener("click", async () => {
    try {
      const done = await controller.finish();
      const blob = new Blob([JSON.stringify(done.trajectory) + "\n"], {
        type: "application/jsonl",
      });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `session-${done.session_id}.jsonl`;
      link.click();
      el("status").textContent = `saved ${done.actions.length} actions`;
    } catch (err) {
      showError(err instanceof Error ? err.message : String(err));
    }
  });

  document.addEventListener("keydown", (event) => {
    const action = actionForKey(event.key);
    if (action === null) {
      return;
    }
    event.preventDefault();
    showError("");
    controller.enqueue(action);
    const view = controller.view;
    if (view !== null) {
      const last = controller.interactionLog[controller.interactionLog.length - 1];
      if (last !== undefined) {
        const item = document.createElement("li");
        item.textContent = describeInteraction(last);
        log.prepend(item);
      }
    }
  });
}

if (typeof document !== "undefined") {
  void main();
}
