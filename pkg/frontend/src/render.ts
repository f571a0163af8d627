import type { Direction, InteractionPayload, StatePayload } from "./types.js";

/**
 * Pure view model: every field is derived from the last server payload
 * and nothing else.  The DOM layer just prints these tiles.
 */
export interface Tile {
  x: number;
  y: number;
  glyph: string;
  color: string;
  title: string;
}

export interface ViewModel {
  width: number;
  height: number;
  tiles: Tile[];
  tick: number;
  status: string;
  avatarState: string;
  legalActions: string[];
  bump: boolean;
}

const GLYPHS: Record<string, { glyph: string; color: string }> = {
  wall: { glyph: "█", color: "#7a7a7a" },
  key: { glyph: "⚷", color: "#d4a017" },
  goal: { glyph: "▩", color: "#2e8b57" },
  water: { glyph: "≈", color: "#3a7bd5" },
  fire: { glyph: "♨", color: "#d54e21" },
  debris: { glyph: "░", color: "#9b8b70" },
  sword: { glyph: "†", color: "#b0c4de" },
};

const AVATAR_GLYPH: Record<Direction, string> = {
  U: "▲",
  D: "▼",
  L: "◀",
  R: "▶",
};

function spriteStyle(name: string): { glyph: string; color: string } {
  if (name in GLYPHS) {
    return GLYPHS[name];
  }
  // unknown sprites stay visible: first letter, hue from the name
  let h = 0;
  for (const ch of name) {
    h = (h * 31 + ch.codePointAt(0)!) % 360;
  }
  return { glyph: name[0] ?? "?", color: `hsl(${h}, 60%, 45%)` };
}

/** True when the avatar stayed put on a move, i.e. it bumped something. */
export function bumped(prev: StatePayload | null, next: StatePayload, sent: string): boolean {
  if (prev === null || sent === "N" || sent === "X") {
    return false;
  }
  return prev.avatar.pos[0] === next.avatar.pos[0] && prev.avatar.pos[1] === next.avatar.pos[1];
}

export function viewModel(state: StatePayload, bump = false): ViewModel {
  const tiles: Tile[] = [];
  for (const cell of state.cells) {
    const top = cell.sprites[cell.sprites.length - 1];
    const style = spriteStyle(top);
    tiles.push({
      x: cell.pos[0],
      y: cell.pos[1],
      glyph: style.glyph,
      color: style.color,
      title: cell.sprites.join(", "),
    });
  }
  if (state.avatar.alive) {
    tiles.push({
      x: state.avatar.pos[0],
      y: state.avatar.pos[1],
      glyph: AVATAR_GLYPH[state.avatar.dir],
      color: "#e0e0e0",
      title: state.avatar.state,
    });
  }
  return {
    width: state.width,
    height: state.height,
    tiles,
    tick: state.tick,
    status: state.status,
    avatarState: state.avatar.state,
    legalActions: [...state.legal_actions],
    bump,
  };
}

export function describeInteraction(zeta: InteractionPayload): string {
  return `${zeta.eta0} -> ${zeta.eta1} (${zeta.type}, ${zeta.avatar_state}) at <${zeta.pos[0]},${zeta.pos[1]}>`;
}
