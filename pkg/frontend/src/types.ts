/** Message shapes published by the session service (schema version 1). */

export type Action = "U" | "D" | "L" | "R" | "X" | "N";
export type Direction = "U" | "D" | "L" | "R";
export type Status = "Running" | "Win" | "Lose";

export interface CellPayload {
  pos: [number, number];
  sprites: string[];
}

export interface AvatarPayload {
  pos: [number, number];
  dir: Direction;
  state: string;
  alive: boolean;
}

export interface StatePayload {
  schema_version: number;
  width: number;
  height: number;
  cells: CellPayload[];
  avatar: AvatarPayload;
  tick: number;
  status: Status;
  legal_actions: Action[];
}

export interface InteractionPayload {
  eta0: string;
  eta1: string;
  pos: [number, number];
  dir: Direction;
  type: "Move" | "Use";
  avatar_state: string;
}

export interface CreateResponse {
  session_id: string;
  state: StatePayload;
}

export interface ActionResponse {
  session_id: string;
  state: StatePayload;
  interactions: InteractionPayload[];
}

export interface TrajectoryRecord {
  version: number;
  game: string;
  level: number;
  actions: string;
  tester?: string;
}

export interface FinishResponse {
  session_id: string;
  trajectory: TrajectoryRecord;
  path: string | null;
  actions: string;
}

export interface GameListing {
  id: string;
  title: string;
  levels: number;
}
