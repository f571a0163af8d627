"""Session service for interactive trajectory recording.

One session owns one engine instance.  Clients create a session, poll the
serialized state, post one action at a time, and finish to persist the
trajectory in the engine's recording format.
"""
from __future__ import annotations

import json
import os
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .engine import ACTIONS, NIL, RUNNING, Game, GameState, dump_trajectory
from .resources import FIXTURES, load_game

SERVE_SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "GAMECHECK_OUTPUT_DIR"


def serve_schema() -> dict:
    return json.loads((FIXTURES / "serve_schema.json").read_text())


def legal_actions(game: Game, state: GameState) -> list[str]:
    out = list("UDLR")
    if game.desc.sword_for(state.avatar_state):
        out.append("X")
    out.append("N")
    return out


def serialize_state(game: Game, state: GameState) -> dict:
    cells = [
        {"pos": list(pos), "sprites": list(names)}
        for pos, names in sorted(state.cells.items())
        if names
    ]
    return {
        "schema_version": SERVE_SCHEMA_VERSION,
        "width": state.width,
        "height": state.height,
        "cells": cells,
        "avatar": {
            "pos": list(state.avatar_pos),
            "dir": state.avatar_dir,
            "state": state.avatar_state,
            "alive": state.avatar_alive,
        },
        "tick": state.tick,
        "status": state.status,
        "legal_actions": legal_actions(game, state),
    }


def serialize_interaction(zeta) -> dict:
    return {
        "eta0": zeta.eta0,
        "eta1": zeta.eta1,
        "pos": list(zeta.pos),
        "dir": zeta.dir,
        "type": zeta.type,
        "avatar_state": zeta.avatar_state,
    }


@dataclass
class Session:
    session_id: str
    game_id: str
    level: int
    game: Game
    state: GameState
    actions: list[str] = field(default_factory=list)
    interactions: list[list] = field(default_factory=list)
    finished: bool = False


class CreateRequest(BaseModel):
    game: str
    level: int = 0


class ActionRequest(BaseModel):
    action: str


def create_app(output_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="gamecheck session service")
    sessions: dict[str, Session] = {}
    out = output_dir if output_dir is not None else os.environ.get(OUTPUT_DIR_ENV)

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.get("/schema")
    def schema():
        return serve_schema()

    @app.get("/games")
    def games():
        from .resources import game_ids

        out_games = []
        for gid in game_ids():
            bundle = load_game(gid)
            out_games.append({"id": gid, "title": bundle.title, "levels": len(bundle.levels)})
        return {"schema_version": SERVE_SCHEMA_VERSION, "games": out_games}

    @app.post("/sessions", status_code=201)
    def create(req: CreateRequest):
        try:
            bundle = load_game(req.game)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown game {req.game!r}")
        if not 0 <= req.level < len(bundle.levels):
            raise HTTPException(status_code=404, detail=f"game {req.game!r} has no level {req.level}")
        session_id = uuid.uuid4().hex
        game = bundle.game
        sessions[session_id] = Session(
            session_id, req.game, req.level, game, game.initial_state(bundle.levels[req.level])
        )
        return {"session_id": session_id, "state": serialize_state(game, sessions[session_id].state)}

    @app.get("/sessions/{session_id}/state")
    def state(session_id: str):
        session = get_session(session_id)
        return {"session_id": session_id, "state": serialize_state(session.game, session.state)}

    @app.post("/sessions/{session_id}/actions")
    def act(session_id: str, req: ActionRequest):
        session = get_session(session_id)
        if session.finished:
            raise HTTPException(status_code=409, detail="session already finished")
        if req.action not in ACTIONS:
            raise HTTPException(status_code=422, detail=f"unknown action {req.action!r}")
        if session.state.status != RUNNING and req.action != NIL:
            raise HTTPException(status_code=409, detail=f"game is over ({session.state.status})")
        if session.state.status != RUNNING:
            # Nil on a terminal state is a no-op rather than an error so
            # clients can keep polling after the game ends.
            zetas = []
        else:
            session.state, zetas, _ = session.game.step(session.state, req.action)
            session.actions.append(req.action)
            session.interactions.append(zetas)
        return {
            "session_id": session_id,
            "state": serialize_state(session.game, session.state),
            "interactions": [serialize_interaction(z) for z in zetas],
        }

    @app.post("/sessions/{session_id}/finish")
    def finish(session_id: str):
        session = get_session(session_id)
        if session.finished:
            raise HTTPException(status_code=409, detail="session already finished")
        session.finished = True
        line = dump_trajectory(session.game_id, session.level, session.actions, tester="browser")
        path = None
        if out is not None:
            folder = Path(out) / "sessions"
            folder.mkdir(parents=True, exist_ok=True)
            target = folder / f"{session_id}.jsonl"
            with target.open("a") as fh:
                fh.write(line + "\n")
            path = str(target)
        return {
            "session_id": session_id,
            "trajectory": json.loads(line),
            "path": path,
            "actions": "".join(session.actions),
        }

    return app
