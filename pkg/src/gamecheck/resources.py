"""Access to the bundled game fixtures (descriptions, levels, graphs, faults)."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .engine import Game

FIXTURES = Path(__file__).parent / "fixtures"


@dataclass
class GameBundle:
    """Everything shipped for one game, with file contents already loaded."""

    game_id: str
    title: str
    game: Game
    description_text: str
    levels: list[str]
    graphs: list[dict]
    constraints: dict
    faults: dict | None
    modifications: list[dict]

    def graph_for_level(self, level_index: int) -> dict:
        """Scenario graph for a 0-based level index (shared graph or per level)."""
        if len(self.graphs) == 1:
            return self.graphs[0]
        return self.graphs[level_index]


def _read(rel: str) -> str:
    return (FIXTURES / rel).read_text()


def load_manifest() -> dict:
    return json.loads(_read("games.json"))


def game_ids() -> list[str]:
    return sorted(load_manifest()["games"])


def load_game(game_id: str) -> GameBundle:
    manifest = load_manifest()
    try:
        entry = manifest["games"][game_id]
    except KeyError:
        raise KeyError(f"unknown game {game_id!r}; have {sorted(manifest['games'])}") from None
    description_text = _read(entry["description"])
    faults_path = FIXTURES / entry["faults"]
    return GameBundle(
        game_id=game_id,
        title=entry["title"],
        game=Game.from_text(description_text),
        description_text=description_text,
        levels=[_read(p) for p in entry["levels"]],
        graphs=[json.loads(_read(p)) for p in entry["graphs"]],
        constraints=json.loads(_read(entry["constraints"])),
        faults=json.loads(faults_path.read_text()) if faults_path.exists() else None,
        modifications=entry["modifications"],
    )


def verbatim_description(name: str) -> str:
    return _read(f"verbatim/{name}.txt")
