"""Scripted stand-ins for human testers.

Each tester plans with breadth-first search over game states and emits a
deterministic action string with a recognizable interaction signature:
probing walls, rushing the key, or attacking the door first.
"""
from __future__ import annotations

from collections import deque

from .engine import DIRECTIONS, Game, RUNNING

PLAN_LIMIT = 200000


class PlanError(RuntimeError):
    pass


def plan_to_contact(game: Game, state, eta1: str, exclude_cells=(), max_nodes=PLAN_LIMIT):
    """Shortest action path whose final step touches an `eta1` sprite."""
    targets = set(game.desc.leaves(eta1))
    excluded = set(exclude_cells)
    queue = deque([(state, "")])
    seen = {state.key()}
    nodes = 0
    while queue and nodes < max_nodes:
        cur, path = queue.popleft()
        if cur.status != RUNNING:
            continue
        for action in DIRECTIONS:
            nxt, zetas, _ = game.step(cur, action)
            for zeta in zetas:
                if zeta.eta1 in targets and zeta.pos not in excluded:
                    return path + action, nxt, zeta.pos
            key = nxt.key()
            if key not in seen:
                seen.add(key)
                nodes += 1
                queue.append((nxt, path + action))
    raise PlanError(f"no path to {eta1!r} contact")


def _walk(game, state, actions):
    for action in actions:
        state, _, _ = game.step(state, action)
    return state


def key_rusher(game: Game, level_text: str) -> str:
    """Straight to the key, then straight to the door."""
    state = game.initial_state(level_text)
    to_key, state, _ = plan_to_contact(game, state, "key")
    to_goal, state, _ = plan_to_contact(game, state, "goal")
    return to_key + to_goal


def wall_prober(game: Game, level_text: str, cells: int = 3, bumps: int = 2) -> str:
    """Bump several distinct wall cells repeatedly, then finish the level."""
    state = game.initial_state(level_text)
    actions = []
    probed = []
    for _ in range(cells):
        try:
            path, state, cell = plan_to_contact(game, state, "wall", exclude_cells=probed)
        except PlanError:
            break
        probed.append(cell)
        actions.append(path)
        # repeating the same move re-bumps the wall in place
        repeat = path[-1] * (bumps - 1)
        state = _walk(game, state, repeat)
        actions.append(repeat)
    to_key, state, _ = plan_to_contact(game, state, "key")
    to_goal, state, _ = plan_to_contact(game, state, "goal")
    return "".join(actions) + to_key + to_goal


def door_attacker(game: Game, level_text: str, bumps: int = 3) -> str:
    """Attack the closed door first, then fetch the key and enter."""
    state = game.initial_state(level_text)
    to_goal, state, _ = plan_to_contact(game, state, "goal")
    repeat = to_goal[-1] * (bumps - 1)
    state = _walk(game, state, repeat)
    to_key, state, _ = plan_to_contact(game, state, "key")
    enter, state, _ = plan_to_contact(game, state, "goal")
    return to_goal + repeat + to_key + enter


TESTERS = {
    "key-rusher": key_rusher,
    "wall-prober": wall_prober,
    "door-attacker": door_attacker,
}
