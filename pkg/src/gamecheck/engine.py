"""Deterministic grid engine for the VGDL subset.

One `step` applies a single avatar action, resolves every sprite contact in
textual rule order and reports every contact as an Interaction, whether or
not a rule fired for it.  The engine never randomizes: replaying the same
action sequence yields byte-identical traces.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .vgdl import GameDescription, VGDLError, parse_description

UP, DOWN, LEFT, RIGHT, USE, NIL = "U", "D", "L", "R", "X", "N"
DIRECTIONS = (UP, DOWN, LEFT, RIGHT)
ACTIONS = (UP, DOWN, LEFT, RIGHT, USE, NIL)
DELTA = {UP: (0, -1), DOWN: (0, 1), LEFT: (-1, 0), RIGHT: (1, 0)}

MOVE, USE_TYPE = "Move", "Use"

RUNNING, WIN, LOSE = "Running", "Win", "Lose"

FLOOR = "floor"

TRAJECTORY_VERSION = 1


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class Interaction:
    """An observed contact: first sprite, second sprite, where, which way."""

    eta0: str
    eta1: str
    pos: tuple[int, int]
    dir: str
    type: str = MOVE
    avatar_state: str | None = None

    @property
    def mover_is_avatar(self) -> bool:
        return self.eta0 == "avatar"

    def key(self):
        return (self.eta0, self.eta1, self.type, self.avatar_state)


@dataclass
class GameState:
    width: int
    height: int
    cells: dict[tuple[int, int], list[str]]
    avatar_pos: tuple[int, int]
    avatar_dir: str
    avatar_state: str
    counts: dict[str, int] = field(default_factory=dict)  # cell sprites only
    tick: int = 0
    status: str = RUNNING
    avatar_alive: bool = True

    def copy(self) -> "GameState":
        # shallow: cell stacks are treated as immutable and replaced, never
        # mutated in place
        return GameState(
            self.width, self.height, dict(self.cells),
            self.avatar_pos, self.avatar_dir, self.avatar_state,
            dict(self.counts), self.tick, self.status, self.avatar_alive,
        )

    def in_grid(self, pos=None) -> bool:
        x, y = pos if pos is not None else self.avatar_pos
        return 0 <= x < self.width and 0 <= y < self.height

    def sprites_at(self, pos) -> list[str]:
        return self.cells.get(pos, [])

    def count(self, leaf_names) -> int:
        n = sum(self.counts.get(name, 0) for name in leaf_names)
        if self.avatar_alive and self.avatar_state in leaf_names:
            n += 1
        return n

    def census(self) -> dict[str, int]:
        out = {name: n for name, n in self.counts.items() if n}
        if self.avatar_alive:
            out[self.avatar_state] = out.get(self.avatar_state, 0) + 1
        return out

    def key(self):
        cells = tuple(sorted((pos, tuple(names)) for pos, names in self.cells.items() if names))
        return (self.avatar_pos, self.avatar_dir, self.avatar_state, self.avatar_alive, self.status, cells)


def parse_level(text: str, desc: GameDescription) -> GameState:
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise VGDLError("empty level")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise VGDLError("non-rectangular level grid")
    avatar_states = set(desc.avatar_states)
    cells: dict[tuple[int, int], list[str]] = {}
    avatar = None
    for y, row in enumerate(rows):
        for x, char in enumerate(row):
            if char not in desc.level_mapping:
                raise VGDLError(f"unmapped level character {char!r} at <{x},{y}>")
            stack = []
            for name in desc.level_mapping[char]:
                if name in avatar_states:
                    if avatar is not None:
                        raise VGDLError("multiple avatars in level")
                    avatar = ((x, y), name)
                else:
                    stack.append(name)
            if stack:
                cells[(x, y)] = stack
    if avatar is None:
        raise VGDLError("level has no avatar")
    (pos, state) = avatar
    counts: dict[str, int] = {}
    for stack in cells.values():
        for name in stack:
            counts[name] = counts.get(name, 0) + 1
    return GameState(
        width=width,
        height=len(rows),
        cells=cells,
        avatar_pos=pos,
        avatar_dir=UP,
        avatar_state=state,
        counts=counts,
        tick=0,
        status=RUNNING,
    )


class _Inst:
    __slots__ = ("name", "orig", "pos", "start_pos", "alive", "is_avatar", "is_sword")

    def __init__(self, name, pos, is_avatar=False, is_sword=False, orig=None):
        self.name = name
        self.orig = orig  # cell sprite name at tick start; None if spawned
        self.pos = pos
        self.start_pos = pos
        self.alive = True
        self.is_avatar = is_avatar
        self.is_sword = is_sword

    @property
    def moved(self):
        return self.pos != self.start_pos

    def move_dir(self):
        if not self.moved:
            return None
        dx = self.pos[0] - self.start_pos[0]
        dy = self.pos[1] - self.start_pos[1]
        for d, (ex, ey) in DELTA.items():
            if (dx, dy) == (ex, ey):
                return d
        return None


class Game:
    """A parsed description plus derived lookup tables used by the stepper."""

    def __init__(self, desc: GameDescription):
        self.desc = desc
        self._rule_sets = []
        for rule in desc.rules:
            first = frozenset(desc.leaves(rule.first))
            seconds = frozenset(n for s in rule.seconds for n in desc.leaves(s))
            self._rule_sets.append((first, seconds))
        self.avatar_states = list(desc.avatar_states)

    @classmethod
    def from_text(cls, text: str) -> "Game":
        return cls(parse_description(text))

    def initial_state(self, level_text: str) -> GameState:
        return parse_level(level_text, self.desc)

    def step(self, state: GameState, action: str):
        """Apply one action.  Returns (next_state, interactions, status)."""
        if action not in ACTIONS:
            raise EngineError(f"unknown action {action!r}")
        if state.status != RUNNING:
            raise EngineError(f"step on terminal state ({state.status})")
        if action == NIL:
            return state.copy(), [], state.status

        st = state.copy()
        interactions: list[Interaction] = []

        # Only cells a mover touches are materialized as instances; the rest
        # of the grid stays in st.cells untouched.
        insts: list[_Inst] = []
        touched: set[tuple[int, int]] = set()

        def materialize(pos):
            if pos in touched:
                return
            touched.add(pos)
            for name in st.cells.pop(pos, ()):
                insts.append(_Inst(name, pos, orig=name))

        avatar = _Inst(st.avatar_state, st.avatar_pos, is_avatar=True)
        avatar.alive = st.avatar_alive
        insts.append(avatar)
        materialize(st.avatar_pos)
        sword = None

        def occupants(pos, skip=None):
            materialize(pos)
            return [i for i in insts if i.alive and i.pos == pos and i is not skip and not i.is_avatar]

        def emit_arrival(mover, dirn, itype):
            """Record the contacts a mover makes at its current cell."""
            eta0 = "avatar" if (mover.is_avatar or mover.is_sword) else mover.name
            others = occupants(mover.pos, skip=mover)
            if not st.in_grid(mover.pos) and not others:
                interactions.append(
                    Interaction(eta0, FLOOR, mover.pos, dirn, itype, st.avatar_state)
                )
                return
            for other in others:
                interactions.append(
                    Interaction(eta0, other.name, mover.pos, dirn, itype, st.avatar_state)
                )

        if action in DIRECTIONS:
            st.avatar_dir = action
            avatar.pos = (avatar.pos[0] + DELTA[action][0], avatar.pos[1] + DELTA[action][1])
            emit_arrival(avatar, action, MOVE)
        else:  # USE
            stype = self.desc.sword_for(st.avatar_state)
            if stype is None:
                raise EngineError(f"Use not available: avatar state {st.avatar_state!r} has no stype")
            d = st.avatar_dir
            spos = (st.avatar_pos[0] + DELTA[d][0], st.avatar_pos[1] + DELTA[d][1])
            sword = _Inst(stype, spos, is_sword=True)
            insts.append(sword)
            emit_arrival(sword, d, USE_TYPE)

        self._apply_rules(st, insts, avatar, interactions, emit_arrival, materialize)

        # Write surviving materialized instances back into fresh cell stacks
        # and fold kills/transforms/spawns into the census.
        rebuilt: dict[tuple[int, int], list[str]] = {}
        counts = st.counts
        for inst in insts:
            if inst.is_avatar or inst.is_sword:
                continue
            if inst.alive:
                rebuilt.setdefault(inst.pos, []).append(inst.name)
                if inst.name != inst.orig:
                    counts[inst.name] = counts.get(inst.name, 0) + 1
                    if inst.orig is not None:
                        counts[inst.orig] -= 1
            elif inst.orig is not None:
                counts[inst.orig] -= 1
        for pos, names in rebuilt.items():
            existing = st.cells.get(pos)
            st.cells[pos] = list(existing) + names if existing else names
        st.avatar_pos = avatar.pos
        st.avatar_alive = avatar.alive
        st.avatar_state = avatar.name
        st.tick += 1

        for term in self.desc.terminations:
            if st.count(self.desc.leaves(term.stype)) == 0:
                st.status = WIN if term.win else LOSE
                break
        return st, interactions, st.status

    def _apply_rules(self, st, insts, avatar, interactions, emit_arrival, materialize):
        applied: set[tuple[int, int, int]] = set()
        ids = {id(i): n for n, i in enumerate(insts)}

        def inst_id(i):
            return ids.setdefault(id(i), len(ids))

        def contact_pairs():
            by_pos: dict[tuple[int, int], list[_Inst]] = {}
            for inst in insts:
                if inst.alive:
                    by_pos.setdefault(inst.pos, []).append(inst)
            pairs = []
            for pos in sorted(by_pos):
                group = by_pos[pos]
                for a in range(len(group)):
                    for b in range(a + 1, len(group)):
                        pairs.append((group[a], group[b]))
            return pairs

        for _round in range(200):
            fired = False
            pairs = contact_pairs()
            for ri, rule in enumerate(self.desc.rules):
                first_set, second_set = self._rule_sets[ri]
                for a, b in pairs:
                    if a.name in first_set and b.name in second_set:
                        first, second = a, b
                    elif b.name in first_set and a.name in second_set:
                        first, second = b, a
                    else:
                        continue
                    key = (ri, inst_id(first), inst_id(second))
                    if key in applied:
                        continue
                    applied.add(key)
                    self._apply_effect(st, rule, first, second, insts, avatar, emit_arrival)
                    fired = True
                    break
                if fired:
                    break
            if not fired:
                return
        raise EngineError("effect cascade did not settle")

    def _apply_effect(self, st, rule, first, second, insts, avatar, emit_arrival):
        effect = rule.effect
        if effect == "stepBack":
            first.pos = first.start_pos
        elif effect == "killSprite":
            first.alive = False
        elif effect == "killBoth":
            first.alive = False
            second.alive = False
        elif effect == "transformTo":
            first.name = rule.params["stype"]
            if rule.params.get("killSecond", "").lower() == "true":
                second.alive = False
        elif effect == "spawn":
            insts.append(_Inst(rule.params["stype"], first.pos))
        elif effect == "bounceForward":
            d = st.avatar_dir if second.is_avatar else second.move_dir()
            if d is None:
                return
            first.pos = (first.pos[0] + DELTA[d][0], first.pos[1] + DELTA[d][1])
            emit_arrival(first, d, MOVE)
        elif effect == "undoAll":
            for inst in insts:
                inst.pos = inst.start_pos
        elif effect == "killIfFromAboveNotMoving":
            if first.move_dir() == DOWN and not second.moved:
                first.alive = False
        else:  # pragma: no cover - parser rejects unknown effects
            raise EngineError(f"unhandled effect {effect!r}")


@dataclass
class ReplayResult:
    states: list[GameState]
    interactions: list[list[Interaction]]
    truncated_at: int | None = None

    @property
    def final(self) -> GameState:
        return self.states[-1]

    def all_interactions(self) -> list[Interaction]:
        return [z for step in self.interactions for z in step]


def replay(game: Game, level_text: str, actions) -> ReplayResult:
    """Run a recorded action sequence; truncates (and flags) at terminal states."""
    state = game.initial_state(level_text)
    states = [state]
    log: list[list[Interaction]] = []
    for i, action in enumerate(actions):
        if state.status != RUNNING:
            return ReplayResult(states, log, truncated_at=i)
        state, inter, _ = game.step(state, action)
        states.append(state)
        log.append(inter)
    return ReplayResult(states, log)


def dump_trajectory(game_id: str, level_id, actions, tester: str | None = None) -> str:
    record = {
        "version": TRAJECTORY_VERSION,
        "game": game_id,
        "level": level_id,
        "actions": "".join(actions),
    }
    if tester is not None:
        record["tester"] = tester
    return json.dumps(record, sort_keys=True)


def load_trajectories(text: str) -> list[dict]:
    records = []
    for line in text.splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        if record.get("version") != TRAJECTORY_VERSION:
            raise EngineError(f"unsupported trajectory version {record.get('version')!r}")
        bad = set(record["actions"]) - set(ACTIONS)
        if bad:
            raise EngineError(f"unknown action tokens {sorted(bad)}")
        record["actions"] = list(record["actions"])
        records.append(record)
    return records
