"""Runtime test oracle.

Judges every executed step against developer-supplied constraints and the
scenario graph.  The oracle owns only a scenario cursor and the previous
state; constraint evaluation itself is pure.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .engine import Game, GameState, LOSE, WIN, replay
from .scenario import ScenarioGraph

CONSTRAINTS_VERSION = 1

CONSTRAINT_TYPES = (
    "avatar_in_grid",
    "avatar_unique",
    "no_overlap",
    "pair_overlap",
    "count_change",
    "state_change",
    "win_at_final",
    "lose_cause",
)

SCENARIO_POST = "scenario-post"
SCENARIO_ORDER = "scenario-order"


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    constraint_id: str
    tick: int
    detail: str


@dataclass(frozen=True)
class Constraint:
    id: str
    type: str
    params: dict = field(default_factory=dict)


def load_constraints(data: dict) -> list[Constraint]:
    if data.get("version") != CONSTRAINTS_VERSION:
        raise OracleError(f"unsupported constraints version {data.get('version')!r}")
    out = []
    seen = set()
    for row in data["constraints"]:
        cid, ctype = row["id"], row["type"]
        if ctype not in CONSTRAINT_TYPES:
            raise OracleError(f"unknown constraint type {ctype!r}")
        if cid in seen:
            raise OracleError(f"duplicate constraint id {cid!r}")
        seen.add(cid)
        params = {k: v for k, v in row.items() if k not in ("id", "type")}
        out.append(Constraint(cid, ctype, params))
    return out


def _matches_realizer(edge, zeta) -> bool:
    # pushed sprites are emitted as the mover, so the pair is unordered
    realizer = edge.feature
    if zeta.type != realizer.type or zeta.avatar_state != realizer.avatar_state:
        return False
    return {zeta.eta0, zeta.eta1} == {realizer.eta0, realizer.eta1}


class Oracle:
    def __init__(self, game: Game, graph: ScenarioGraph, constraints):
        self.game = game
        self.graph = graph
        self.constraints = list(constraints)
        self.cursor = graph.initial
        self.prev: GameState | None = None

    def begin(self, state0: GameState) -> list[Violation]:
        self.cursor = self.graph.initial
        self.prev = state0
        return [v for v in self._static_checks(state0, tick=0)]

    def observe(self, state: GameState, interactions) -> list[Violation]:
        """Judge one executed step; advances the scenario cursor."""
        if self.prev is None:
            raise OracleError("observe before begin")
        prev = self.prev
        violations: list[Violation] = []
        realized = self._track(prev, state, interactions, violations)
        violations.extend(self._static_checks(state, state.tick))
        violations.extend(self._step_checks(prev, state, interactions, realized))
        self.prev = state
        return violations

    # -- scenario tracking

    def _track(self, prev, state, interactions, violations) -> set:
        realized: set[str] = set()
        for zeta in interactions:
            edge = next(
                (e for e in self.graph.out_edges(self.cursor) if _matches_realizer(e, zeta)),
                None,
            )
            if edge is not None:
                for key, value in edge.post:
                    if not self._post_holds(key, value, prev, state):
                        violations.append(
                            Violation(SCENARIO_POST, state.tick, f"edge {edge.id}: expected {key}={value!r}")
                        )
                self.cursor = edge.dst
                realized.add(edge.id)
                continue
            stray = next((e for e in self.graph.edges if _matches_realizer(e, zeta)), None)
            if stray is not None:
                violations.append(
                    Violation(SCENARIO_ORDER, state.tick, f"edge {stray.id} realized at node {self.cursor}")
                )
        return realized

    def _post_holds(self, key, value, prev, state) -> bool:
        if key == "avatar_state":
            return state.avatar_state == value
        if key == "status":
            return state.status == value
        leaves = self.game.desc.leaves(value) if key in ("removed", "added") else ()
        if key == "removed":
            return state.count(leaves) < prev.count(leaves)
        if key == "added":
            return state.count(leaves) > prev.count(leaves)
        raise OracleError(f"unknown postcondition {key!r}")

    # -- constraints

    def _static_checks(self, state, tick):
        desc = self.game.desc
        for c in self.constraints:
            if c.type == "avatar_in_grid":
                if state.avatar_alive and not state.in_grid():
                    yield Violation(c.id, tick, f"avatar at {state.avatar_pos}")
            elif c.type == "avatar_unique":
                census = state.census()
                n = sum(census.get(s, 0) for s in desc.avatar_states)
                if n > 1:
                    yield Violation(c.id, tick, f"{n} avatars present")
            elif c.type == "no_overlap":
                wanted_state = c.params.get("avatar_state")
                if wanted_state is not None and state.avatar_state != wanted_state:
                    continue
                leaves = set(desc.leaves(c.params["sprite"]))
                if state.avatar_alive and leaves & set(state.sprites_at(state.avatar_pos)):
                    yield Violation(c.id, tick, f"avatar overlaps {c.params['sprite']} at {state.avatar_pos}")
            elif c.type == "pair_overlap":
                a = set(desc.leaves(c.params["a"]))
                b = set(desc.leaves(c.params["b"]))
                for pos, names in state.cells.items():
                    present = set(names)
                    if present & a and present & b:
                        yield Violation(c.id, tick, f"{c.params['a']} overlaps {c.params['b']} at {pos}")
                        break

    def _step_checks(self, prev, state, interactions, realized):
        desc = self.game.desc
        for c in self.constraints:
            if c.type == "count_change":
                leaves = desc.leaves(c.params["sprite"])
                if state.count(leaves) != prev.count(leaves) and not realized & set(c.params["edges"]):
                    yield Violation(
                        c.id, state.tick,
                        f"{c.params['sprite']} count {prev.count(leaves)} -> {state.count(leaves)}",
                    )
            elif c.type == "state_change":
                if state.avatar_state != prev.avatar_state and not realized & set(c.params["edges"]):
                    yield Violation(c.id, state.tick, f"{prev.avatar_state} -> {state.avatar_state}")
            elif c.type == "win_at_final":
                if state.status == WIN and self.cursor not in self.graph.final:
                    yield Violation(c.id, state.tick, f"won at node {self.cursor}")
            elif c.type == "lose_cause":
                died = prev.avatar_alive and (not state.avatar_alive or state.status == LOSE)
                if not died:
                    continue
                harmful = {leaf for name in c.params["harmful"] for leaf in desc.leaves(name)}
                touched = {zeta.eta0 for zeta in interactions} | {zeta.eta1 for zeta in interactions}
                if not harmful & touched:
                    yield Violation(c.id, state.tick, "avatar died without harmful contact")


def check_trajectory(game: Game, level_text: str, actions, graph: ScenarioGraph, constraints) -> list[Violation]:
    """Replay a recorded run and judge every step."""
    oracle = Oracle(game, graph, constraints)
    result = replay(game, level_text, actions)
    violations = oracle.begin(result.states[0])
    for state, step in zip(result.states[1:], result.interactions):
        violations.extend(oracle.observe(state, step))
    return violations
