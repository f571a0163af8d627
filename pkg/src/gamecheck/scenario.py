"""Scenario graphs and the synthetic goal pipeline.

A scenario graph encodes how a level is meant to progress: nodes are game
milestones, edges carry the abstract interaction that realizes the step.
Paths through the graph (under a coverage criterion) become feature
sequences; each sequence is then multiplied by single-feature modifications
so the generated testers also probe what is *not* on the intended path.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .engine import GameState, MOVE
from .goals import Goal, GoalEntry, GoalSequence, exploration_feature
from .interactions import Feature

EDGE_COVERAGE = "edge"
EDGE_PAIR_COVERAGE = "edge-pair"
PRIME_PATH_COVERAGE = "prime-path"
ALL_PATH_COVERAGE = "all-path"
COVERAGES = (EDGE_COVERAGE, EDGE_PAIR_COVERAGE, PRIME_PATH_COVERAGE, ALL_PATH_COVERAGE)

GRAPH_VERSION = 1

MAIN_CRITERION = 100.0
EXPLORATION_CRITERION = 0.0


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    feature: Feature  # abstract: eta0, eta1, type, avatar_state only
    post: tuple = ()


@dataclass
class ScenarioGraph:
    nodes: list[str]
    initial: str
    final: list[str]
    edges: list[Edge]

    def __post_init__(self):
        names = set(self.nodes)
        if self.initial not in names:
            raise ScenarioError(f"initial node {self.initial!r} not declared")
        for f in self.final:
            if f not in names:
                raise ScenarioError(f"final node {f!r} not declared")
        ids = set()
        for e in self.edges:
            if e.src not in names or e.dst not in names:
                raise ScenarioError(f"edge {e.id!r} references unknown node")
            if e.id in ids:
                raise ScenarioError(f"duplicate edge id {e.id!r}")
            ids.add(e.id)

    def out_edges(self, node: str) -> list[Edge]:
        return [e for e in self.edges if e.src == node]

    def edge_by_id(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise ScenarioError(f"no edge {edge_id!r}")

    @classmethod
    def from_json(cls, data: dict) -> "ScenarioGraph":
        if data.get("version") != GRAPH_VERSION:
            raise ScenarioError(f"unsupported graph version {data.get('version')!r}")
        edges = []
        for e in data["edges"]:
            r = e["realizer"]
            feature = Feature(
                eta0=r["eta0"], eta1=r["eta1"], type=r["type"], avatar_state=r["avatar_state"]
            )
            post = tuple(tuple(sorted(p.items()))[0] for p in e.get("post", []))
            edges.append(Edge(id=e["id"], src=e["src"], dst=e["dst"], feature=feature, post=post))
        return cls(nodes=list(data["nodes"]), initial=data["initial"], final=list(data["final"]), edges=edges)


# ---------------------------------------------------------------------------
# Coverage criteria over node paths.  A path is a node sequence in which
# consecutive pairs are edges; a single node is a path of length 0.


def _reachable(graph: ScenarioGraph) -> set[str]:
    seen = {graph.initial}
    frontier = [graph.initial]
    while frontier:
        node = frontier.pop()
        for e in graph.out_edges(node):
            if e.dst not in seen:
                seen.add(e.dst)
                frontier.append(e.dst)
    return seen

def _paths_up_to(graph: ScenarioGraph, max_edges: int, starts) -> list[tuple[str, ...]]:
    out = []

    def walk(node, path):
        out.append(tuple(path))
        if len(path) - 1 >= max_edges:
            return
        for e in graph.out_edges(node):
            walk(e.dst, path + [e.dst])

    for start in starts:
        walk(start, [start])
    return out


def has_cycle(graph: ScenarioGraph) -> bool:
    color: dict[str, int] = {}

    def visit(node):
        color[node] = 1
        for e in graph.out_edges(node):
            c = color.get(e.dst, 0)
            if c == 1 or (c == 0 and visit(e.dst)):
                return True
        color[node] = 2
        return False

    return any(visit(n) for n in graph.nodes if color.get(n, 0) == 0)


def prime_paths(graph: ScenarioGraph) -> list[tuple[str, ...]]:
    """Simple paths that are maximal: not a subpath of any other simple path.
    Simple cycles (first node = last node) count as simple paths."""
    simple: set[tuple[str, ...]] = set()

    def walk(node, path, visited):
        simple.add(tuple(path))
        for e in graph.out_edges(node):
            if e.dst == path[0]:
                simple.add(tuple(path) + (e.dst,))
            if e.dst not in visited:
                walk(e.dst, path + [e.dst], visited | {e.dst})

    for start in graph.nodes:
        walk(start, [start], {start})

    def subpath(p, q):
        n, m = len(q), len(p)
        return any(q[i : i + m] == p for i in range(n - m + 1))

    return sorted(p for p in simple if not any(q != p and subpath(p, q) for q in simple))


def all_paths(graph: ScenarioGraph) -> list[tuple[str, ...]]:
    """Every initial-to-final path; requires an acyclic graph."""
    if has_cycle(graph):
        raise ScenarioError("all-path coverage requires an acyclic graph")
    finals = set(graph.final)
    return sorted(
        p for p in _paths_up_to(graph, len(graph.nodes), [graph.initial])
        if p[-1] in finals
    )


def coverage_paths(graph: ScenarioGraph, criterion: str) -> list[tuple[str, ...]]:
    """The node paths a test suite must cover under the given criterion."""
    if criterion not in COVERAGES:
        raise ScenarioError(f"unknown coverage criterion {criterion!r}")
    if criterion == EDGE_COVERAGE:
        return sorted(set(_paths_up_to(graph, 1, _reachable(graph))))
    if criterion == EDGE_PAIR_COVERAGE:
        return sorted(set(_paths_up_to(graph, 2, _reachable(graph))))
    if criterion == PRIME_PATH_COVERAGE:
        return prime_paths(graph)
    return all_paths(graph)


# ---------------------------------------------------------------------------
# Feature sequences and modifications.


def path_to_features(path, graph: ScenarioGraph) -> tuple[Feature, ...]:
    """Abstract feature sequence for a node path (one feature per edge)."""
    feats = []
    for src, dst in zip(path, path[1:]):
        for e in graph.out_edges(src):
            if e.dst == dst:
                feats.append(e.feature)
                break
        else:
            raise ScenarioError(f"no edge {src!r} -> {dst!r}")
    return tuple(feats)


def modification_list(graph: ScenarioGraph, mod_config: list[dict], base: tuple[Feature, ...]):
    """Single-feature probes not already on the base path.

    `mod_config` rows come from the game manifest: one mover sprite with the
    second sprites, interaction types and avatar states to combine.
    """
    base_keys = {f.match_key() for f in base}
    mods: list[Feature] = []
    seen = set(base_keys)
    for row in mod_config:
        eta0 = row["eta0"]
        for eta1, itype, state in product(row["eta1"], row["types"], row["states"]):
            if eta1 == eta0:
                continue
            f = Feature(eta0=eta0, eta1=eta1, type=itype, avatar_state=state)
            if f.match_key() in seen:
                continue
            seen.add(f.match_key())
            mods.append(f)
    return mods


def insert_modifications(base: tuple[Feature, ...], mods: list[Feature]):
    """All sequences made by inserting one modification at one position,
    plus the unmodified base.  Yields M*K + 1 sequences for M positions
    (len(base)) and K modifications."""
    out = [tuple(base)]
    for mod in mods:
        for i in range(len(base)):
            out.append(tuple(base[: i + 1]) + (mod,) + tuple(base[i + 1 :]))
    return out


# ---------------------------------------------------------------------------
# Concretization: abstract feature sequences become runnable goal sequences.

ABUNDANT_COUNT = 5
REP_SCARCE = 2
REP_ABUNDANT = 1
REP_MOVABLE = 3
DEFAULT_WEIGHT = 1.0
DEFAULT_METHOD = "All"


def concretize_feature(feature: Feature, census: dict[str, int], movable: set[str]) -> Feature:
    """Pick weight, method and rep for an abstract feature.

    Movable second sprites get extra repetitions since they shift around;
    abundant sprites (walls) need only one contact per cell.
    """
    if feature.eta1 in movable:
        rep = REP_MOVABLE
    elif census.get(feature.eta1, 0) >= ABUNDANT_COUNT:
        rep = REP_ABUNDANT
    else:
        rep = REP_SCARCE
    return feature.concretized(weight=DEFAULT_WEIGHT, method=DEFAULT_METHOD, rep=rep)


def sequence_to_goals(
    features: tuple[Feature, ...],
    initial: GameState,
    movable: set[str],
    meta: dict | None = None,
) -> GoalSequence:
    """One goal per feature, each with the exploration feature alongside."""
    census = initial.census()
    goals = []
    for feature in features:
        concrete = concretize_feature(feature, census, movable)
        goals.append(
            Goal(
                [
                    GoalEntry(concrete, MAIN_CRITERION),
                    GoalEntry(exploration_feature(feature.avatar_state), EXPLORATION_CRITERION),
                ]
            )
        )
    return GoalSequence(goals=goals, meta=dict(meta or {}))


def generate_goal_sequences(
    graph: ScenarioGraph,
    mod_config: list[dict],
    initial: GameState,
    movable: set[str],
    coverage: str = ALL_PATH_COVERAGE,
    meta: dict | None = None,
) -> list[GoalSequence]:
    """Full synthetic pipeline: paths -> modified feature sequences -> goals."""
    sequences: list[GoalSequence] = []
    paths = [p for p in coverage_paths(graph, coverage) if len(p) > 1]
    for p, path in enumerate(paths):
        base = path_to_features(path, graph)
        mods = modification_list(graph, mod_config, base)
        for s, feats in enumerate(insert_modifications(base, mods)):
            m = dict(meta or {})
            m.update({"path": p, "variant": s})
            sequences.append(sequence_to_goals(feats, initial, movable, meta=m))
    return sequences
