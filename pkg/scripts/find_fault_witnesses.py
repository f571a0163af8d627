"""Find a shortest violation-triggering trajectory for every seeded fault.

Breadth-first search over (game state, scenario cursor) per mutant; the
found witnesses are frozen back into the fault manifests so tests can
assert every mutant is killed without re-searching.
"""
import argparse
import json
from collections import deque
from pathlib import Path

from gamecheck.engine import Game, RUNNING
from gamecheck.faults import load_faults, seed_faults
from gamecheck.oracle import Oracle, load_constraints
from gamecheck.resources import FIXTURES, game_ids, load_game
from gamecheck.scenario import ScenarioGraph
from gamecheck.vgdl import parse_description

ACTIONS = "UDLRX"


def find_witness(game, level_text, graph, constraints, max_depth=40, max_nodes=150000):
    init = game.initial_state(level_text)
    probe = Oracle(game, graph, constraints)
    if probe.begin(init):
        return ""
    queue = deque([(init, graph.initial, "")])
    seen = {(init.key(), graph.initial)}
    nodes = 0
    while queue and nodes < max_nodes:
        state, cursor, path = queue.popleft()
        if len(path) >= max_depth or state.status != RUNNING:
            continue
        for action in ACTIONS:
            nxt, zetas, _ = game.step(state, action)
            oracle = Oracle(game, graph, constraints)
            oracle.cursor = cursor
            oracle.prev = state
            if oracle.observe(nxt, zetas):
                return path + action
            key = (nxt.key(), oracle.cursor)
            if key not in seen:
                seen.add(key)
                nodes += 1
                queue.append((nxt, oracle.cursor, path + action))
    return None


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--games", nargs="*", default=list(game_ids()))
    args = parser.parse_args()

    for gid in args.games:
        bundle = load_game(gid)
        constraints = load_constraints(bundle.constraints)
        manifest_path = FIXTURES / "games" / gid / "faults.json"
        manifest = json.loads(manifest_path.read_text())
        specs = load_faults(manifest)
        mutants = seed_faults(bundle.description_text, specs)
        for row, mutant in zip(manifest["faults"], mutants):
            game = Game(parse_description(mutant.description))
            found = None
            for level_idx, level_text in enumerate(bundle.levels):
                graph = ScenarioGraph.from_json(bundle.graph_for_level(level_idx))
                witness = find_witness(game, level_text, graph, constraints)
                if witness is not None:
                    found = (level_idx, witness)
                    break
            if found is None:
                print(f"{gid} {mutant.fault_id}: NO WITNESS FOUND")
                continue
            row["witness_level"], row["witness"] = found
            print(f"{gid} {mutant.fault_id}: level {found[0]} {found[1]!r}")
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
