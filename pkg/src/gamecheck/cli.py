"""Command line entry points."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .engine import load_trajectories, replay
from .experiment import ExperimentConfig, MetricsReport, export_report, run_experiment
from .faults import load_faults, seed_faults
from .goalplay import AgentConfig
from .goals import dump_goal_sequences
from .irl import mgp_irl
from .oracle import check_trajectory, load_constraints
from .resources import game_ids, load_game
from .scenario import ScenarioGraph, generate_goal_sequences
from .server import OUTPUT_DIR_ENV, create_app
from .testers import TESTERS

OUTPUT_DIR_OPTION = click.option(
    "--output-dir", envvar=OUTPUT_DIR_ENV, default=None,
    help=f"Artifact directory (or ${OUTPUT_DIR_ENV}).",
)


@click.group()
def main():
    """Agent-based grid-game testing toolkit."""


def _write(text: str, output: str | None):
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


@main.command("gen-goals")
@click.option("--game", "game_id", required=True, type=click.Choice(game_ids()))
@click.option("--level", type=int, default=0, show_default=True)
@click.option("--modifications/--no-modifications", default=True, show_default=True,
              help="Apply the game's modification config (baseline omits it).")
@click.option("--output", default="-", show_default=True)
def gen_goals(game_id, level, modifications, output):
    """Generate synthetic goal sequences from a game's scenario graph."""
    bundle = load_game(game_id)
    graph = ScenarioGraph.from_json(bundle.graph_for_level(level))
    init = bundle.game.initial_state(bundle.levels[level])
    mods = bundle.modifications if modifications else []
    sequences = generate_goal_sequences(
        graph, mods, init, set(bundle.game.desc.movable_sprites()), meta={"level": level}
    )
    _write(dump_goal_sequences(sequences) + "\n", output)
    click.echo(f"{len(sequences)} sequences", err=True)


@main.command("extract")
@click.option("--game", "game_id", required=True, type=click.Choice(game_ids()))
@click.option("--trajectories", "traj_path", default=None,
              help="Trajectory file in engine format; defaults to --tester play.")
@click.option("--tester", type=click.Choice(sorted(TESTERS)), default=None)
@click.option("--level", type=int, default=0, show_default=True)
@click.option("--kappa-t", type=float, default=0.0, show_default=True)
@click.option("--output", default="-", show_default=True)
def extract(game_id, traj_path, tester, level, kappa_t, output):
    """Extract goal sequences from recorded trajectories."""
    bundle = load_game(game_id)
    plays: list[tuple[int, str, dict]] = []
    if traj_path is not None:
        for record in load_trajectories(Path(traj_path).read_text()):
            if record["game"] != game_id:
                raise click.ClickException(f"trajectory for game {record['game']!r}, expected {game_id!r}")
            plays.append((record["level"], record["actions"], {"tester": record.get("tester")}))
    elif tester is not None:
        plays.append((level, TESTERS[tester](bundle.game, bundle.levels[level]), {"tester": tester}))
    else:
        raise click.ClickException("need --trajectories or --tester")
    sequences = [
        mgp_irl(bundle.game, bundle.levels[lvl], actions, kappa_t, meta={**meta, "level": lvl})
        for lvl, actions, meta in plays
    ]
    _write(dump_goal_sequences(sequences) + "\n", output)
    click.echo(f"{len(sequences)} sequences", err=True)


@main.command("run")
@click.option("--game", "games", multiple=True, type=click.Choice(game_ids()), default=("a",), show_default=True)
@click.option("--cell", "cells", multiple=True, default=("synthetic-sarsa",), show_default=True,
              help="Agent matrix cell, e.g. synthetic-sarsa, humanlike-mcts, baseline-sarsa.")
@click.option("--kappa-t", "kappa_ts", multiple=True, type=float, default=(0.0, 0.5, 1.0), show_default=True)
@click.option("--tester", "testers", multiple=True, type=click.Choice(sorted(TESTERS)),
              default=("wall-prober", "key-rusher", "door-attacker"), show_default=True)
@click.option("--mcts-repeats", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--game-length", "game_lengths", multiple=True, type=int, default=None,
              help="Episode length sweep; repeatable.")
@click.option("--plateau-episodes", type=int, default=None)
@click.option("--max-episodes", type=int, default=None)
@OUTPUT_DIR_OPTION
@click.option("--report", "report_path", default=None, help="Where to write the structured report.")
def run(games, cells, kappa_ts, testers, mcts_repeats, seed, game_lengths,
        plateau_episodes, max_episodes, output_dir, report_path):
    """Run the full experiment matrix and print the report."""
    agent_kwargs = {"seed": seed, "stop_on_goal_failure": False}
    if game_lengths:
        agent_kwargs["game_lengths"] = tuple(game_lengths)
    if plateau_episodes is not None:
        agent_kwargs["plateau_episodes"] = plateau_episodes
    if max_episodes is not None:
        agent_kwargs["max_episodes"] = max_episodes
    cfg = ExperimentConfig(
        games=tuple(games), cells=tuple(cells), kappa_ts=tuple(kappa_ts),
        testers=tuple(testers), mcts_repeats=mcts_repeats,
        agent=AgentConfig(**agent_kwargs), output_dir=output_dir,
    )
    report = run_experiment(cfg)
    structured = export_report(report, "structured")
    if report_path:
        Path(report_path).write_text(structured)
    elif output_dir:
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        (Path(output_dir) / "report.json").write_text(structured)
    click.echo(export_report(report, "table-text"), nl=False)


@main.command("replay")
@click.option("--game", "game_id", required=True, type=click.Choice(game_ids()))
@click.option("--level", type=int, default=0, show_default=True)
@click.option("--actions", default=None, help="Action string, e.g. DDRRDDR.")
@click.option("--trajectories", "traj_path", default=None, help="Trajectory file in engine format.")
@click.option("--check/--no-check", default=True, show_default=True,
              help="Judge the replay against the game's oracle constraints.")
def replay_cmd(game_id, level, actions, traj_path, check):
    """Replay recorded actions and print interactions and oracle verdicts."""
    bundle = load_game(game_id)
    plays = []
    if actions is not None:
        plays.append((level, actions))
    if traj_path is not None:
        plays.extend((r["level"], r["actions"]) for r in load_trajectories(Path(traj_path).read_text()))
    if not plays:
        raise click.ClickException("need --actions or --trajectories")
    failed = False
    for lvl, acts in plays:
        result = replay(bundle.game, bundle.levels[lvl], acts)
        out = {
            "game": game_id,
            "level": lvl,
            "actions": acts,
            "status": result.final.status,
            "interactions": [
                {"tick": t + 1, "eta0": z.eta0, "eta1": z.eta1, "pos": list(z.pos),
                 "dir": z.dir, "type": z.type, "avatar_state": z.avatar_state}
                for t, step in enumerate(result.interactions) for z in step
            ],
        }
        if check:
            graph = ScenarioGraph.from_json(bundle.graph_for_level(lvl))
            violations = check_trajectory(
                bundle.game, bundle.levels[lvl], acts, graph, load_constraints(bundle.constraints)
            )
            out["violations"] = [vars(v) for v in violations]
            failed = failed or bool(violations)
        click.echo(json.dumps(out, sort_keys=True))
    if failed:
        raise SystemExit(1)


@main.command("mutate")
@click.option("--game", "game_id", required=True, type=click.Choice(game_ids()))
@click.option("--fault-id", default=None, help="Print one mutant's description instead of the list.")
@OUTPUT_DIR_OPTION
def mutate(game_id, fault_id, output_dir):
    """List the game's seeded faults, or materialize mutant descriptions."""
    bundle = load_game(game_id)
    mutants = seed_faults(bundle.description_text, load_faults(bundle.faults))
    if fault_id is not None:
        for mutant in mutants:
            if mutant.fault_id == fault_id:
                click.echo(mutant.description, nl=False)
                return
        raise click.ClickException(f"unknown fault id {fault_id!r}")
    if output_dir is not None:
        folder = Path(output_dir) / game_id / "mutants"
        folder.mkdir(parents=True, exist_ok=True)
        for i, mutant in enumerate(mutants):
            (folder / f"{i:02d}.txt").write_text(mutant.description)
        click.echo(f"wrote {len(mutants)} mutants to {folder}", err=True)
    for mutant in mutants:
        click.echo(json.dumps(
            {"fault_id": mutant.fault_id, "op": mutant.spec.op, "rule": mutant.spec.rule},
            sort_keys=True,
        ))


@main.command("report")
@click.argument("report_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["table-text", "delimited", "structured"]),
              default="table-text", show_default=True)
def report_cmd(report_file, fmt):
    """Re-render a structured report file."""
    data = json.loads(Path(report_file).read_text())
    report = MetricsReport(
        games=data.get("games", {}),
        cross_entropy=data.get("cross_entropy", []),
        splits=data.get("splits", []),
    )
    click.echo(export_report(report, fmt), nl=False)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@OUTPUT_DIR_OPTION
def serve(host, port, output_dir):
    """Run the interactive session service."""
    import uvicorn

    uvicorn.run(create_app(output_dir), host=host, port=port)


if __name__ == "__main__":
    main()
