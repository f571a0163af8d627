"""End-to-end experiment harness.

Test suites are trajectories recorded by agents playing the clean games;
every seeded mutant is then judged by replaying those trajectories under
the oracle.  Human-like cells extract goals from scripted-tester
trajectories on three levels and play them on the held-out level.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .agents import run_goal_sequence
from .engine import Game, replay
from .faults import BugReport, dedupe_bugs, detection_rate, load_faults, seed_faults
from .goalplay import AgentConfig
from .irl import mgp_irl
from .metrics import cross_entropy, interaction_distribution, summarize_splits
from .oracle import Oracle, load_constraints
from .resources import load_game
from .scenario import ScenarioGraph, generate_goal_sequences
from .testers import TESTERS
from .vgdl import parse_description

KAPPA_THRESHOLDS = (0.0, 0.5, 1.0)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    games: tuple = ("a",)
    cells: tuple = ("synthetic-sarsa",)
    kappa_ts: tuple = KAPPA_THRESHOLDS
    testers: tuple = ("wall-prober", "key-rusher", "door-attacker")
    mcts_repeats: int = 5
    agent: AgentConfig = field(default_factory=AgentConfig)
    output_dir: str | None = None

    def validate(self):
        for cell in self.cells:
            parse_cell(cell)
        for name in self.testers:
            if name not in TESTERS:
                raise ConfigError(f"unknown tester {name!r}")
        for k in self.kappa_ts:
            if k < 0:
                raise ConfigError("kappa thresholds must be >= 0")


def parse_cell(cell: str) -> tuple[str, str]:
    """Split an agent-matrix cell name into (pipeline, agent)."""
    parts = cell.split("-")
    if len(parts) != 2 or parts[0] not in ("synthetic", "baseline", "humanlike") or parts[1] not in ("sarsa", "mcts"):
        raise ConfigError(f"unknown cell {cell!r}")
    return parts[0], parts[1]


@dataclass
class TrajectoryRecord:
    level: int
    actions: str
    score: float
    meta: dict = field(default_factory=dict)


def synthetic_suite(bundle, cfg: ExperimentConfig, agent: str, with_modifications: bool = True,
                    seed_offset: int = 0) -> list[TrajectoryRecord]:
    mods = bundle.modifications if with_modifications else []
    records = []
    for level_idx, level_text in enumerate(bundle.levels):
        graph = ScenarioGraph.from_json(bundle.graph_for_level(level_idx))
        init = bundle.game.initial_state(level_text)
        movable = set(bundle.game.desc.movable_sprites())
        sequences = generate_goal_sequences(graph, mods, init, movable, meta={"level": level_idx})
        for si, sequence in enumerate(sequences):
            acfg = AgentConfig(**{**vars(cfg.agent), "seed": cfg.agent.seed + seed_offset + si})
            result = run_goal_sequence(bundle.game, level_text, sequence, acfg, agent=agent)
            records.append(
                TrajectoryRecord(level_idx, result.actions, result.score,
                                 {"sequence": si, "agent": agent, "length": result.game_length})
            )
    return records


def humanlike_suite(bundle, cfg: ExperimentConfig, agent: str, kappa_t: float, seed_offset: int = 0):
    """Cross-level protocol: extract from three levels, play on the held-out one."""
    tester_plays = {
        name: [TESTERS[name](bundle.game, level) for level in bundle.levels]
        for name in cfg.testers
    }
    records: list[TrajectoryRecord] = []
    sequences = []
    ce_rows = []
    for held_out in range(len(bundle.levels)):
        for name in cfg.testers:
            agent_interactions = []
            for source in range(len(bundle.levels)):
                if source == held_out:
                    continue
                seq = mgp_irl(
                    bundle.game, bundle.levels[source], tester_plays[name][source],
                    kappa_t, meta={"tester": name, "level": source},
                )
                sequences.append(seq)
                acfg = AgentConfig(**{**vars(cfg.agent), "seed": cfg.agent.seed + seed_offset + len(records)})
                result = run_goal_sequence(bundle.game, bundle.levels[held_out], seq, acfg, agent=agent)
                records.append(
                    TrajectoryRecord(held_out, result.actions, result.score,
                                     {"tester": name, "kappa_t": kappa_t, "source": source, "agent": agent})
                )
                agent_interactions.extend(
                    replay(bundle.game, bundle.levels[held_out], result.actions).all_interactions()
                )
            human = replay(bundle.game, bundle.levels[held_out], tester_plays[name][held_out]).all_interactions()
            ce_rows.append({
                "tester": name,
                "held_out": held_out,
                "kappa_t": kappa_t,
                "cross_entropy": cross_entropy(
                    interaction_distribution(human), interaction_distribution(agent_interactions)
                ),
            })
    return records, sequences, ce_rows


def _judge(game, bundle, record, constraints):
    graph = ScenarioGraph.from_json(bundle.graph_for_level(record.level))
    oracle = Oracle(game, graph, constraints)
    result = replay(game, bundle.levels[record.level], record.actions)
    found = list(oracle.begin(result.states[0]))
    for state, step in zip(result.states[1:], result.interactions):
        found.extend(oracle.observe(state, step))
    return found


def evaluate_suite(bundle, records) -> dict:
    """Replay every recorded trajectory against every mutant."""
    constraints = load_constraints(bundle.constraints)
    mutants = seed_faults(bundle.description_text, load_faults(bundle.faults))
    clean_verdicts = [
        [vars(v) for v in _judge(bundle.game, bundle, record, constraints)] for record in records
    ]
    reports: list[BugReport] = []
    for mutant in mutants:
        game = Game(parse_description(mutant.description))
        for record in records:
            found = _judge(game, bundle, record, constraints)
            if found:
                first = found[0]
                reports.append(BugReport(mutant.fault_id, first.constraint_id, first.tick, first.detail))
    unique = dedupe_bugs(reports)
    return {
        "unique_bugs": unique,
        "bug_reports": [vars(r) for r in reports],
        "clean_verdicts": clean_verdicts,
        "detection_rate": detection_rate(unique, len(mutants)),
        "total_faults": len(mutants),
        "trajectories": len(records),
    }


def group_detection(cell_results) -> dict:
    """Union of the individual cells' bug sets."""
    bugs = sorted({b for r in cell_results for b in r["unique_bugs"]})
    total = max((r["total_faults"] for r in cell_results), default=0)
    return {"unique_bugs": bugs, "detection_rate": detection_rate(bugs, total), "total_faults": total}


@dataclass
class MetricsReport:
    games: dict = field(default_factory=dict)
    cross_entropy: list = field(default_factory=list)
    splits: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"games": self.games, "cross_entropy": self.cross_entropy, "splits": self.splits}


def run_experiment(cfg: ExperimentConfig) -> MetricsReport:
    cfg.validate()
    report = MetricsReport()
    for gid in cfg.games:
        bundle = load_game(gid)
        game_out: dict = {}
        for cell in cfg.cells:
            pipeline, agent = parse_cell(cell)
            repeats = cfg.mcts_repeats if agent == "mcts" else 1
            runs = []
            for rep in range(repeats):
                offset = rep * 100003
                if pipeline == "synthetic":
                    records = synthetic_suite(bundle, cfg, agent, True, offset)
                    runs.append((records, evaluate_suite(bundle, records)))
                elif pipeline == "baseline":
                    records = synthetic_suite(bundle, cfg, agent, False, offset)
                    runs.append((records, evaluate_suite(bundle, records)))
                else:
                    for kappa_t in cfg.kappa_ts:
                        records, sequences, ce_rows = humanlike_suite(bundle, cfg, agent, kappa_t, offset)
                        result = evaluate_suite(bundle, records)
                        result["kappa_t"] = kappa_t
                        runs.append((records, result))
                        for row in ce_rows:
                            report.cross_entropy.append({**row, "game": gid, "cell": cell})
                        summary = summarize_splits(sequences)
                        report.splits.append({"game": gid, "cell": cell, "kappa_t": kappa_t, **summary})
            results = [r for _, r in runs]
            game_out[cell] = {
                "runs": results,
                "mean_detection_rate": sum(r["detection_rate"] for r in results) / len(results),
                "union": group_detection(results),
            }
            if cfg.output_dir is not None:
                _persist(cfg.output_dir, gid, cell, runs)
        report.games[gid] = game_out
    return report


def _persist(output_dir, gid, cell, runs):
    from pathlib import Path

    from .engine import dump_trajectory

    folder = Path(output_dir) / gid / cell
    folder.mkdir(parents=True, exist_ok=True)
    lines = []
    for rep, (records, _) in enumerate(runs):
        for record in records:
            lines.append(dump_trajectory(gid, record.level, record.actions, tester=cell))
    (folder / "trajectories.jsonl").write_text("\n".join(lines) + "\n" if lines else "")
    (folder / "results.json").write_text(json.dumps([r for _, r in runs], indent=2, sort_keys=True) + "\n")


def export_report(report: MetricsReport, fmt: str = "structured") -> str:
    """Render a report as structured JSON, delimited rows, or an aligned table."""
    if fmt == "structured":
        return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    rows = [("game", "cell", "mean_detection_rate", "union_rate")]
    for gid in sorted(report.games):
        for cell in sorted(report.games[gid]):
            data = report.games[gid][cell]
            rows.append((gid, cell, f"{data['mean_detection_rate']:.4f}", f"{data['union']['detection_rate']:.4f}"))
    if fmt == "delimited":
        return "\n".join("\t".join(row) for row in rows) + "\n"
    if fmt == "table-text":
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows) + "\n"
    raise ConfigError(f"unknown report format {fmt!r}")
