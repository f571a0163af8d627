"""Run the full agent matrix on every shipped game and write a report.

Heavier than the test-suite runs: full length sweep, all cells, MCTS
repeats. Expect this to take a while on games b and c.
"""
import argparse
import os
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gamecheck.experiment import ExperimentConfig, export_report, run_experiment
from gamecheck.goalplay import AgentConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--games", nargs="+", default=["a", "b", "c"])
    parser.add_argument(
        "--cells", nargs="+",
        default=["baseline-sarsa", "synthetic-sarsa", "synthetic-mcts",
                 "humanlike-sarsa", "humanlike-mcts"],
    )
    parser.add_argument("--mcts-repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--output-dir",
        default=os.environ.get("GAMECHECK_OUTPUT_DIR", "out/experiment"),
    )
    args = parser.parse_args()

    cfg = ExperimentConfig(
        games=tuple(args.games),
        cells=tuple(args.cells),
        mcts_repeats=args.mcts_repeats,
        agent=AgentConfig(seed=args.seed, stop_on_goal_failure=False),
        output_dir=args.output_dir,
    )
    report = run_experiment(cfg)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(export_report(report, "structured"))
    (out / "report.tsv").write_text(export_report(report, "delimited"))
    print(export_report(report, "table-text"), end="")
    print(f"\nartifacts in {out}")


if __name__ == "__main__":
    main()
