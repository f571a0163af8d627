"""Command line interface."""
import json

from click.testing import CliRunner

from gamecheck.cli import main
from gamecheck.goals import load_goal_sequences
from gamecheck.vgdl import parse_description


def invoke(*args, **kwargs):
    return CliRunner().invoke(main, list(args), **kwargs)


class TestGenGoals:
    def test_synthetic_sequences(self, tmp_path):
        out = tmp_path / "goals.jsonl"
        result = invoke("gen-goals", "--game", "a", "--level", "0", "--output", str(out))
        assert result.exit_code == 0, result.output
        assert len(load_goal_sequences(out.read_text())) == 29

    def test_baseline_single_sequence(self, tmp_path):
        out = tmp_path / "goals.jsonl"
        result = invoke("gen-goals", "--game", "a", "--no-modifications", "--output", str(out))
        assert result.exit_code == 0
        assert len(load_goal_sequences(out.read_text())) == 1

    def test_unknown_game(self):
        assert invoke("gen-goals", "--game", "zzz").exit_code != 0


class TestExtract:
    def test_from_scripted_tester(self, tmp_path):
        out = tmp_path / "extracted.jsonl"
        result = invoke("extract", "--game", "a", "--tester", "key-rusher",
                        "--kappa-t", "0.5", "--output", str(out))
        assert result.exit_code == 0, result.output
        sequences = load_goal_sequences(out.read_text())
        assert len(sequences) == 1
        assert sequences[0].meta["kappa_t"] == 0.5

    def test_from_trajectory_file(self, tmp_path):
        traj = tmp_path / "plays.jsonl"
        traj.write_text(json.dumps(
            {"version": 1, "game": "a", "level": 0, "actions": "DDRRDDR"}) + "\n")
        out = tmp_path / "extracted.jsonl"
        result = invoke("extract", "--game", "a", "--trajectories", str(traj),
                        "--output", str(out))
        assert result.exit_code == 0, result.output
        assert len(load_goal_sequences(out.read_text())) == 1

    def test_requires_input(self):
        assert invoke("extract", "--game", "a").exit_code != 0


class TestReplay:
    def test_clean_replay(self):
        result = invoke("replay", "--game", "a", "--actions", "DDRRDDR")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["status"] == "Win"
        assert payload["violations"] == []
        assert payload["interactions"][-1]["eta1"] == "goal"

    def test_requires_input(self):
        assert invoke("replay", "--game", "a").exit_code != 0


class TestMutate:
    def test_lists_suite(self):
        result = invoke("mutate", "--game", "a")
        assert result.exit_code == 0
        rows = [json.loads(line) for line in result.output.splitlines()]
        assert len(rows) == 12
        assert len({r["fault_id"] for r in rows}) == 12

    def test_materializes_single_mutant(self):
        listing = invoke("mutate", "--game", "a")
        fid = json.loads(listing.output.splitlines()[0])["fault_id"]
        result = invoke("mutate", "--game", "a", "--fault-id", fid)
        assert result.exit_code == 0
        parse_description(result.output)

    def test_writes_mutant_files(self, tmp_path):
        result = invoke("mutate", "--game", "a", "--output-dir", str(tmp_path))
        assert result.exit_code == 0
        assert len(list((tmp_path / "a" / "mutants").glob("*.txt"))) == 12

    def test_unknown_fault(self):
        assert invoke("mutate", "--game", "a", "--fault-id", "nope").exit_code != 0


class TestRunAndReport:
    def test_run_writes_report(self, tmp_path):
        result = invoke(
            "run", "--game", "a", "--cell", "baseline-sarsa",
            "--game-length", "30", "--plateau-episodes", "15", "--max-episodes", "300",
            "--output-dir", str(tmp_path),
        )
        assert result.exit_code == 0, result.output
        assert "baseline-sarsa" in result.output
        report_file = tmp_path / "report.json"
        data = json.loads(report_file.read_text())
        assert "a" in data["games"]

        rendered = invoke("report", str(report_file), "--format", "delimited")
        assert rendered.exit_code == 0
        assert rendered.output.splitlines()[0] == "game\tcell\tmean_detection_rate\tunion_rate"

    def test_output_dir_env_var(self, tmp_path, monkeypatch):
        result = CliRunner().invoke(
            main,
            ["run", "--game", "a", "--cell", "baseline-sarsa",
             "--game-length", "30", "--plateau-episodes", "15", "--max-episodes", "300"],
            env={"GAMECHECK_OUTPUT_DIR": str(tmp_path)},
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "report.json").exists()
