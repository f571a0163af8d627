"""Fault operators, the 45-fault suite, and bug deduplication."""
import pytest

from gamecheck.engine import Game
from gamecheck.faults import (
    BugReport,
    FaultError,
    FaultSpec,
    apply_fault,
    dedupe_bugs,
    detection_rate,
    fault_id,
    load_faults,
    seed_faults,
)
from gamecheck.oracle import check_trajectory, load_constraints
from gamecheck.resources import game_ids, load_game
from gamecheck.scenario import ScenarioGraph
from gamecheck.vgdl import parse_description

GAME_A = load_game("a")
TEXT_A = GAME_A.description_text


class TestOperators:
    def test_remove_rule(self):
        mutated = apply_fault(TEXT_A, FaultSpec("RemoveRule", "avatar wall > stepBack"))
        desc = parse_description(mutated)
        assert len(desc.rules) == 3
        assert all("stepBack" != r.effect or r.first != "avatar" for r in desc.rules)

    def test_swap_sprite_order(self):
        mutated = apply_fault(TEXT_A, FaultSpec("SwapSpriteOrder", "avatar wall > stepBack"))
        assert "wall avatar > stepBack" in mutated
        assert "avatar wall > stepBack" not in mutated

    def test_rename_sprite(self):
        spec = FaultSpec("RenameSpriteInRule", "avatar wall > stepBack", old="wall", new="key")
        mutated = apply_fault(TEXT_A, spec)
        assert "avatar key > stepBack" in mutated

    def test_rename_matches_whole_token(self):
        rule = "nokey key > transformTo stype=withkey killSecond=True"
        spec = FaultSpec("RenameSpriteInRule", rule, old="key", new="goal")
        mutated = apply_fault(TEXT_A, spec)
        assert "nokey goal > transformTo" in mutated  # "nokey" untouched

    def test_add_fallacious_rule(self):
        mutated = apply_fault(TEXT_A, FaultSpec("AddFallaciousRule", "avatar floor > killSprite"))
        desc = parse_description(mutated)
        assert len(desc.rules) == 5
        assert (desc.rules[-1].first, desc.rules[-1].seconds) == ("avatar", ["floor"])

    def test_rule_not_found(self):
        with pytest.raises(FaultError, match="not found"):
            apply_fault(TEXT_A, FaultSpec("RemoveRule", "avatar ghost > stepBack"))

    def test_rename_missing_sprite(self):
        spec = FaultSpec("RenameSpriteInRule", "avatar wall > stepBack", old="fire", new="key")
        with pytest.raises(FaultError, match="not in rule"):
            apply_fault(TEXT_A, spec)

    def test_mutants_reparse(self):
        for gid in game_ids():
            bundle = load_game(gid)
            for mutant in seed_faults(bundle.description_text, load_faults(bundle.faults)):
                parse_description(mutant.description)


class TestFaultIds:
    def test_id_embeds_operator_and_line(self):
        fid = fault_id(FaultSpec("RemoveRule", "avatar wall > stepBack"), TEXT_A)
        assert fid.startswith("RemoveRule@L")

    def test_add_id_embeds_rule(self):
        fid = fault_id(FaultSpec("AddFallaciousRule", "avatar floor > killSprite"), TEXT_A)
        assert fid == "AddFallaciousRule+avatar floor > killSprite"

    def test_suite_ids_unique(self):
        ids = []
        for gid in game_ids():
            bundle = load_game(gid)
            ids.extend((gid, m.fault_id) for m in seed_faults(bundle.description_text, load_faults(bundle.faults)))
        assert len(ids) == len(set(ids))


class TestShippedSuite:
    def test_suite_sizes(self):
        sizes = {gid: len(load_faults(load_game(gid).faults)) for gid in game_ids()}
        assert sum(sizes.values()) == 45
        assert min(sizes.values()) >= 12

    def test_bad_version(self):
        with pytest.raises(FaultError, match="version"):
            load_faults({"version": 9, "faults": []})

    def test_unknown_operator(self):
        with pytest.raises(FaultError, match="operator"):
            load_faults({"version": 1, "faults": [{"op": "DeleteSprite", "rule": "x"}]})

    def test_every_mutant_killed_by_witness(self):
        for gid in game_ids():
            bundle = load_game(gid)
            constraints = load_constraints(bundle.constraints)
            for mutant in seed_faults(bundle.description_text, load_faults(bundle.faults)):
                spec = mutant.spec
                assert spec.witness is not None, (gid, mutant.fault_id)
                game = Game(parse_description(mutant.description))
                graph = ScenarioGraph.from_json(bundle.graph_for_level(spec.witness_level))
                violations = check_trajectory(
                    game, bundle.levels[spec.witness_level], spec.witness, graph, constraints
                )
                assert violations, (gid, mutant.fault_id)

    def test_witnesses_clean_on_unmutated_games(self):
        for gid in game_ids():
            bundle = load_game(gid)
            constraints = load_constraints(bundle.constraints)
            for spec in load_faults(bundle.faults):
                graph = ScenarioGraph.from_json(bundle.graph_for_level(spec.witness_level))
                violations = check_trajectory(
                    bundle.game, bundle.levels[spec.witness_level], spec.witness, graph, constraints
                )
                assert violations == [], (gid, spec.witness)


class TestBugAccounting:
    def test_duplicates_collapse(self):
        reports = [
            BugReport("RemoveRule@L18", "no-wall-overlap", 1, "x"),
            BugReport("RemoveRule@L18", "no-wall-overlap", 7, "y"),
            BugReport("RemoveRule@L19", "no-goal-overlap-nokey", 2, "z"),
        ]
        assert dedupe_bugs(reports) == ["RemoveRule@L18", "RemoveRule@L19"]

    def test_empty(self):
        assert dedupe_bugs([]) == []
        assert detection_rate([], 0) == 0.0

    def test_rate_arithmetic(self):
        found = [f"f{i}" for i in range(9)] + ["f0"]
        assert detection_rate(found, 10) == pytest.approx(0.9)
