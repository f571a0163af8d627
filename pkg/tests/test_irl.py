"""Goal extraction: splitting, repetition analysis, likelihood learning, merging."""
import numpy as np
import pytest

from gamecheck.engine import Interaction, replay
from gamecheck.interactions import ALL, EACH, Feature
from gamecheck.irl import (
    analyze_repetitions,
    calculate_likelihood,
    create_feature,
    create_goal,
    likelihood_and_gradient,
    mgp_irl,
    mlirl,
    segment_features,
    split_trajectory,
)
from gamecheck.resources import load_game

GAME_A = load_game("a")
LEVEL = GAME_A.levels[0]


def initial():
    return GAME_A.game.initial_state(LEVEL)


class TestSplit:
    def test_uniform_wall_bumping_single_segment(self):
        segments = split_trajectory(GAME_A.game, LEVEL, "UUUU")
        assert len(segments) == 1
        assert segments[0].actions == ("U", "U", "U", "U")

    def test_boundary_at_first_key_contact(self):
        # bump walls, walk the corridor, touch the key
        segments = split_trajectory(GAME_A.game, LEVEL, "UUDDRR")
        assert len(segments) == 3
        assert segments[-1].actions == ("R",)
        features = segment_features(segments[-1])
        assert [f.eta1 for f in features] == ["key"]

    def test_empty_trajectory(self):
        assert split_trajectory(GAME_A.game, LEVEL, "") == []

    def test_concatenation_reconstructs_trajectory(self):
        for actions in ("UUDDRR", "DDRRDDR", "ULDRULDR"):
            segments = split_trajectory(GAME_A.game, LEVEL, actions)
            joined = "".join("".join(s.actions) for s in segments)
            assert joined == actions

    def test_truncated_at_terminal(self):
        segments = split_trajectory(GAME_A.game, LEVEL, "DDRRDDRUUU")
        joined = "".join("".join(s.actions) for s in segments)
        assert joined == "DDRRDDR"  # win truncates the rest


class TestCreateFeature:
    def test_projection(self):
        zeta = Interaction("avatar", "wall", (1, 0), "U", "Move", "nokey")
        f = create_feature(zeta)
        assert f == Feature("avatar", "wall", "Move", "nokey")
        assert f.is_abstract

    def test_duplicates_deduped(self):
        segments = split_trajectory(GAME_A.game, LEVEL, "UUUU")
        assert len(segment_features(segments[0])) == 1


WALL = Feature("avatar", "wall", "Move", "nokey")
FLOOR = Feature("avatar", "floor", "Move", "nokey")


class TestAnalyzeRepetitions:
    def test_double_hit_same_cell_rep_two(self):
        out = analyze_repetitions(GAME_A.game, initial(), "UU", [WALL], ALL)
        assert out[0].rep == 2
        assert out[0].method == ALL

    def test_single_hits_rep_one(self):
        out = analyze_repetitions(GAME_A.game, initial(), "U", [WALL], ALL)
        assert out[0].rep == 1

    def test_unobserved_feature_floor_one(self):
        out = analyze_repetitions(GAME_A.game, initial(), "UU", [WALL, FLOOR], ALL)
        assert out[1].rep == 1

    def test_each_keys_on_direction(self):
        # same wall cell hit from one direction twice: rep 2 under Each too
        out = analyze_repetitions(GAME_A.game, initial(), "UU", [WALL], EACH)
        assert out[0].rep == 2


class TestMLIRL:
    def test_rewarded_action_gets_positive_weight(self):
        feats = analyze_repetitions(GAME_A.game, initial(), "UUUU", [WALL], ALL)
        learned, kappa = mlirl(GAME_A.game, initial(), "UUUU", feats)
        assert learned[0].weight > 0
        baseline = 4 * np.log(1 / 5)
        assert kappa >= baseline

    def test_empty_trajectory_rejected(self):
        with pytest.raises(ValueError):
            mlirl(GAME_A.game, initial(), "", [])

    def test_likelihood_no_worse_than_zero_weights(self):
        feats = analyze_repetitions(GAME_A.game, initial(), "UUDD", [WALL, FLOOR], ALL)
        _, kappa = mlirl(GAME_A.game, initial(), "UUDD", feats)
        zero = calculate_likelihood(GAME_A.game, initial(), "UUDD", feats)
        assert kappa >= zero - 1e-9

    def test_gradient_matches_finite_differences(self):
        actions = "UUDDRR"
        abstract = [WALL, FLOOR, Feature("avatar", "key", "Move", "nokey")]
        feats = analyze_repetitions(GAME_A.game, initial(), actions, abstract, ALL)
        weights = [0.3, -0.2, 0.7]
        feats = [f.concretized(w, f.method, f.rep) for f, w in zip(feats, weights)]
        _, grad = likelihood_and_gradient(GAME_A.game, initial(), actions, feats)
        eps = 1e-5
        for k in range(len(feats)):
            up = [f.concretized(f.weight + (eps if i == k else 0.0), f.method, f.rep) for i, f in enumerate(feats)]
            dn = [f.concretized(f.weight - (eps if i == k else 0.0), f.method, f.rep) for i, f in enumerate(feats)]
            fd = (
                calculate_likelihood(GAME_A.game, initial(), actions, up)
                - calculate_likelihood(GAME_A.game, initial(), actions, dn)
            ) / (2 * eps)
            assert grad[k] == pytest.approx(fd, rel=1e-4, abs=1e-8)


class TestLikelihood:
    def test_uniform_policy_value(self):
        kappa = calculate_likelihood(GAME_A.game, initial(), "UU", [])
        assert kappa == pytest.approx(2 * np.log(1 / 5))

    def test_never_positive(self):
        feats = analyze_repetitions(GAME_A.game, initial(), "UUUU", [WALL], ALL)
        learned, kappa = mlirl(GAME_A.game, initial(), "UUUU", feats)
        assert kappa <= 0
        assert calculate_likelihood(GAME_A.game, initial(), "UUUU", learned) <= 0


class TestCreateGoal:
    def test_criterion_fraction_of_sprites(self):
        # two distinct wall cells out of 24
        feats = [WALL.concretized(0.5, ALL, 2)]
        state, goal = create_goal(GAME_A.game, initial(), "UL", feats)
        assert goal.entries[0].criterion == pytest.approx(2 / 24 * 100)
        assert state.tick == 2

    def test_negative_weight_excluded_from_criteria(self):
        feats = [WALL.concretized(-0.5, ALL, 2)]
        _, goal = create_goal(GAME_A.game, initial(), "UL", feats)
        assert goal.entries[0].criterion == 0.0

    def test_missing_sprite_warns(self):
        absent = Feature("avatar", "sword", "Move", "nokey").concretized(0.5, ALL, 1)
        with pytest.warns(UserWarning, match="criterion"):
            _, goal = create_goal(GAME_A.game, initial(), "U", [absent])
        assert goal.entries[0].criterion == 0.0


class TestMgpIrl:
    def test_huge_threshold_single_goal(self):
        seq = mgp_irl(GAME_A.game, LEVEL, "UUDDRR", kappa_t=1e9)
        assert len(seq.goals) == 1

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError):
            mgp_irl(GAME_A.game, LEVEL, "UU", kappa_t=-0.5)

    def test_meta_records_threshold(self):
        seq = mgp_irl(GAME_A.game, LEVEL, "UU", kappa_t=0.5, meta={"tester": "t0"})
        assert seq.meta == {"tester": "t0", "kappa_t": 0.5}

    def test_empty_trajectory_empty_sequence(self):
        seq = mgp_irl(GAME_A.game, LEVEL, "", kappa_t=0.0)
        assert seq.goals == []

    def test_goal_count_non_increasing_in_threshold(self):
        actions = "UUDDRRLLRRDDR"
        counts = [len(mgp_irl(GAME_A.game, LEVEL, actions, kappa_t=k).goals) for k in (0.0, 0.5, 1.0)]
        assert counts == sorted(counts, reverse=True)
        assert counts[0] >= 1

    def test_criteria_in_range(self):
        seq = mgp_irl(GAME_A.game, LEVEL, "UUDDRRDDR", kappa_t=0.5)
        for goal in seq.goals:
            for entry in goal.entries:
                max_rep = entry.feature.rep or 1
                assert 0.0 <= entry.criterion <= 100.0 * max_rep

    def test_extracted_goals_replayable_as_features(self):
        seq = mgp_irl(GAME_A.game, LEVEL, "DDRRDDR", kappa_t=1.0)
        result = replay(GAME_A.game, LEVEL, "DDRRDDR")
        seen = {z.key() for z in result.all_interactions()}
        extracted = {f.match_key() for g in seq.goals for f in g.features}
        assert extracted <= seen
