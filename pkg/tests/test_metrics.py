"""Distribution metrics."""
import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from gamecheck.engine import Interaction
from gamecheck.goals import Goal, GoalEntry
from gamecheck.goals import GoalSequence
from gamecheck.interactions import ALL, Feature
from gamecheck.metrics import cross_entropy, entropy, interaction_distribution, summarize_splits


def test_identical_uniform_distributions():
    counts = Counter({"a": 1, "b": 1})
    assert cross_entropy(counts, counts) == pytest.approx(math.log(2), abs=1e-4)


def test_missing_support_is_finite():
    p = Counter({"a": 10})
    q = Counter({"b": 10})
    h = cross_entropy(p, q)
    assert math.isfinite(h)
    assert h > 10  # smoothing mass only


def test_empty_reference_rejected():
    with pytest.raises(ValueError):
        cross_entropy(Counter(), Counter({"a": 1}))


def test_scale_invariance_of_p():
    p1 = Counter({"a": 1, "b": 3})
    p2 = Counter({"a": 10, "b": 30})
    q = Counter({"a": 5, "b": 5})
    assert cross_entropy(p1, q) == pytest.approx(cross_entropy(p2, q))


counters = st.dictionaries(st.sampled_from("abcdef"), st.integers(1, 50), min_size=1, max_size=6)


@given(counters, counters)
@settings(max_examples=100, deadline=None)
def test_gibbs_inequality(p, q):
    p, q = Counter(p), Counter(q)
    assert cross_entropy(p, q) >= entropy(p) - 1e-6


def test_interaction_bins():
    zetas = [
        Interaction("avatar", "wall", (1, 0), "U", "Move", "nokey"),
        Interaction("avatar", "wall", (2, 0), "L", "Move", "nokey"),
        Interaction("avatar", "key", (3, 3), "R", "Move", "nokey"),
    ]
    dist = interaction_distribution(zetas)
    assert dist[("avatar", "wall", "Move", "nokey")] == 2
    assert dist[("avatar", "key", "Move", "nokey")] == 1


def _sequence(n_goals):
    feature = Feature("avatar", "wall", "Move", "nokey", 1.0, ALL, 1)
    return GoalSequence(goals=[Goal([GoalEntry(feature, 100.0)]) for _ in range(n_goals)])


def test_summarize_splits():
    out = summarize_splits([_sequence(3), _sequence(1)])
    assert out == {"count": 2, "total": 2, "mean": 1.0, "max": 2}


def test_summarize_empty():
    assert summarize_splits([])["count"] == 0
