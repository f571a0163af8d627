"""Distribution and summary metrics for comparing play styles."""
from __future__ import annotations

import math
from collections import Counter

SMOOTHING = 1e-6


def interaction_distribution(interactions) -> Counter:
    """Histogram over (eta0, eta1, type, avatar_state) bins."""
    return Counter(zeta.key() for zeta in interactions)


def cross_entropy(p_counts, q_counts) -> float:
    """H(p, q) with additive smoothing on q over the union support."""
    p_total = sum(p_counts.values())
    if p_total == 0:
        raise ValueError("empty reference distribution")
    support = set(p_counts) | set(q_counts)
    q_total = sum(q_counts.values()) + SMOOTHING * len(support)
    h = 0.0
    for bin_ in support:
        p = p_counts.get(bin_, 0) / p_total
        if p == 0:
            continue
        q = (q_counts.get(bin_, 0) + SMOOTHING) / q_total
        h -= p * math.log(q)
    return h


def entropy(counts) -> float:
    return cross_entropy(counts, counts)


def summarize_splits(sequences) -> dict:
    """Splits per extracted sequence: a sequence of n goals has n - 1 splits."""
    splits = [max(0, len(seq.goals) - 1) for seq in sequences]
    if not splits:
        return {"count": 0, "total": 0, "mean": 0.0, "max": 0}
    return {
        "count": len(splits),
        "total": sum(splits),
        "mean": sum(splits) / len(splits),
        "max": max(splits),
    }
