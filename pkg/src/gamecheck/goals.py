"""Goals: features paired with completion criteria, and goal-sequence files."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .interactions import ALL, Feature, validate_feature_set
from .engine import MOVE

GOALFILE_VERSION = 1

EXPLORATION_WEIGHT = 0.01


def exploration_feature(avatar_state: str | None) -> Feature:
    """Small always-on travel reward; criterion 0 so it never gates a goal."""
    return Feature(
        eta0="avatar",
        eta1="floor",
        type=MOVE,
        avatar_state=avatar_state,
        weight=EXPLORATION_WEIGHT,
        method=ALL,
        rep=1,
    )


@dataclass(frozen=True)
class GoalEntry:
    feature: Feature
    criterion: float  # percentage of eta1's population to exercise

    def __post_init__(self):
        if self.criterion < 0:
            raise ValueError("criterion must be non-negative")


@dataclass
class Goal:
    entries: list[GoalEntry]

    def __post_init__(self):
        validate_feature_set(e.feature for e in self.entries)

    @property
    def features(self) -> list[Feature]:
        return [e.feature for e in self.entries]


@dataclass
class GoalSequence:
    goals: list[Goal]
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.goals)

    def __iter__(self):
        return iter(self.goals)

    def to_json(self) -> dict:
        return {
            "version": GOALFILE_VERSION,
            "meta": self.meta,
            "goals": [
                [{"feature": e.feature.to_json(), "criterion": e.criterion} for e in goal.entries]
                for goal in self.goals
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GoalSequence":
        if data.get("version") != GOALFILE_VERSION:
            raise ValueError(f"unsupported goal file version {data.get('version')!r}")
        goals = [
            Goal([GoalEntry(Feature.from_json(e["feature"]), e["criterion"]) for e in entries])
            for entries in data["goals"]
        ]
        return cls(goals=goals, meta=data.get("meta", {}))


def dump_goal_sequences(sequences: list[GoalSequence]) -> str:
    return "\n".join(json.dumps(s.to_json(), sort_keys=True) for s in sequences)


def load_goal_sequences(text: str) -> list[GoalSequence]:
    return [
        GoalSequence.from_json(json.loads(line))
        for line in text.splitlines()
        if line.strip()
    ]
