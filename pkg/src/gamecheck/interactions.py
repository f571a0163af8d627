"""Interaction memory: the 12-layer counter grid and the feature reward rules.

Layers 0-3 count avatar Move contacts by direction (up, down, left, right),
layers 4-7 count avatar Use contacts, layers 8-11 count contacts made by
other movers (e.g. a pushed crate).  Paired with the game state this grid is
the second half of the MDP state, letting an agent distinguish "wall already
probed" from "wall untouched".
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .engine import DIRECTIONS, MOVE, USE_TYPE, Interaction

DIR_INDEX = {d: i for i, d in enumerate(DIRECTIONS)}

EACH, ALL = "Each", "All"
METHODS = (EACH, ALL)
TYPES = (MOVE, USE_TYPE)

N_LAYERS = 12


class FeatureSetError(ValueError):
    """An ambiguous feature set (same match key, different methods)."""


def layer_index(itype: str, direction: str, mover_is_avatar: bool) -> int:
    if itype not in TYPES or direction not in DIR_INDEX:
        raise ValueError(f"bad interaction type/direction: {itype!r}/{direction!r}")
    if not mover_is_avatar:
        block = 8
    elif itype == USE_TYPE:
        block = 4
    else:
        block = 0
    return block + DIR_INDEX[direction]


def block_of(itype: str, mover_is_avatar: bool) -> int:
    return layer_index(itype, DIRECTIONS[0], mover_is_avatar)


@dataclass(frozen=True)
class Feature:
    """A reward rule over interactions.

    Abstract features (used while generating or extracting goals) leave
    weight, method and rep as None; concrete features fill all fields.
    """

    eta0: str
    eta1: str
    type: str
    avatar_state: str | None
    weight: float | None = None
    method: str | None = None
    rep: int | None = None

    def __post_init__(self):
        if self.type not in TYPES:
            raise ValueError(f"bad feature type {self.type!r}")
        if self.method is not None and self.method not in METHODS:
            raise ValueError(f"bad feature method {self.method!r}")
        if self.rep is not None and self.rep < 1:
            raise ValueError("rep must be >= 1")

    @property
    def is_abstract(self) -> bool:
        return self.weight is None or self.method is None or self.rep is None

    def match_key(self):
        return (self.eta0, self.eta1, self.type, self.avatar_state)

    def concretized(self, weight: float, method: str, rep: int) -> "Feature":
        return replace(self, weight=weight, method=method, rep=rep)

    def to_json(self) -> dict:
        return {
            "eta0": self.eta0,
            "eta1": self.eta1,
            "type": self.type,
            "avatar_state": self.avatar_state,
            "weight": self.weight,
            "method": self.method,
            "rep": self.rep,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Feature":
        return cls(**data)


def validate_feature_set(features) -> None:
    seen: dict[tuple, Feature] = {}
    for f in features:
        other = seen.get(f.match_key())
        if other is not None and other.method != f.method:
            raise FeatureSetError(f"ambiguous features for {f.match_key()}: {other.method} vs {f.method}")
        seen[f.match_key()] = f


def match_feature(features, zeta: Interaction) -> Feature | None:
    """Feature whose (eta0, eta1, type, avatar state) equals the interaction's."""
    key = zeta.key()
    for f in features:
        if f.match_key() == key:
            return f
    return None


@dataclass
class InteractionState:
    """Sparse 12xHxW counter tensor.  Counts never decrease except via reset."""

    width: int
    height: int
    counts: dict[tuple[int, int, int], int] = field(default_factory=dict)
    _key_cache: tuple | None = None

    def copy(self) -> "InteractionState":
        return InteractionState(self.width, self.height, dict(self.counts), self._key_cache)

    def in_grid(self, pos) -> bool:
        return 0 <= pos[0] < self.width and 0 <= pos[1] < self.height

    def get(self, layer: int, pos) -> int:
        return self.counts.get((layer, pos[0], pos[1]), 0)

    def _bump(self, layer: int, pos) -> None:
        self.counts[(layer, pos[0], pos[1])] = self.counts.get((layer, pos[0], pos[1]), 0) + 1
        self._key_cache = None

    def reset(self) -> None:
        self.counts.clear()
        self._key_cache = None

    def key(self):
        if self._key_cache is None:
            self._key_cache = tuple(sorted(self.counts.items()))
        return self._key_cache

    def apply_interaction(self, zeta: Interaction, feature: Feature) -> float:
        """Count the interaction and return the reward it earns.

        The counter increments even after rep is exhausted (the reward just
        stops), so occurrence counts stay accurate for criterion computation.
        Out-of-grid positions act as untracked floor: no count is stored.
        """
        layer = layer_index(zeta.type, zeta.dir, zeta.mover_is_avatar)
        if not self.in_grid(zeta.pos):
            return feature.weight
        count = self.get(layer, zeta.pos)
        reward = feature.weight if count + 1 <= feature.rep else 0.0
        if feature.method == ALL:
            base = block_of(zeta.type, zeta.mover_is_avatar)
            for i in range(4):
                self._bump(base + i, zeta.pos)
        else:
            self._bump(layer, zeta.pos)
        return reward

    def step_reward(self, interactions, features, unmatched_weight: float = 0.0) -> float:
        total = 0.0
        for zeta in interactions:
            feature = match_feature(features, zeta)
            if feature is None:
                total += unmatched_weight
            else:
                total += self.apply_interaction(zeta, feature)
        return total

    def occurrence_count(self, zeta: Interaction) -> int:
        return self.get(layer_index(zeta.type, zeta.dir, zeta.mover_is_avatar), zeta.pos)

    def render(self) -> str:
        """Debug dump: one text grid per layer, zero cells blank."""
        blocks = []
        for layer in range(N_LAYERS):
            rows = []
            for y in range(self.height):
                row = []
                for x in range(self.width):
                    c = self.get(layer, (x, y))
                    row.append(f"{c:2d}" if c else " .")
                rows.append(" ".join(row))
            blocks.append(f"layer {layer}\n" + "\n".join(rows))
        return "\n\n".join(blocks)


class FeatureTracker:
    """Per-feature occurrence marks, the countF side of criteria.

    Method=All features count distinct cells; Method=Each features count
    distinct (cell, direction) pairs, so a wall probed from two sides counts
    twice.  Out-of-grid contacts are never marked.
    """

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.marks: dict[tuple, set] = {}

    def copy(self) -> "FeatureTracker":
        t = FeatureTracker(self.width, self.height)
        t.marks = {k: set(v) for k, v in self.marks.items()}
        return t

    def record(self, zeta: Interaction, feature: Feature) -> None:
        if not (0 <= zeta.pos[0] < self.width and 0 <= zeta.pos[1] < self.height):
            return
        mark = zeta.pos if feature.method == ALL else (zeta.pos, zeta.dir)
        self.marks.setdefault(feature.match_key(), set()).add(mark)

    def count(self, feature: Feature) -> int:
        return len(self.marks.get(feature.match_key(), ()))

    def reset(self) -> None:
        self.marks.clear()
