"""Playable environment that scores a goal sequence over the engine.

A GoalRun owns one game state, the 12-layer interaction memory and the
per-feature progress marks for the current goal.  Rewards come from the
goal's features; fulfilling every criterion pays a completion bonus,
advances to the next goal and resets the interaction memory.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .engine import DIRECTIONS, Game, NIL, RUNNING, USE
from .goals import Goal, GoalSequence
from .interactions import FeatureTracker, InteractionState, match_feature


@dataclass
class AgentConfig:
    gamma: float = 0.95
    beta: float = 1.0
    lam: float = 0.8
    alpha: float = 0.03
    cp: float = 3.0
    rollout_depth: int = 8
    mcts_iterations: int = 600
    c_t: float = 0.01
    completion_base: float = 10.0
    unmatched_weight: float = -1.0
    out_of_grid_weight: float = -1.0
    dampening: float = 0.1
    game_lengths: tuple = (50, 100, 150, 200, 250, 300)
    stop_on_goal_failure: bool = True
    include_nil: bool = False
    max_episodes: int = 20000
    plateau_episodes: int = 50
    seed: int = 0


@dataclass
class _GoalProgress:
    goal: Goal
    targets: dict  # feature match_key -> required countF (criterion > 0 only)
    tracker: FeatureTracker
    dampened: set = field(default_factory=set)

    def completion_of(self, key) -> float:
        target = self.targets[key]
        feature = next(e.feature for e in self.goal.entries if e.feature.match_key() == key)
        return min(1.0, self.tracker.count(feature) / target)

    def total_completion(self) -> float:
        total = 1.0
        for key in self.targets:
            total *= self.completion_of(key)
        return total

    def fulfilled(self, c_t: float) -> bool:
        return all(self.completion_of(key) >= 1.0 - c_t for key in self.targets)


class GoalRun:
    """One agent-playable run of a goal sequence on one level."""

    def __init__(self, game: Game, level_text: str, sequence: GoalSequence, cfg: AgentConfig,
                 max_steps: int | None = None):
        self.game = game
        self.level_text = level_text
        self.sequence = sequence
        self.cfg = cfg
        self.goal_budget = None
        if not cfg.stop_on_goal_failure and max_steps is not None and sequence.goals:
            self.goal_budget = max(1, max_steps // len(sequence.goals))
        actions = list(DIRECTIONS)
        if game.desc.sword_for(game.desc.avatar_states[0]) is not None:
            actions.append(USE)
        if cfg.include_nil:
            actions.append(NIL)
        self.actions = tuple(actions)
        self.reset()

    def reset(self):
        self.state = self.game.initial_state(self.level_text)
        self.istate = InteractionState(self.state.width, self.state.height)
        self.goal_idx = 0
        self.fulfilled_goals = 0
        self.steps = 0
        self.steps_in_goal = 0
        self.done = len(self.sequence.goals) == 0
        self._progress = self._start_goal() if not self.done else None
        self._skip_empty_goals()
        return self

    def _start_goal(self) -> _GoalProgress:
        goal = self.sequence.goals[self.goal_idx]
        census = self.state.census()
        targets = {}
        for entry in goal.entries:
            if entry.criterion <= 0:
                continue
            count_s = sum(census.get(leaf, 0) for leaf in self.game.desc.leaves(entry.feature.eta1))
            target = entry.criterion / 100.0 * count_s
            if target > 0:
                targets[entry.feature.match_key()] = target
        return _GoalProgress(
            goal=goal,
            targets=targets,
            tracker=FeatureTracker(self.state.width, self.state.height),
        )

    def clone(self) -> "GoalRun":
        other = object.__new__(GoalRun)
        other.game = self.game
        other.level_text = self.level_text
        other.sequence = self.sequence
        other.cfg = self.cfg
        other.actions = self.actions
        other.state = self.state.copy()
        other.istate = self.istate.copy()
        other.goal_budget = self.goal_budget
        other.goal_idx = self.goal_idx
        other.fulfilled_goals = self.fulfilled_goals
        other.steps = self.steps
        other.steps_in_goal = self.steps_in_goal
        other.done = self.done
        if self._progress is None:
            other._progress = None
        else:
            other._progress = _GoalProgress(
                goal=self._progress.goal,
                targets=dict(self._progress.targets),
                tracker=self._progress.tracker.copy(),
                dampened=set(self._progress.dampened),
            )
        return other

    def state_key(self):
        return (self.state.key(), self.istate.key(), self.goal_idx)

    def progress_score(self) -> float:
        """Fulfilled goals plus current-goal completion, scaled to [0, 1]."""
        n = len(self.sequence.goals)
        if n == 0:
            return 1.0
        partial = self._progress.total_completion() if self._progress else 0.0
        return min(1.0, (self.fulfilled_goals + partial) / n)

    def step(self, action: str) -> tuple[float, bool]:
        if self.done:
            raise RuntimeError("step on finished run")
        cfg = self.cfg
        progress = self._progress
        features = progress.goal.features
        nxt, zetas, status = self.game.step(self.state, action)
        self.state = nxt
        self.steps += 1
        self.steps_in_goal += 1

        reward = 0.0
        for zeta in zetas:
            if not self.istate.in_grid(zeta.pos):
                reward += cfg.out_of_grid_weight
                continue
            feature = match_feature(features, zeta)
            if feature is None:
                reward += cfg.unmatched_weight
                continue
            r = self.istate.apply_interaction(zeta, feature)
            if feature.match_key() in progress.dampened:
                r *= cfg.dampening
            reward += r
            progress.tracker.record(zeta, feature)

        for key in progress.targets:
            if key not in progress.dampened and progress.completion_of(key) >= 1.0 - cfg.c_t:
                progress.dampened.add(key)

        if progress.fulfilled(cfg.c_t):
            reward += cfg.completion_base ** progress.total_completion()
            self.fulfilled_goals += 1
            self._advance_goal()
        elif self.goal_budget is not None and self.steps_in_goal >= self.goal_budget:
            # goal failed its step share; move on without the bonus
            self._advance_goal()
        if status != RUNNING:
            self.done = True
        return reward, self.done

    def _advance_goal(self):
        self.goal_idx += 1
        self.steps_in_goal = 0
        self.istate.reset()
        if self.goal_idx >= len(self.sequence.goals):
            self.done = True
            self._progress = None
        else:
            self._progress = self._start_goal()
            self._skip_empty_goals()

    def _skip_empty_goals(self):
        # a goal whose criteria all target absent sprites cannot be played;
        # skip it without the completion bonus
        while self._progress is not None and not self._progress.targets:
            self._advance_goal()
