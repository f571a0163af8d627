"""Monte Carlo tree search with a transposition table.

Statistics are stored per state key, not per tree node, so distinct action
sequences reaching the same (game state, interaction memory, goal index)
share value estimates.  Root move is the most visited action; ties fall to
the fixed action order.
"""
from __future__ import annotations

import math
import random

from .goalplay import AgentConfig


class _Stats:
    __slots__ = ("n", "na", "qa")

    def __init__(self, n_actions: int):
        self.n = 0
        self.na = [0] * n_actions
        self.qa = [0.0] * n_actions


class MCTS:
    def __init__(self, n_actions: int, cfg: AgentConfig, rng: random.Random):
        self.n_actions = n_actions
        self.cfg = cfg
        self.rng = rng
        self.table: dict = {}

    def _pick(self, stats: _Stats) -> int:
        for i in range(self.n_actions):
            if stats.na[i] == 0:
                return i
        log_n = math.log(stats.n)
        cp = self.cfg.cp
        return max(
            range(self.n_actions),
            key=lambda i: stats.qa[i] + cp * math.sqrt(log_n / stats.na[i]),
        )

    def _rollout(self, env, budget: int) -> float:
        total = 0.0
        discount = 1.0
        depth = min(self.cfg.rollout_depth, budget)
        for _ in range(depth):
            if env.done:
                break
            reward, _ = env.step(env.actions[self.rng.randrange(self.n_actions)])
            total += discount * reward
            discount *= self.cfg.gamma
        return total

    def search(self, env, budget: int) -> int:
        """Run the iteration budget from `env` and return the chosen action index."""
        root_key = env.state_key()
        for _ in range(self.cfg.mcts_iterations):
            self._simulate(env.clone(), budget)
        root = self.table[root_key]
        return max(range(self.n_actions), key=lambda i: root.na[i])

    def _simulate(self, env, budget: int) -> None:
        path = []
        value = 0.0
        steps = 0
        while not env.done and steps < budget:
            key = env.state_key()
            stats = self.table.get(key)
            fresh = stats is None
            if fresh:
                stats = self.table[key] = _Stats(self.n_actions)
            a = self._pick(stats)
            reward, _ = env.step(env.actions[a])
            steps += 1
            path.append((stats, a, reward))
            if fresh:
                value = self._rollout(env, budget - steps)
                break
        for stats, a, reward in reversed(path):
            value = reward + self.cfg.gamma * value
            stats.n += 1
            stats.na[a] += 1
            stats.qa[a] += (value - stats.qa[a]) / stats.na[a]


def mcts_episode(env, cfg: AgentConfig, max_steps: int, rng: random.Random | None = None) -> tuple[str, float]:
    """Play one episode, searching fresh from every visited state."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    search = MCTS(len(env.actions), cfg, rng)
    env.reset()
    actions = []
    total = 0.0
    while not env.done and len(actions) < max_steps:
        idx = search.search(env, max_steps - len(actions))
        reward, _ = env.step(env.actions[idx])
        total += reward
        actions.append(env.actions[idx])
    scorer = getattr(env, "progress_score", None)
    return "".join(actions), scorer() if scorer is not None else total
