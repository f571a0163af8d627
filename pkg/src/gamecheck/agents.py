"""Tabular Sarsa(lambda) over any environment exposing the GoalRun protocol.

An environment needs: `actions` (fixed tuple), `reset()`, `done`,
`step(action) -> (reward, done)` and `state_key()`.  If it also provides
`progress_score()` that score drives plateau detection and run selection,
otherwise the episode return does.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .goalplay import AgentConfig, GoalRun

TRACE_FLOOR = 1e-4
SCORE_EPS = 1e-9


def boltzmann_probs(values, beta: float) -> list[float]:
    top = max(values)
    weights = [math.exp(beta * (v - top)) for v in values]
    total = sum(weights)
    return [w / total for w in weights]


def boltzmann_select(values, beta: float, rng: random.Random) -> int:
    draw = rng.random()
    acc = 0.0
    for i, p in enumerate(boltzmann_probs(values, beta)):
        acc += p
        if draw < acc:
            return i
    return len(values) - 1


def _score(env, episode_return: float) -> float:
    scorer = getattr(env, "progress_score", None)
    return scorer() if scorer is not None else episode_return


@dataclass
class TrainResult:
    actions: str
    score: float
    episodes: int
    q: dict = field(repr=False, default_factory=dict)


def greedy_rollout(env, q: dict, max_steps: int) -> tuple[str, float]:
    env.reset()
    actions = []
    total = 0.0
    while not env.done and len(actions) < max_steps:
        values = q.get(env.state_key())
        idx = 0 if values is None else max(range(len(values)), key=lambda i: values[i])
        reward, _ = env.step(env.actions[idx])
        total += reward
        actions.append(env.actions[idx])
    return "".join(actions), _score(env, total)


def train_sarsa(env, cfg: AgentConfig, max_steps: int, rng: random.Random | None = None) -> TrainResult:
    rng = rng if rng is not None else random.Random(cfg.seed)
    n = len(env.actions)
    q: dict = {}
    best_score = -math.inf
    best_actions = ""
    stale = 0
    episodes = 0

    while episodes < cfg.max_episodes and stale < cfg.plateau_episodes:
        env.reset()
        trace: dict = {}
        taken = []
        episode_return = 0.0
        s = env.state_key()
        a = boltzmann_select(q.setdefault(s, [0.0] * n), cfg.beta, rng)
        while not env.done and len(taken) < max_steps:
            reward, done = env.step(env.actions[a])
            episode_return += reward
            taken.append(env.actions[a])
            if done or len(taken) >= max_steps:
                target = reward
            else:
                s2 = env.state_key()
                a2 = boltzmann_select(q.setdefault(s2, [0.0] * n), cfg.beta, rng)
                target = reward + cfg.gamma * q[s2][a2]
            delta = target - q[s][a]
            trace[(s, a)] = 1.0  # replacing trace
            decayed = {}
            for key, e in trace.items():
                q[key[0]][key[1]] += cfg.alpha * delta * e
                e *= cfg.gamma * cfg.lam
                if e >= TRACE_FLOOR:
                    decayed[key] = e
            trace = decayed
            if done or len(taken) >= max_steps:
                break
            s, a = s2, a2

        episodes += 1
        score = _score(env, episode_return)
        if score > best_score + SCORE_EPS:
            best_score = score
            best_actions = "".join(taken)
            stale = 0
        else:
            stale += 1
        if best_score >= 1.0 - SCORE_EPS:
            break

    rollout_actions, rollout_score = greedy_rollout(env, q, max_steps)
    if rollout_score >= best_score:
        return TrainResult(rollout_actions, rollout_score, episodes, q)
    return TrainResult(best_actions, best_score, episodes, q)


@dataclass
class RunResult:
    actions: str
    score: float
    game_length: int
    episodes: int
    agent: str


def run_goal_sequence(game, level_text, sequence, cfg: AgentConfig | None = None, agent: str = "sarsa") -> RunResult:
    """Sweep game lengths ascending, keep the highest-scoring play."""
    from .mcts import mcts_episode

    cfg = cfg if cfg is not None else AgentConfig()
    best: RunResult | None = None
    for i, length in enumerate(cfg.game_lengths):
        env = GoalRun(game, level_text, sequence, cfg, max_steps=length)
        rng = random.Random(cfg.seed * 1000003 + i)
        if agent == "sarsa":
            out = train_sarsa(env, cfg, length, rng)
            result = RunResult(out.actions, out.score, length, out.episodes, agent)
        elif agent == "mcts":
            actions, score = mcts_episode(env, cfg, length, rng)
            result = RunResult(actions, score, length, 1, agent)
        else:
            raise ValueError(f"unknown agent {agent!r}")
        if best is None or result.score > best.score + SCORE_EPS:
            best = result
        if best.score >= 1.0 - SCORE_EPS:
            break
    return best
