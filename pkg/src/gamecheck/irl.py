"""Goal extraction from recorded play.

A trajectory is split wherever the emitted contact signature changes, each
segment is explained by a small linear reward over its own contact features,
and adjacent segments are merged greedily while the merged explanation stays
within a log-likelihood budget of the separate ones.  Every surviving
cluster becomes one goal.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .engine import DIRECTIONS, Game, GameState, RUNNING, USE, replay
from .goals import Goal, GoalEntry, GoalSequence
from .interactions import ALL, EACH, Feature, FeatureTracker, InteractionState, match_feature

GAMMA = 0.95
BETA = 5.0
GRAD_STEPS = 20
STEP_SIZE = 0.01
HORIZON_SLACK = 10
CRITERION_SCALE = 100.0


def legal_actions(game: Game) -> tuple[str, ...]:
    actions = list(DIRECTIONS)
    if game.desc.sword_for(game.desc.avatar_states[0]) is not None:
        actions.append(USE)
    return tuple(actions)


@dataclass(frozen=True)
class Segment:
    start: int
    actions: tuple
    interactions: tuple  # one tuple of Interactions per action


def _signature(step_interactions) -> frozenset:
    return frozenset((z.eta0, z.eta1, z.type) for z in step_interactions)


def split_trajectory(game: Game, level_text: str, actions) -> list[Segment]:
    """Cut the trajectory wherever the contact signature changes."""
    result = replay(game, level_text, actions)
    played = actions[: result.truncated_at] if result.truncated_at is not None else list(actions)
    segments: list[Segment] = []
    cur_start = 0
    cur_sig: frozenset | None = None
    for t, step in enumerate(result.interactions):
        sig = _signature(step)
        if not sig:
            continue  # contact-free steps stay with the running segment
        if cur_sig is not None and sig != cur_sig:
            segments.append(
                Segment(cur_start, tuple(played[cur_start:t]), tuple(map(tuple, result.interactions[cur_start:t])))
            )
            cur_start = t
        cur_sig = sig
    if played:
        segments.append(
            Segment(cur_start, tuple(played[cur_start:]), tuple(map(tuple, result.interactions[cur_start:])))
        )
    return segments


def create_feature(zeta) -> Feature:
    """Project a contact onto an abstract feature; weight, method and rep stay empty."""
    return Feature(eta0=zeta.eta0, eta1=zeta.eta1, type=zeta.type, avatar_state=zeta.avatar_state)


def segment_features(segment: Segment) -> tuple[Feature, ...]:
    seen: dict = {}
    for step in segment.interactions:
        for zeta in step:
            feature = create_feature(zeta)
            seen.setdefault(feature.match_key(), feature)
    return tuple(seen.values())


def analyze_repetitions(game: Game, state0: GameState, actions, features, method: str) -> list[Feature]:
    """Fill method and rep: rep is the peak per-cell occurrence count, floor 1."""
    probes = [f.concretized(1.0, method, 10 ** 9) for f in features]
    istate = InteractionState(state0.width, state0.height)
    per_cell: dict = {}
    state = state0.copy()
    for action in actions:
        if state.status != RUNNING:
            break
        state, zetas, _ = game.step(state, action)
        for zeta in zetas:
            feature = match_feature(probes, zeta)
            if feature is None or not istate.in_grid(zeta.pos):
                continue
            spot = zeta.pos if method == ALL else (zeta.pos, zeta.dir)
            key = (feature.match_key(), spot)
            per_cell[key] = per_cell.get(key, 0) + 1
    reps = {}
    for (fkey, _), n in per_cell.items():
        reps[fkey] = max(reps.get(fkey, 1), n)
    return [f.concretized(0.0, method, reps.get(f.match_key(), 1)) for f in features]


@dataclass
class _Mdp:
    feat: np.ndarray  # (steps, actions, features) rewarded match counts
    succ: np.ndarray  # (steps, actions) node index of successor, -1 if outside
    taken: np.ndarray  # (steps,) index of the recorded action
    horizon: int


def _build_mdp(game: Game, state0: GameState, actions, features) -> _Mdp:
    """Trajectory states plus their one-step successors; value 0 outside."""
    acts = legal_actions(game)
    n, a_n, k = len(actions), len(acts), len(features)
    probes = [f.concretized(1.0, f.method, f.rep) for f in features]
    index = {f.match_key(): i for i, f in enumerate(probes)}

    nodes: list = []  # (state, istate)
    node_index: dict = {}
    state, istate = state0.copy(), InteractionState(state0.width, state0.height)
    for action in actions:
        node_index[(state.key(), istate.key())] = len(nodes)
        nodes.append((state, istate))
        nxt, zetas, _ = game.step(state, action)
        istate = istate.copy()
        for zeta in zetas:
            feature = match_feature(probes, zeta)
            if feature is not None:
                istate.apply_interaction(zeta, feature)
        state = nxt

    feat = np.zeros((n, a_n, k))
    succ = np.full((n, a_n), -1, dtype=int)
    taken = np.array([acts.index(a) for a in actions], dtype=int)
    for t, (st, ist) in enumerate(nodes):
        for ai, action in enumerate(acts):
            nxt, zetas, _ = game.step(st, action)
            trial = ist.copy()
            for zeta in zetas:
                feature = match_feature(probes, zeta)
                if feature is None:
                    continue
                if trial.apply_interaction(zeta, feature) > 0:
                    feat[t, ai, index[feature.match_key()]] += 1
            succ[t, ai] = node_index.get((nxt.key(), trial.key()), -1)
    return _Mdp(feat, succ, taken, horizon=n + HORIZON_SLACK)


def _soft_values(mdp: _Mdp, theta: np.ndarray):
    """Boltzmann-policy value iteration with the exact weight gradient."""
    n, a_n, k = mdp.feat.shape
    value = np.zeros(n)
    dvalue = np.zeros((n, k))
    ext = np.concatenate([value, [0.0]])
    dext = np.concatenate([dvalue, np.zeros((1, k))])
    for _ in range(mdp.horizon):
        q = mdp.feat @ theta + GAMMA * ext[mdp.succ]
        dq = mdp.feat + GAMMA * dext[mdp.succ]
        q_shift = BETA * (q - q.max(axis=1, keepdims=True))
        pi = np.exp(q_shift)
        pi /= pi.sum(axis=1, keepdims=True)
        mean_dq = (pi[..., None] * dq).sum(axis=1)
        dpi = BETA * pi[..., None] * (dq - mean_dq[:, None, :])
        value = (pi * q).sum(axis=1)
        dvalue = (dpi * q[..., None]).sum(axis=1) + mean_dq
        ext = np.concatenate([value, [0.0]])
        dext = np.concatenate([dvalue, np.zeros((1, k))])
    q = mdp.feat @ theta + GAMMA * ext[mdp.succ]
    dq = mdp.feat + GAMMA * dext[mdp.succ]
    q_shift = BETA * (q - q.max(axis=1, keepdims=True))
    pi = np.exp(q_shift)
    pi /= pi.sum(axis=1, keepdims=True)
    return q, dq, pi


def _likelihood_from(mdp: _Mdp, theta: np.ndarray):
    q, dq, pi = _soft_values(mdp, theta)
    rows = np.arange(len(mdp.taken))
    loglik = float(np.log(pi[rows, mdp.taken] + 1e-300).sum())
    mean_dq = (pi[..., None] * dq).sum(axis=1)
    grad = BETA * (dq[rows, mdp.taken] - mean_dq[rows]).sum(axis=0)
    return loglik, grad


def likelihood_and_gradient(game: Game, state0: GameState, actions, features):
    """Log-likelihood of the actions under the features' weights, with gradient."""
    if not actions:
        raise ValueError("empty trajectory")
    mdp = _build_mdp(game, state0, actions, features)
    theta = np.array([f.weight for f in features], dtype=float)
    return _likelihood_from(mdp, theta)


def calculate_likelihood(game: Game, state0: GameState, actions, features) -> float:
    return likelihood_and_gradient(game, state0, actions, features)[0]


def mlirl(game: Game, state0: GameState, actions, features) -> tuple[list[Feature], float]:
    """Gradient ascent on the action log-likelihood; zero-initialized weights."""
    if not actions:
        raise ValueError("empty trajectory")
    mdp = _build_mdp(game, state0, actions, features)
    theta = np.zeros(len(features))
    for _ in range(GRAD_STEPS):
        _, grad = _likelihood_from(mdp, theta)
        theta = theta + STEP_SIZE * grad
    loglik, _ = _likelihood_from(mdp, theta)
    learned = [f.concretized(float(w), f.method, f.rep) for f, w in zip(features, theta)]
    return learned, loglik


@dataclass
class SegmentFit:
    features: list
    kappa: float


def fit_segment(game: Game, state0: GameState, actions, abstract_features) -> SegmentFit:
    """Learn weights for both marking methods, keep the likelier one."""
    best: SegmentFit | None = None
    for method in (EACH, ALL):
        candidates = analyze_repetitions(game, state0, actions, abstract_features, method)
        learned, kappa = mlirl(game, state0, actions, candidates)
        if best is None or kappa > best.kappa:
            best = SegmentFit(learned, kappa)
    return best


def create_goal(game: Game, state0: GameState, actions, features) -> tuple[GameState, Goal]:
    """Turn a fitted cluster into a goal and advance the game past it."""
    census = state0.census()
    tracker = FeatureTracker(state0.width, state0.height)
    state = state0.copy()
    for action in actions:
        if state.status != RUNNING:
            break
        state, zetas, _ = game.step(state, action)
        for zeta in zetas:
            feature = match_feature(features, zeta)
            if feature is not None:
                tracker.record(zeta, feature)
    entries = []
    for feature in features:
        criterion = 0.0
        if feature.weight >= 0:
            count_s = sum(census.get(leaf, 0) for leaf in game.desc.leaves(feature.eta1))
            if count_s == 0:
                warnings.warn(f"no {feature.eta1!r} sprites on level; criterion forced to 0")
            else:
                criterion = tracker.count(feature) / count_s * CRITERION_SCALE
        entries.append(GoalEntry(feature, criterion))
    return state, Goal(entries)


def _abstract_keys(features) -> frozenset:
    return frozenset(f.match_key() for f in features)


def _advance(game: Game, state: GameState, actions) -> GameState:
    for action in actions:
        if state.status != RUNNING:
            break
        state, _, _ = game.step(state, action)
    return state


def mgp_irl(game: Game, level_text: str, actions, kappa_t: float, meta: dict | None = None) -> GoalSequence:
    """Greedy left-to-right segment merging under the likelihood budget kappa_t."""
    if kappa_t < 0:
        raise ValueError("kappa_t must be >= 0")
    segments = split_trajectory(game, level_text, actions)
    goals: list[Goal] = []
    state = game.initial_state(level_text)

    cluster_actions: list = []
    cluster_fit: SegmentFit | None = None
    for segment in segments:
        phi_i = segment_features(segment)
        if cluster_fit is None:
            cluster_actions = list(segment.actions)
            cluster_fit = fit_segment(game, state, cluster_actions, phi_i)
            continue
        union: dict = {}
        for f in list(cluster_fit.features) + list(phi_i):
            union.setdefault(f.match_key(), Feature(f.eta0, f.eta1, f.type, f.avatar_state))
        merged_abstract = tuple(union.values())
        merged_actions = cluster_actions + list(segment.actions)
        fit_b = fit_segment(game, state, merged_actions, merged_abstract)
        if _abstract_keys(cluster_fit.features) == _abstract_keys(merged_abstract):
            cluster_actions, cluster_fit = merged_actions, fit_b
            continue
        after_cluster = _advance(game, state, cluster_actions)
        fit_i = fit_segment(game, after_cluster, list(segment.actions), phi_i)
        kappa_a = cluster_fit.kappa + fit_i.kappa
        if kappa_a - fit_b.kappa <= kappa_t:
            cluster_actions, cluster_fit = merged_actions, fit_b
        else:
            state, goal = create_goal(game, state, cluster_actions, cluster_fit.features)
            goals.append(goal)
            cluster_actions, cluster_fit = list(segment.actions), fit_i
    if cluster_fit is not None:
        _, goal = create_goal(game, state, cluster_actions, cluster_fit.features)
        goals.append(goal)
    return GoalSequence(goals=goals, meta=dict(meta or {}, kappa_t=kappa_t))
