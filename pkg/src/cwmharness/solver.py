"""Monte Carlo tree search over verified engines.

mcts_* runs plain UCT on perfect-information games: selection by UCB1,
one expansion per simulation, uniform-random rollouts, and backup of the
terminal reward vector, with each node judged from the perspective of the
player who acts there. Chance nodes are advanced uniformly at random and
hold no statistics.

ismcts_* handles imperfect information by determinizing: every simulation
asks the engine's resampler for a trajectory consistent with the
searching player's observation history, replays it to a concrete root,
then runs one UCT iteration with statistics keyed by the searching
player's observation fingerprint, so states the player cannot tell apart
share a node. Engines whose resampler fails more than half the time
cannot support the search and raise SearchError.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .gamespec import GameSpec, TERMINAL_PLAYER, derive_seed, is_chance_state
from .session import Session, SessionError, WalkRecord


class SearchError(RuntimeError):
    """The search cannot produce an action for this engine/state."""


@dataclass(frozen=True)
class SearchConfig:
    n_simulations: int = 1000
    exploration_constant: float = math.sqrt(2)
    rng_seed: int = 0
    max_rollout_depth: int = 200

    def __post_init__(self) -> None:
        if self.n_simulations < 1:
            raise ValueError("n_simulations must be >= 1")


@dataclass
class SearchResult:
    action: str
    visits: dict[str, int]
    simulations: int
    failed_determinizations: int = 0


def _best_action(visits: dict[str, int], order: list[str]) -> str:
    best = max(visits.values())
    for action in order:
        if visits.get(action, 0) == best:
            return action
    raise SearchError("no visited root action")


def _rewards_vector(session: Session, state: int, n_players: int) -> list[float]:
    rewards = session.rewards(state)
    if not isinstance(rewards, list):
        raise SearchError(f"rewards returned {type(rewards).__name__}, not a list")
    vec = [float(r) for r in rewards[:n_players]]
    while len(vec) < n_players:
        vec.append(0.0)
    return vec


def _rollout(
    session: Session,
    state: int,
    rng: random.Random,
    cfg: SearchConfig,
    n_players: int,
) -> list[float]:
    for _ in range(cfg.max_rollout_depth):
        player = session.current_player(state)
        if player == TERMINAL_PLAYER:
            break
        actions = session.legal_actions(state)
        if not isinstance(actions, list) or not actions:
            raise SearchError("dead end during rollout")
        state = session.apply_action(state, rng.choice(actions)).new_state
    return _rewards_vector(session, state, n_players)


# ---------------------------------------------------------------------------
# Perfect information: UCT on the concrete game tree.
# ---------------------------------------------------------------------------


class _TreeNode:
    __slots__ = ("state", "player", "actions", "chance", "children", "untried", "visits", "sums")

    def __init__(self, session: Session, state: int, spec: GameSpec):
        self.state = state
        self.player = session.current_player(state)
        self.actions: list[str] = (
            list(session.legal_actions(state)) if self.player != TERMINAL_PLAYER else []
        )
        self.chance = is_chance_state(self.player, self.actions, spec)
        self.children: dict[str, _TreeNode] = {}
        self.untried = list(self.actions)
        self.visits = 0
        self.sums = [0.0] * spec.n_players

    @property
    def terminal(self) -> bool:
        return self.player == TERMINAL_PLAYER


def mcts_search(
    session: Session, root: int, cfg: SearchConfig, spec: GameSpec
) -> SearchResult:
    """Full UCT search from a concrete root state; returns action and stats."""
    rng = random.Random(derive_seed(cfg.rng_seed, "mcts"))
    try:
        root_node = _TreeNode(session, root, spec)
    except SessionError as exc:
        raise SearchError(f"engine failed at the root: {exc}") from exc
    if root_node.terminal:
        raise SearchError("root state is terminal")
    if root_node.chance:
        raise SearchError("root state is a chance node")
    if not root_node.actions:
        raise SearchError("root state has no legal actions")

    for _ in range(cfg.n_simulations):
        try:
            _simulate(session, root_node, rng, cfg, spec)
        except SessionError as exc:
            raise SearchError(f"engine crashed during search: {exc}") from exc

    visits = {a: child.visits for a, child in root_node.children.items()}
    order = [a for a in root_node.actions if a in visits]
    return SearchResult(
        action=_best_action(visits, order), visits=visits, simulations=cfg.n_simulations
    )


def _simulate(
    session: Session,
    root: _TreeNode,
    rng: random.Random,
    cfg: SearchConfig,
    spec: GameSpec,
) -> None:
    path = [root]
    node = root
    while not node.terminal:
        if node.chance:
            action = rng.choice(node.actions)
            if action not in node.children:
                handle = session.apply_action(node.state, action).new_state
                node.children[action] = _TreeNode(session, handle, spec)
                if action in node.untried:
                    node.untried.remove(action)
            node = node.children[action]
            path.append(node)
            continue
        if node.untried:
            action = node.untried.pop(rng.randrange(len(node.untried)))
            handle = session.apply_action(node.state, action).new_state
            child = _TreeNode(session, handle, spec)
            node.children[action] = child
            path.append(child)
            rewards = (
                _rewards_vector(session, child.state, spec.n_players)
                if child.terminal
                else _rollout(session, child.state, rng, cfg, spec.n_players)
            )
            _backup(path, rewards)
            return
        node = node.children[_uct_pick(node, cfg)]
        path.append(node)
    rewards = _rewards_vector(session, node.state, spec.n_players)
    _backup(path, rewards)


def _uct_pick(node: _TreeNode, cfg: SearchConfig) -> str:
    log_parent = math.log(node.visits) if node.visits > 0 else 0.0
    best_action = node.actions[0]
    best_score = -math.inf
    for action in node.actions:
        child = node.children[action]
        exploit = child.sums[node.player] / child.visits
        explore = cfg.exploration_constant * math.sqrt(log_parent / child.visits)
        score = exploit + explore
        if score > best_score:
            best_score = score
            best_action = action
    return best_action


def _backup(path: list[_TreeNode], rewards: list[float]) -> None:
    for node in path:
        node.visits += 1
        for i, r in enumerate(rewards):
            node.sums[i] += r


def mcts_choose(session: Session, root: int, cfg: SearchConfig, spec: GameSpec) -> str:
    """The most-visited root action after a full UCT search."""
    if spec.imperfect:
        raise SearchError("mcts requires a perfect-information game; use ismcts")
    return mcts_search(session, root, cfg, spec).action


# ---------------------------------------------------------------------------
# Imperfect information: single-observer ISMCTS over determinizations.
# ---------------------------------------------------------------------------


class _InfoNode:
    __slots__ = ("visits", "edge_visits", "edge_sums", "order", "_n_players")

    def __init__(self, n_players: int):
        self.visits = 0
        self.edge_visits: dict[str, int] = {}
        self.edge_sums: dict[str, list[float]] = {}
        self.order: list[str] = []
        self._n_players = n_players

    def edge(self, action: str) -> tuple[int, list[float]]:
        return self.edge_visits.get(action, 0), self.edge_sums.get(
            action, [0.0] * self._n_players
        )

    def record(self, action: str, rewards: list[float]) -> None:
        self.visits += 1
        if action not in self.edge_visits:
            self.edge_visits[action] = 0
            self.edge_sums[action] = [0.0] * self._n_players
            self.order.append(action)
        self.edge_visits[action] += 1
        sums = self.edge_sums[action]
        for i, r in enumerate(rewards):
            sums[i] += r


def observed_entries(walk: WalkRecord, player: int) -> list[tuple[int, Optional[str]]]:
    """The (state, action) pairs of one player's turns, ready for resampling."""
    entries: list[tuple[int, Optional[str]]] = [
        (step.state, step.action) for step in walk.steps if step.acting_player == player
    ]
    if walk.final_state is not None and walk.final_player == player:
        entries.append((walk.final_state, None))
    return entries


def ismcts_search(
    session: Session,
    walk: WalkRecord,
    player: int,
    cfg: SearchConfig,
    spec: GameSpec,
) -> SearchResult:
    """Determinized UCT from one player's observation history."""
    entries = observed_entries(walk, player)
    if not entries or entries[-1][1] is not None:
        raise SearchError("it is not the searching player's turn")
    rng = random.Random(derive_seed(cfg.rng_seed, "ismcts"))
    nodes: dict[str, _InfoNode] = {}
    root_keys: Counter[str] = Counter()
    failures = 0

    for _ in range(cfg.n_simulations):
        root = _determinize(session, entries, player)
        if root is None:
            failures += 1
            continue
        try:
            root_key = session.observation_fingerprint(root, player)
            _simulate_determinized(session, root, root_key, player, nodes, rng, cfg, spec)
        except SessionError:
            failures += 1
            continue
        root_keys[root_key] += 1

    if failures * 2 > cfg.n_simulations:
        raise SearchError(
            f"{failures}/{cfg.n_simulations} determinizations failed; resampler unusable"
        )
    root_key = root_keys.most_common(1)[0][0]
    node = nodes[root_key]
    visits = dict(node.edge_visits)
    return SearchResult(
        action=_best_action(visits, node.order),
        visits=visits,
        simulations=cfg.n_simulations,
        failed_determinizations=failures,
    )


def _determinize(
    session: Session, entries: list[tuple[int, Optional[str]]], player: int
) -> Optional[int]:
    try:
        trajectory = session.resample(entries, player)
    except SessionError:
        return None
    if not isinstance(trajectory, list) or any(not isinstance(a, str) for a in trajectory):
        return None
    try:
        state = session.initial_state()
        for action in trajectory:
            state = session.apply_action(state, action).new_state
        if session.current_player(state) != player:
            return None
    except SessionError:
        return None
    return state


def _simulate_determinized(
    session: Session,
    state: int,
    root_key: str,
    player: int,
    nodes: dict[str, _InfoNode],
    rng: random.Random,
    cfg: SearchConfig,
    spec: GameSpec,
) -> None:
    path: list[tuple[_InfoNode, str, int]] = []  # (node, action, acting player)
    key: Optional[str] = root_key
    rewards: Optional[list[float]] = None

    for _ in range(cfg.max_rollout_depth):
        acting = session.current_player(state)
        if acting == TERMINAL_PLAYER:
            rewards = _rewards_vector(session, state, spec.n_players)
            break
        actions = session.legal_actions(state)
        if not isinstance(actions, list) or not actions:
            raise SessionError("dead end during determinized search")
        if is_chance_state(acting, actions, spec):
            state = session.apply_action(state, rng.choice(actions)).new_state
            key = None
            continue
        node_key = key if key is not None else session.observation_fingerprint(state, player)
        key = None
        node = nodes.get(node_key)
        if node is None:
            node = _InfoNode(spec.n_players)
            nodes[node_key] = node
        untried = [a for a in actions if a not in node.edge_visits]
        if untried:
            action = untried[rng.randrange(len(untried))]
            path.append((node, action, acting))
            state = session.apply_action(state, action).new_state
            rewards = _rollout(session, state, rng, cfg, spec.n_players)
            break
        action = _uct_pick_info(node, actions, acting, cfg)
        path.append((node, action, acting))
        state = session.apply_action(state, action).new_state

    if rewards is None:
        rewards = _rewards_vector(session, state, spec.n_players)
    for node, action, _ in path:
        node.record(action, rewards)


def _uct_pick_info(
    node: _InfoNode, actions: list[str], acting: int, cfg: SearchConfig
) -> str:
    log_parent = math.log(node.visits) if node.visits > 0 else 0.0
    best_action = actions[0]
    best_score = -math.inf
    for action in actions:
        n, sums = node.edge(action)
        if n == 0:
            return action
        score = sums[acting] / n + cfg.exploration_constant * math.sqrt(log_parent / n)
        if score > best_score:
            best_score = score
            best_action = action
    return best_action


def ismcts_choose(
    session: Session,
    walk: WalkRecord,
    player: int,
    cfg: SearchConfig,
    spec: GameSpec,
) -> str:
    """The most-visited action at the searching player's information set."""
    if not spec.imperfect:
        raise SearchError("ismcts requires an imperfect-information game; use mcts")
    return ismcts_search(session, walk, player, cfg, spec).action
