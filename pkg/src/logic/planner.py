"""Distributional Monte Carlo tree search.

Every learning iteration walks the expectimax tree with Thompson sampling,
expands one new outcome, finishes the episode with a uniform-random rollout
and backpropagates the *cumulative* return (accrued before the root plus
everything collected afterwards) into every chance node on the path. Under
ESR the utility is applied to that full return before the update; under SER
the return vector itself is absorbed and the utility is applied to replicate
means at selection time.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Hashable
from typing import Any

import numpy as np

from src.logic.bts import (
    BootstrapDistribution,
    Criterion,
    greedy_select,
    new_distribution,
    thompson_select,
)
from src.logic.validator import ContractViolationError
from src.models.environment import Agent, Environment, Transition
from src.models.planner_config import PlannerConfig
from src.models.returns import ReturnVector, sum_returns
from src.models.tree import ChanceNode, DecisionNode, tree_statistics
from src.models.utility import UtilityFunction, evaluate_utility

logger = logging.getLogger(__name__)


def inject_artificial_return(
    rollout: ReturnVector, cfg: PlannerConfig, rng: np.random.Generator
) -> ReturnVector:
    """Possibly replace a rollout return with a uniform random vector.

    With probability ``p`` the rollout portion is redrawn uniformly from the
    configured per-objective bounds; otherwise it is returned unchanged.

    Raises:
        ContractViolationError: If exploration is disabled or the bounds do
            not match the rollout's length
    """
    settings = cfg.artificial_returns
    if settings is None:
        raise ContractViolationError("Artificial-return exploration is disabled")
    if len(settings.low) != len(rollout):
        raise ContractViolationError(
            f"Artificial-return bounds have {len(settings.low)} objectives, "
            f"rollout has {len(rollout)}"
        )
    if rng.random() >= settings.probability:
        return rollout
    return ReturnVector.from_array(rng.uniform(settings.low, settings.high))


def _rollout(
    env: Environment, rng: np.random.Generator
) -> list[ReturnVector]:
    rewards: list[ReturnVector] = []
    while not env.done:
        action = int(rng.integers(0, env.num_actions(env.state)))
        rewards.append(env.step(action, rng).reward)
    return rewards


def _select_chance(
    node: DecisionNode,
    env: Environment,
    cfg: PlannerConfig,
    u: UtilityFunction,
    rng: np.random.Generator,
) -> ChanceNode:
    untried = [a for a in range(env.num_actions(node.state)) if a not in node.children]
    if untried:
        action = untried[int(rng.integers(0, len(untried)))]
        chance = ChanceNode(
            node.state,
            action,
            _new_distribution(cfg, env.n_objectives),
        )
        node.children[action] = chance
        return chance

    actions = node.expanded_actions()
    index = thompson_select(
        [node.children[a].distribution for a in actions],
        u if cfg.criterion is Criterion.SER else None,
        rng,
    )
    return node.children[actions[index]]


def _new_distribution(cfg: PlannerConfig, n_objectives: int) -> BootstrapDistribution:
    return new_distribution(
        cfg.replicates, cfg.criterion, n_objectives, cfg.alpha_prior
    )


def learning_iteration(
    root: DecisionNode,
    env: Environment,
    accrued: ReturnVector,
    cfg: PlannerConfig,
    u: UtilityFunction,
    rng: np.random.Generator,
    accrued_step_utility: float = 0.0,
) -> ReturnVector:
    """Run one select / expand / simulate / backpropagate pass.

    Args:
        root: Planning root
        env: Clone of the live environment positioned at ``root.state``;
            consumed by this call
        accrued: Return collected in the live episode before the root
        cfg: Planner settings
        u: Utility function
        rng: Planner random stream
        accrued_step_utility: Sum of per-step utilities before the root
            (``per_step`` utility application only)

    Returns:
        The cumulative return backpropagated along the path
    """
    path: list[ChanceNode] = []
    visited: list[DecisionNode] = [root]
    tree_rewards: list[ReturnVector] = []

    node = root
    while not env.done:
        chance = _select_chance(node, env, cfg, u, rng)
        transition = env.step(chance.action, rng)
        child, created = chance.child_for(transition)
        path.append(chance)
        visited.append(child)
        tree_rewards.append(transition.reward)
        node = child
        if created:
            break

    rollout_rewards = _rollout(env, rng)
    n = env.n_objectives
    rollout = sum_returns(rollout_rewards, n)
    if cfg.artificial_returns is not None and rollout_rewards:
        injected = inject_artificial_return(rollout, cfg, rng)
        if injected is not rollout:
            rollout = injected
            rollout_rewards = [injected]

    cumulative = accrued + sum_returns(tree_rewards, n) + rollout

    observation: float | ReturnVector
    if cfg.criterion is Criterion.SER:
        observation = cumulative
    elif cfg.utility_application == "per_step":
        observation = accrued_step_utility + math.fsum(
            evaluate_utility(u, r) for r in tree_rewards + rollout_rewards
        )
    else:
        observation = evaluate_utility(u, cumulative)

    for chance in path:
        chance.distribution.update(observation, rng)
        chance.visit_count += 1
    for decision in visited:
        decision.visit_count += 1
    return cumulative


def plan_step(
    root: DecisionNode,
    env: Environment,
    accrued: ReturnVector,
    cfg: PlannerConfig,
    u: UtilityFunction,
    rng: np.random.Generator,
    accrued_step_utility: float = 0.0,
) -> int:
    """Grow the tree from ``root`` and return the execution-phase action.

    Runs ``cfg.iterations_per_step`` learning iterations, each on a fresh
    clone of ``env``, then picks the root action with the best pooled mean
    (ESR) or the best utility of the pooled mean vector (SER).

    Raises:
        ContractViolationError: If the root or the environment is terminal
    """
    if root.terminal or env.done:
        raise ContractViolationError("Cannot plan from a terminal state")
    for _ in range(cfg.iterations_per_step):
        learning_iteration(root, env.clone(), accrued, cfg, u, rng, accrued_step_utility)

    actions = root.expanded_actions()
    index = greedy_select(
        [root.children[a].distribution for a in actions],
        u if cfg.criterion is Criterion.SER else None,
    )
    logger.debug(
        "t=%d planned action %d after %d iterations (root visits %d)",
        env.t,
        actions[index],
        cfg.iterations_per_step,
        root.visit_count,
    )
    return actions[index]


def advance_root(
    root: DecisionNode, action: int, transition: Transition
) -> DecisionNode:
    """Descend to the node matching the real outcome of ``action``.

    An outcome never seen during planning gets a fresh node.

    Raises:
        ContractViolationError: If ``action`` was never expanded at ``root``
    """
    chance = root.children.get(action)
    if chance is None:
        raise ContractViolationError(f"Action {action} has no chance node at root")
    child, _ = chance.child_for(transition)
    return child


class DMCTSAgent(Agent):
    """Planner driven by the harness one real step at a time.

    With ``reuse_tree`` the agent keeps one root per initial state and
    follows the real outcome down the tree, so statistics accumulate across
    steps and episodes. Without it every step plans from a new root.
    """

    name = "dmcts"

    def __init__(
        self, cfg: PlannerConfig, u: UtilityFunction, rng: np.random.Generator
    ) -> None:
        self._cfg = cfg
        self._u = u
        self._rng = rng
        self._roots: dict[Hashable, DecisionNode] = {}
        self._episode_root: DecisionNode | None = None
        self._root: DecisionNode | None = None
        self._step_utility = 0.0
        self._executions = 0

    @property
    def config(self) -> PlannerConfig:
        return self._cfg

    @property
    def root(self) -> DecisionNode | None:
        """Current planning root."""
        return self._root

    def begin_episode(self, env: Environment, episode: int) -> None:
        self._step_utility = 0.0
        if self._cfg.reuse_tree:
            root = self._roots.get(env.state)
            if root is None:
                root = DecisionNode(env.state)
                self._roots[env.state] = root
            self._root = root
            self._episode_root = root
        else:
            self._root = None
            self._episode_root = None

    def act(self, env: Environment, accrued: ReturnVector) -> int:
        if self._root is None:
            self._root = DecisionNode(env.state)
            if self._episode_root is None:
                self._episode_root = self._root
        action = plan_step(
            self._root, env, accrued, self._cfg, self._u, self._rng, self._step_utility
        )
        self._executions = self._cfg.iterations_per_step
        return action

    def observe(self, action: int, transition: Transition) -> None:
        if self._cfg.utility_application == "per_step":
            self._step_utility += evaluate_utility(self._u, transition.reward)
        if self._cfg.reuse_tree and self._root is not None:
            self._root = advance_root(self._root, action, transition)
        else:
            self._root = None

    @property
    def executions_last_step(self) -> int:
        return self._executions

    def episode_statistics(self) -> dict[str, Any] | None:
        if self._episode_root is None:
            return None
        return tree_statistics(self._episode_root)
