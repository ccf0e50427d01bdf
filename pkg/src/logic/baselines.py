"""Tabular Q-learning baselines under the same simulation budget as the planner.

Scalar Q-learning learns from a per-step scalar signal (the raw reward of
a single-objective domain or a linear scalarisation). Scalarised Q-learning
keeps a vector Q-table updated componentwise and applies the utility to
Q-vectors when choosing actions. Neither conditions on the return accrued
so far in the episode.

Per real timestep each agent plays ``n_exec`` simulated episodes from the
current real state on clones of the environment and learns from them; the
real action is then chosen epsilon-greedily from the updated table.
"""

from __future__ import annotations

import logging
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from src.logic.validator import ContractViolationError
from src.models.environment import Agent, Environment, Transition
from src.models.returns import ReturnVector
from src.models.utility import UtilityFunction, evaluate_utility

logger = logging.getLogger(__name__)

StateKey = tuple[Hashable, int]

GAMMA = 1.0


@dataclass(frozen=True)
class BaselineConfig:
    """Hyperparameters for the Q-learning baselines.

    Attributes:
        epsilon: Exploration rate when no decay is configured
        epsilon_decay: If set, epsilon at episode ``e`` is ``decay ** e``
        learning_rate: Step size alpha
        signal: Scalar learning signal, ``raw`` or ``linear``
        weights: Linear scalarisation weights for the ``linear`` signal
    """

    epsilon: float = 0.1
    epsilon_decay: float | None = None
    learning_rate: float = 0.1
    signal: str = "raw"
    weights: tuple[float, ...] | None = None

    def epsilon_at(self, episode: int) -> float:
        """Exploration rate for a 0-based episode index."""
        if self.epsilon_decay is not None:
            return float(self.epsilon_decay**episode)
        return self.epsilon

    def to_dict(self) -> dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "epsilon_decay": self.epsilon_decay,
            "learning_rate": self.learning_rate,
            "signal": self.signal,
            "weights": list(self.weights) if self.weights is not None else None,
        }

    @classmethod
    def from_section(cls, section: Mapping[str, Any] | None) -> BaselineConfig:
        section = section or {}
        weights = section.get("weights")
        decay = section.get("epsilon_decay")
        return cls(
            epsilon=float(section.get("epsilon", 0.1)),
            epsilon_decay=float(decay) if decay is not None else None,
            learning_rate=float(section.get("learning_rate", 0.1)),
            signal=str(section.get("signal", "raw")),
            weights=tuple(float(w) for w in weights) if weights is not None else None,
        )


class QTable:
    """Q-values keyed by (observation, timestep).

    Scalar tables hold one value per action; vector tables hold one
    ``n_objectives``-vector per action. Unvisited entries read as zero.
    """

    def __init__(
        self,
        learning_rate: float = 0.1,
        n_objectives: int | None = None,
        gamma: float = GAMMA,
    ) -> None:
        """Initialize an empty table.

        Args:
            learning_rate: Step size alpha
            n_objectives: Vector length, or None for a scalar table
            gamma: Discount factor (1 for the undiscounted episodic setting)
        """
        self.learning_rate = learning_rate
        self.n_objectives = n_objectives
        self.gamma = gamma
        self._values: dict[StateKey, NDArray[np.float64]] = {}

    @property
    def is_vector(self) -> bool:
        return self.n_objectives is not None

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, key: object) -> bool:
        return key in self._values

    def values(self, key: StateKey, n_actions: int) -> NDArray[np.float64]:
        """Q-values of every action at ``key`` (a copy; zeros if unvisited)."""
        stored = self._values.get(key)
        if stored is None:
            shape = (n_actions, self.n_objectives) if self.is_vector else (n_actions,)
            return np.zeros(shape)
        return stored.copy()

    def _row(self, key: StateKey, n_actions: int) -> NDArray[np.float64]:
        row = self._values.get(key)
        if row is None:
            row = self.values(key, n_actions)
            self._values[key] = row
        return row

    def update(
        self,
        key: StateKey,
        action: int,
        reward: float | ReturnVector,
        next_key: StateKey,
        done: bool,
        n_actions: int,
        next_action: int | None = None,
    ) -> None:
        """One temporal-difference update of ``Q(key, action)``.

        Scalar tables bootstrap from ``max_a' Q(next_key, a')``; vector
        tables bootstrap componentwise from ``Q(next_key, next_action)``.

        Raises:
            ContractViolationError: If a vector table gets no next action for
                a non-terminal transition or a reward of the wrong kind
        """
        row = self._row(key, n_actions)
        if self.is_vector:
            if not isinstance(reward, ReturnVector) or len(reward) != self.n_objectives:
                raise ContractViolationError(
                    f"Vector Q-table needs {self.n_objectives}-objective rewards"
                )
            target = reward.as_array()
            if not done:
                if next_action is None:
                    raise ContractViolationError(
                        "Vector Q-updates need the next greedy action"
                    )
                target = target + self.gamma * self.values(next_key, n_actions)[next_action]
        else:
            if isinstance(reward, ReturnVector):
                raise ContractViolationError("Scalar Q-table needs scalar rewards")
            target = float(reward)
            if not done:
                target += self.gamma * float(np.max(self.values(next_key, n_actions)))
        row[action] += self.learning_rate * (target - row[action])

    def to_dict(self) -> dict[str, Any]:
        """Debug snapshot (keys stringified)."""
        return {repr(k): v.tolist() for k, v in self._values.items()}


def q_update(
    table: QTable,
    s: StateKey,
    a: int,
    r: float | ReturnVector,
    s_next: StateKey,
    done: bool,
    n_actions: int,
    next_action: int | None = None,
) -> None:
    """``Q(s,a) += alpha * (r + gamma * max Q(s') * (1 - done) - Q(s,a))``."""
    table.update(s, a, r, s_next, done, n_actions, next_action)


def greedy_action(
    scores: Sequence[float] | NDArray[np.float64],
    rng: np.random.Generator | None = None,
) -> int:
    """Index of the best score; ties are broken uniformly with ``rng``
    or go to the lowest index without one."""
    array = np.asarray(scores, dtype=np.float64)
    best = np.flatnonzero(array == array.max())
    if rng is None or len(best) == 1:
        return int(best[0])
    return int(best[int(rng.integers(0, len(best)))])


def utility_scores(q_vectors: NDArray[np.float64], u: UtilityFunction) -> list[float]:
    """``u`` applied to each action's Q-vector."""
    return [evaluate_utility(u, ReturnVector.from_array(q)) for q in q_vectors]


def epsilon_greedy(
    scores: Sequence[float] | NDArray[np.float64],
    epsilon: float,
    rng: np.random.Generator,
) -> int:
    """Uniform action with probability ``epsilon``, else the greedy one."""
    if rng.random() < epsilon:
        return int(rng.integers(0, len(scores)))
    return greedy_action(scores, rng)


def scalarised_q_select(
    table: QTable,
    s: StateKey,
    u: UtilityFunction,
    n_actions: int,
    epsilon: float,
    rng: np.random.Generator,
) -> int:
    """Epsilon-greedy choice over ``u(Q-vector(s, a))``."""
    return epsilon_greedy(utility_scores(table.values(s, n_actions), u), epsilon, rng)


class QLearningAgent(Agent):
    """Scalar tabular Q-learning on a per-step scalar signal."""

    name = "q_learning"
    vector = False

    def __init__(
        self,
        cfg: BaselineConfig,
        u: UtilityFunction,
        n_exec: int,
        n_objectives: int,
        rng: np.random.Generator,
    ) -> None:
        """Initialize the agent.

        Raises:
            ContractViolationError: If the configured signal cannot produce
                a scalar from ``n_objectives``-vectors
        """
        if not self.vector:
            if cfg.signal == "raw" and n_objectives != 1:
                raise ContractViolationError(
                    f"The raw signal needs a single-objective domain, got {n_objectives}"
                )
            if cfg.signal == "linear" and (
                cfg.weights is None or len(cfg.weights) != n_objectives
            ):
                raise ContractViolationError(
                    f"The linear signal needs {n_objectives} weights"
                )
        self._cfg = cfg
        self._u = u
        self._n_exec = n_exec
        self._rng = rng
        self._table = QTable(
            cfg.learning_rate, n_objectives if self.vector else None
        )
        self._epsilon = cfg.epsilon_at(0)
        self._executions = 0
        self._simulated_episodes = 0

    @property
    def table(self) -> QTable:
        return self._table

    @property
    def epsilon(self) -> float:
        return self._epsilon

    def signal(self, reward: ReturnVector) -> float | ReturnVector:
        """Learning signal extracted from a reward vector."""
        if self.vector:
            return reward
        if self._cfg.signal == "linear":
            assert self._cfg.weights is not None
            return float(np.dot(self._cfg.weights, reward.as_array()))
        return reward[0]

    def scores(self, key: StateKey, n_actions: int) -> list[float]:
        """Greedy scores of every action at ``key``."""
        values = self._table.values(key, n_actions)
        if self.vector:
            return utility_scores(values, self._u)
        return [float(v) for v in values]

    def select(self, key: StateKey, n_actions: int) -> int:
        if key not in self._table:
            return int(self._rng.integers(0, n_actions))
        return epsilon_greedy(self.scores(key, n_actions), self._epsilon, self._rng)

    def _key(self, env: Environment) -> StateKey:
        return (env.observation(env.state), env.t)

    def learn(
        self,
        env: Environment,
        key: StateKey,
        action: int,
        transition: Transition,
        n_actions: int,
    ) -> None:
        """Update the table from one simulated transition of ``env``."""
        next_key = self._key(env)
        next_action = None
        if self.vector and not transition.terminal:
            next_n = env.num_actions(env.state)
            next_action = greedy_action(self.scores(next_key, next_n))
        self._table.update(
            key,
            action,
            self.signal(transition.reward),
            next_key,
            transition.terminal,
            n_actions,
            next_action,
        )

    def simulate(self, env: Environment) -> int:
        """Play one simulated episode on ``env`` to the end, learning online.

        Returns:
            Number of steps simulated
        """
        steps = 0
        while not env.done:
            key = self._key(env)
            n_actions = env.num_actions(env.state)
            action = self.select(key, n_actions)
            transition = env.step(action, self._rng)
            self.learn(env, key, action, transition, n_actions)
            steps += 1
        self._simulated_episodes += 1
        return steps

    def begin_episode(self, env: Environment, episode: int) -> None:
        self._epsilon = self._cfg.epsilon_at(episode)
        logger.debug(
            "%s episode %d: epsilon=%.6f, %d table entries",
            self.name,
            episode,
            self._epsilon,
            len(self._table),
        )

    def act(self, env: Environment, accrued: ReturnVector) -> int:
        for _ in range(self._n_exec):
            self.simulate(env.clone())
        self._executions = self._n_exec
        key = self._key(env)
        return self.select(key, env.num_actions(env.state))

    @property
    def executions_last_step(self) -> int:
        return self._executions

    def episode_statistics(self) -> dict[str, Any]:
        return {
            "epsilon": self._epsilon,
            "table_entries": len(self._table),
            "simulated_episodes": self._simulated_episodes,
        }


class ScalarisedQLearningAgent(QLearningAgent):
    """Vector Q-learning; the utility is applied to Q-vectors at selection."""

    name = "scalarised_q_learning"
    vector = True
