"""Explicit finite MDPs given as outcome tables.

Used for small exactly-solvable instances: bandit-style checks, oracle
equivalence runs and randomly generated test problems.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from typing import Any

import numpy as np

from src.models.environment import Environment, State, Transition
from src.models.returns import ReturnVector

Outcome = tuple[float, int, ReturnVector]


class TabularEnv(Environment):
    """MDP over integer states with explicit outcome lists per (state, action).

    Attributes:
        table: ``table[s][a]`` is a list of (probability, next_state, reward)
    """

    name = "tabular"

    def __init__(
        self,
        table: Sequence[Sequence[Sequence[Outcome]]],
        horizon: int,
        n_objectives: int = 1,
        initial_distribution: Sequence[float] | None = None,
        terminal_states: Sequence[int] = (),
    ) -> None:
        """Initialize a tabular environment.

        Args:
            table: Outcome lists indexed by state then action
            horizon: Episode length bound
            n_objectives: Reward vector length
            initial_distribution: Start-state probabilities (default: state 0)
            terminal_states: States that end the episode when entered

        Raises:
            ValueError: If probabilities, indices or reward lengths are invalid
        """
        super().__init__()
        errors = _table_errors(table, n_objectives)
        if horizon < 1:
            errors.append("horizon must be >= 1")
        n_states = len(table)
        if initial_distribution is None:
            initial_distribution = [1.0] + [0.0] * (n_states - 1)
        if len(initial_distribution) != n_states or not math.isclose(
            math.fsum(initial_distribution), 1.0, abs_tol=1e-9
        ):
            errors.append("initial_distribution must have one probability per state")
        if errors:
            raise ValueError("Invalid tabular environment: " + "; ".join(errors))

        self._table = [[list(outcomes) for outcomes in row] for row in table]
        self._cumulative = [
            [np.cumsum([p for p, _, _ in outcomes]) for outcomes in row]
            for row in self._table
        ]
        self._horizon = horizon
        self._n = n_objectives
        self._initial = np.asarray(initial_distribution, dtype=np.float64)
        self._terminal_states = frozenset(terminal_states)

    @property
    def n_objectives(self) -> int:
        return self._n

    @property
    def horizon(self) -> int:
        return self._horizon

    @property
    def n_states(self) -> int:
        return len(self._table)

    def num_actions(self, state: State) -> int:
        return len(self._table[int(state)])  # type: ignore[call-overload]

    def initial_state(self, rng: np.random.Generator) -> State:
        return int(rng.choice(len(self._initial), p=self._initial))

    def transition(
        self, state: State, t: int, action: int, rng: np.random.Generator
    ) -> Transition:
        s = int(state)  # type: ignore[call-overload]
        cumulative = self._cumulative[s][action]
        index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
        index = min(index, len(cumulative) - 1)
        _, next_state, reward = self._table[s][action][index]
        return Transition(next_state, reward, self._is_terminal(next_state, t + 1))

    def outcomes(
        self, state: State, t: int, action: int
    ) -> list[tuple[float, Transition]]:
        s = int(state)  # type: ignore[call-overload]
        return [
            (p, Transition(s_next, reward, self._is_terminal(s_next, t + 1)))
            for p, s_next, reward in self._table[s][action]
        ]

    def initial_outcomes(self) -> list[tuple[float, State]]:
        """Start states with positive probability."""
        return [(float(p), s) for s, p in enumerate(self._initial) if p > 0]

    def _is_terminal(self, state: int, t: int) -> bool:
        return t >= self._horizon or state in self._terminal_states

    def config_dict(self) -> dict[str, Any]:
        return {
            "n_objectives": self._n,
            "horizon": self._horizon,
            "initial_distribution": self._initial.tolist(),
            "terminal_states": sorted(self._terminal_states),
            "transitions": [
                [
                    [[p, s_next, list(reward.values)] for p, s_next, reward in outcomes]
                    for outcomes in row
                ]
                for row in self._table
            ],
        }

    @classmethod
    def from_config(cls, data: Mapping[str, Any]) -> TabularEnv:
        """Build from a JSON object (see ``config_dict`` for the layout).

        Raises:
            ValueError: If required fields are missing or invalid
        """
        for field in ("horizon", "transitions"):
            if field not in data:
                raise ValueError(f"Missing required field: {field}")
        n = int(data.get("n_objectives", 1))
        table = [
            [
                [(float(p), int(s_next), ReturnVector(_as_list(r))) for p, s_next, r in outcomes]
                for outcomes in row
            ]
            for row in data["transitions"]
        ]
        return cls(
            table,
            horizon=int(data["horizon"]),
            n_objectives=n,
            initial_distribution=data.get("initial_distribution"),
            terminal_states=data.get("terminal_states", ()),
        )


def _as_list(reward: Any) -> list[float]:
    if isinstance(reward, (int, float)):
        return [float(reward)]
    return [float(v) for v in reward]


def _table_errors(
    table: Sequence[Sequence[Sequence[Outcome]]], n_objectives: int
) -> list[str]:
    errors: list[str] = []
    if not table:
        return ["at least one state is required"]
    n_states = len(table)
    for s, row in enumerate(table):
        if not row:
            errors.append(f"state {s} has no actions")
        for a, outcomes in enumerate(row):
            if not outcomes:
                errors.append(f"state {s} action {a} has no outcomes")
                continue
            total = math.fsum(p for p, _, _ in outcomes)
            if not math.isclose(total, 1.0, abs_tol=1e-9) or any(
                p < 0 for p, _, _ in outcomes
            ):
                errors.append(f"state {s} action {a} probabilities sum to {total}")
            for _, s_next, reward in outcomes:
                if not (0 <= s_next < n_states):
                    errors.append(f"state {s} action {a} leads to unknown state {s_next}")
                if len(reward) != n_objectives:
                    errors.append(
                        f"state {s} action {a} reward has {len(reward)} objectives, "
                        f"expected {n_objectives}"
                    )
    return errors


def random_tabular_spec(
    rng: np.random.Generator,
    max_states: int = 5,
    max_actions: int = 3,
    max_outcomes: int = 3,
    max_horizon: int = 4,
    reward_values: Sequence[float] = (-1.0, -0.5, 0.0, 0.5, 1.0),
) -> dict[str, Any]:
    """Draw a small random scalar-reward MDP as a config mapping.

    Every state has the same number of actions; each (state, action) pair
    has between one and ``max_outcomes`` outcomes with Dirichlet weights.
    """
    n_states = int(rng.integers(1, max_states + 1))
    n_actions = int(rng.integers(2, max_actions + 1)) if max_actions > 1 else 1
    horizon = int(rng.integers(1, max_horizon + 1))
    transitions = []
    for _ in range(n_states):
        row = []
        for _ in range(n_actions):
            k = int(rng.integers(1, max_outcomes + 1))
            probabilities = rng.dirichlet(np.ones(k))
            row.append(
                [
                    [
                        float(probabilities[i]),
                        int(rng.integers(0, n_states)),
                        [float(rng.choice(reward_values))],
                    ]
                    for i in range(k)
                ]
            )
        transitions.append(row)
    # Dirichlet weights may not sum to exactly 1 in floating point
    for row in transitions:
        for outcomes in row:
            outcomes[-1][0] = 1.0 - math.fsum(o[0] for o in outcomes[:-1])
    return {"n_objectives": 1, "horizon": horizon, "transitions": transitions}
