"""Risk-aware investment MDP.

Seven market states, each with its own stock model. Every step the agent
invests 0-3 euros; the price moves up with ``p_up`` (reward ``+a * gain``)
or down (reward ``-a * loss``) and the market jumps to a uniformly random
state. Under the exponential utility the risk-free policy of never
investing is optimal.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.models.environment import Environment, State, Transition
from src.models.returns import ReturnVector

DEFAULT_HORIZON = 10
INVESTMENTS = (0, 1, 2, 3)


@dataclass(frozen=True)
class StockModel:
    """Price dynamics of one market state."""

    p_up: float
    gain: float
    loss: float

    def to_dict(self) -> dict[str, float]:
        return {"p_up": self.p_up, "gain": self.gain, "loss": self.loss}


class RiskMDP(Environment):
    """Single-objective investment problem with a stochastic stock price."""

    name = "risk-mdp"

    def __init__(
        self,
        stocks: Sequence[StockModel],
        horizon: int = DEFAULT_HORIZON,
        investments: Sequence[int] = INVESTMENTS,
    ) -> None:
        """Initialize the investment MDP.

        Args:
            stocks: One stock model per market state
            horizon: Steps per episode
            investments: Amount invested by each action index

        Raises:
            ValueError: If a stock model or the horizon is invalid
        """
        super().__init__()
        errors = []
        if not stocks:
            errors.append("at least one market state is required")
        for i, stock in enumerate(stocks):
            if not (0.0 <= stock.p_up <= 1.0):
                errors.append(f"states[{i}].p_up must be in [0, 1]")
            if stock.gain < 0 or stock.loss < 0:
                errors.append(f"states[{i}] gain and loss must be >= 0")
        if horizon < 1:
            errors.append("horizon must be >= 1")
        if not investments or investments[0] != 0:
            errors.append("action 0 must invest nothing")
        if errors:
            raise ValueError("Invalid risk MDP: " + "; ".join(errors))

        self._stocks = tuple(stocks)
        self._horizon = horizon
        self._investments = tuple(investments)

    @property
    def n_objectives(self) -> int:
        return 1

    @property
    def horizon(self) -> int:
        return self._horizon

    @property
    def stocks(self) -> tuple[StockModel, ...]:
        return self._stocks

    @property
    def n_states(self) -> int:
        return len(self._stocks)

    def num_actions(self, state: State) -> int:
        return len(self._investments)

    def investment(self, action: int) -> int:
        """Euros invested by ``action``."""
        return self._investments[action]

    def initial_state(self, rng: np.random.Generator) -> State:
        return int(rng.integers(0, self.n_states))

    def initial_outcomes(self) -> list[tuple[float, State]]:
        return [(1.0 / self.n_states, s) for s in range(self.n_states)]

    def transition(
        self, state: State, t: int, action: int, rng: np.random.Generator
    ) -> Transition:
        stock = self._stocks[state]  # type: ignore[index]
        up = rng.random() < stock.p_up
        next_state = int(rng.integers(0, self.n_states))
        return Transition(
            next_state,
            self.reward(state, action, up),
            t + 1 >= self._horizon,
        )

    def reward(self, state: State, action: int, up: bool) -> ReturnVector:
        """Return of ``action`` for a realised price move."""
        stock = self._stocks[state]  # type: ignore[index]
        multiplier = stock.gain if up else -stock.loss
        return ReturnVector([self._investments[action] * multiplier])

    def outcomes(
        self, state: State, t: int, action: int
    ) -> list[tuple[float, Transition]]:
        stock = self._stocks[state]  # type: ignore[index]
        terminal = t + 1 >= self._horizon
        p_next = 1.0 / self.n_states
        result = []
        for up, p_move in ((True, stock.p_up), (False, 1.0 - stock.p_up)):
            if p_move == 0.0:
                continue
            reward = self.reward(state, action, up)
            result.extend(
                (p_move * p_next, Transition(s, reward, terminal))
                for s in range(self.n_states)
            )
        return result

    def config_dict(self) -> dict[str, Any]:
        return {
            "horizon": self._horizon,
            "investments": list(self._investments),
            "states": [stock.to_dict() for stock in self._stocks],
        }

    @classmethod
    def from_config(cls, data: Mapping[str, Any]) -> RiskMDP:
        """Build from ``risk-mdp.json``-style parameters.

        Raises:
            ValueError: If ``states`` is missing or malformed
        """
        if "states" not in data:
            raise ValueError("Missing required field: states")
        try:
            stocks = [
                StockModel(
                    p_up=float(s["p_up"]),
                    gain=float(s["gain"]),
                    loss=float(s["loss"]),
                )
                for s in data["states"]
            ]
        except (KeyError, TypeError) as e:
            raise ValueError(f"Invalid market state entry: {e}") from e
        return cls(
            stocks,
            horizon=int(data.get("horizon", DEFAULT_HORIZON)),
            investments=[int(v) for v in data.get("investments", INVESTMENTS)],
        )
