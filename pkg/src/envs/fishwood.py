"""Fishwood: gather fish at the river and wood in the woods.

Two locations, two actions. Each step the agent stays or moves, then tries
to gather at the location it ends up in: a fish with probability
``p_fish`` at the river or a unit of wood with ``p_wood`` in the woods.
Rewards are ``[fish, wood]``.
"""

from __future__ import annotations

from collections.abc import Mapping
from typing import Any

import numpy as np

from src.models.environment import Environment, State, Transition
from src.models.returns import ReturnVector

RIVER = 0
WOODS = 1
STAY = 0
MOVE = 1

LOCATIONS = {"river": RIVER, "woods": WOODS}

_NOTHING = ReturnVector([0.0, 0.0])
_FISH = ReturnVector([1.0, 0.0])
_WOOD = ReturnVector([0.0, 1.0])


class Fishwood(Environment):
    """Two-objective gathering task with a fixed start location."""

    name = "fishwood"

    def __init__(
        self,
        p_fish: float = 0.25,
        p_wood: float = 0.65,
        horizon: int = 13,
        start: int = RIVER,
    ) -> None:
        """Initialize Fishwood.

        Raises:
            ValueError: If a probability is outside [0, 1], the horizon is
                not positive or the start location is unknown
        """
        super().__init__()
        errors = []
        for name, p in (("p_fish", p_fish), ("p_wood", p_wood)):
            if not (0.0 <= p <= 1.0):
                errors.append(f"{name} must be in [0, 1], got {p}")
        if horizon < 1:
            errors.append("horizon must be >= 1")
        if start not in (RIVER, WOODS):
            errors.append(f"unknown start location {start}")
        if errors:
            raise ValueError("Invalid Fishwood parameters: " + "; ".join(errors))
        self.p_fish = p_fish
        self.p_wood = p_wood
        self._horizon = horizon
        self.start = start

    @property
    def n_objectives(self) -> int:
        return 2

    @property
    def horizon(self) -> int:
        return self._horizon

    def num_actions(self, state: State) -> int:
        return 2

    def initial_state(self, rng: np.random.Generator) -> State:
        return self.start

    def initial_outcomes(self) -> list[tuple[float, State]]:
        return [(1.0, self.start)]

    @staticmethod
    def destination(state: State, action: int) -> int:
        """Location reached by ``action``; movement is deterministic."""
        return int(state) if action == STAY else 1 - int(state)  # type: ignore[call-overload]

    def success_probability(self, location: int) -> float:
        return self.p_fish if location == RIVER else self.p_wood

    def transition(
        self, state: State, t: int, action: int, rng: np.random.Generator
    ) -> Transition:
        location = self.destination(state, action)
        success = rng.random() < self.success_probability(location)
        return Transition(
            location, self._reward(location, success), t + 1 >= self._horizon
        )

    def outcomes(
        self, state: State, t: int, action: int
    ) -> list[tuple[float, Transition]]:
        location = self.destination(state, action)
        p = self.success_probability(location)
        terminal = t + 1 >= self._horizon
        return [
            (prob, Transition(location, self._reward(location, success), terminal))
            for prob, success in ((p, True), (1.0 - p, False))
            if prob > 0.0
        ]

    @staticmethod
    def _reward(location: int, success: bool) -> ReturnVector:
        if not success:
            return _NOTHING
        return _FISH if location == RIVER else _WOOD

    def config_dict(self) -> dict[str, Any]:
        return {
            "p_fish": self.p_fish,
            "p_wood": self.p_wood,
            "horizon": self._horizon,
            "start": "river" if self.start == RIVER else "woods",
        }

    @classmethod
    def from_config(cls, data: Mapping[str, Any]) -> Fishwood:
        """Build from ``fishwood.json``-style parameters.

        Raises:
            ValueError: If the start location name is unknown
        """
        start = data.get("start", "river")
        if start not in LOCATIONS:
            raise ValueError(f"Unknown start location: {start!r}")
        return cls(
            p_fish=float(data.get("p_fish", 0.25)),
            p_wood=float(data.get("p_wood", 0.65)),
            horizon=int(data.get("horizon", 13)),
            start=LOCATIONS[start],
        )
