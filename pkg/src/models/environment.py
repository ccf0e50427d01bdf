"""Environment and agent interfaces shared by the planner, baselines and harness."""

from __future__ import annotations

import copy
from abc import ABC, abstractmethod
from collections.abc import Hashable
from typing import Any, NamedTuple

import numpy as np

from src.logic.validator import ContractViolationError
from src.models.returns import ReturnVector

State = Hashable


class Transition(NamedTuple):
    """Result of sampling the environment once."""

    next_state: State
    reward: ReturnVector
    terminal: bool


class Environment(ABC):
    """Finite-horizon multi-objective MDP with undiscounted returns.

    Subclasses implement the pure ``transition`` function; the environment
    object tracks the current state and timestep of one episode. All
    randomness comes from the ``numpy.random.Generator`` passed in, so a
    clone can be simulated from any reached state without disturbing the
    real episode.

    Attributes:
        state: Current observable state
        t: Number of steps taken in the current episode
    """

    name: str = ""

    def __init__(self) -> None:
        self._state: State | None = None
        self._t = 0
        self._done = True

    @property
    @abstractmethod
    def n_objectives(self) -> int:
        """Length of every reward vector."""

    @property
    @abstractmethod
    def horizon(self) -> int:
        """Maximum number of steps in an episode."""

    @abstractmethod
    def num_actions(self, state: State) -> int:
        """Number of actions available in ``state``."""

    @abstractmethod
    def initial_state(self, rng: np.random.Generator) -> State:
        """Draw a start state from the initial-state distribution."""

    @abstractmethod
    def transition(
        self, state: State, t: int, action: int, rng: np.random.Generator
    ) -> Transition:
        """Sample one step from ``state`` at timestep ``t``; no side effects."""

    def outcomes(
        self, state: State, t: int, action: int
    ) -> list[tuple[float, Transition]]:
        """Enumerate ``(probability, transition)`` pairs for exact oracles."""
        raise NotImplementedError(f"{type(self).__name__} has no outcome model")

    def initial_outcomes(self) -> list[tuple[float, State]]:
        """Start states with their probabilities, for exact oracles."""
        raise NotImplementedError(f"{type(self).__name__} has no start distribution")

    def observation(self, state: State) -> Hashable:
        """Part of ``state`` a tabular learner keys its values on."""
        return state

    def config_dict(self) -> dict[str, Any]:
        """Parameters recorded in run metadata."""
        return {}

    @property
    def state(self) -> State:
        """Current state of the live episode."""
        if self._state is None:
            raise ContractViolationError("Environment has not been reset")
        return self._state

    @property
    def t(self) -> int:
        """Current timestep."""
        return self._t

    @property
    def done(self) -> bool:
        """Whether the current episode has terminated."""
        return self._done

    def reset(self, rng: np.random.Generator) -> State:
        """Start a new episode."""
        self._state = self.initial_state(rng)
        self._t = 0
        self._done = False
        return self._state

    def set_state(self, state: State, t: int = 0) -> None:
        """Position the environment at ``state`` and timestep ``t``."""
        if not (0 <= t <= self.horizon):
            raise ContractViolationError(
                f"Timestep {t} outside horizon [0, {self.horizon}]"
            )
        self._state = state
        self._t = t
        self._done = t >= self.horizon

    def step(self, action: int, rng: np.random.Generator) -> Transition:
        """Advance the live episode by one step.

        Raises:
            ContractViolationError: If the episode is over or the action
                index is invalid
        """
        if self._done:
            raise ContractViolationError("Cannot step a terminated episode")
        state = self.state
        self.check_action(state, action)
        result = self.transition(state, self._t, action, rng)
        self._t += 1
        terminal = result.terminal or self._t >= self.horizon
        self._state = result.next_state
        self._done = terminal
        if terminal != result.terminal:
            result = result._replace(terminal=terminal)
        return result

    def check_action(self, state: State, action: int) -> None:
        """Raise if ``action`` is not valid in ``state``."""
        count = self.num_actions(state)
        if not (0 <= action < count):
            raise ContractViolationError(
                f"Invalid action {action}; expected 0..{count - 1}"
            )

    def clone(self) -> Environment:
        """Copy sharing immutable parameters, with independent episode state."""
        return copy.copy(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(state={self._state!r}, t={self._t})"


class Agent(ABC):
    """A decision maker driven by the harness one real timestep at a time."""

    name: str = ""

    def begin_episode(self, env: Environment, episode: int) -> None:
        """Called after ``env.reset`` at the start of every episode."""

    @abstractmethod
    def act(self, env: Environment, accrued: ReturnVector) -> int:
        """Pick the action for the live episode's current state."""

    def observe(self, action: int, transition: Transition) -> None:
        """Called with the real transition produced by ``action``."""

    @property
    def executions_last_step(self) -> int:
        """Simulated policy executions consumed by the last ``act`` call."""
        return 0

    def episode_statistics(self) -> dict[str, Any] | None:
        """Optional per-episode debug statistics."""
        return None
