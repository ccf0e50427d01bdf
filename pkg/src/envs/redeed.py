"""Dynamic economic emissions dispatch with a random wind turbine.

A day is split into 24 hourly steps. Ten thermal generators serve a known
demand profile. The agent sets the output of one generator to one of a
fixed number of evenly spaced power settings; a slack generator balances
demand; a wind turbine replaces one unit and, during the storm hours,
produces 0.75, 1 or 1.25 times its planned output. All other units follow
a fixed dispatch schedule.

Each hour yields the negated global cost, emissions and constraint
penalty, so the weighted-sum utility is maximised by cheap, clean and
feasible dispatch.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from src.logic.validator import ContractViolationError
from src.models.environment import Environment, State, Transition
from src.models.returns import ReturnVector

HOURS = 24
DEFAULT_SETTINGS = 11
DEFAULT_STORM_HOURS = tuple(range(15, 24))
DEFAULT_WIND_MULTIPLIERS = (0.75, 1.0, 1.25)
DEFAULT_WIND_PROBABILITIES = (0.15, 0.70, 0.15)


@dataclass(frozen=True)
class Generator:
    """Cost, emission and operating-limit coefficients of one unit.

    Cost is ``a + b*P + c*P^2 + |d*sin(e*(p_min - P))|``; emissions are
    ``alpha + beta*P + gamma*P^2 + eta*exp(delta*P)`` before scaling.
    """

    a: float
    b: float
    c: float
    d: float
    e: float
    alpha: float
    beta: float
    gamma: float
    eta: float
    delta: float
    p_min: float
    p_max: float
    ramp_up: float
    ramp_down: float

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Generator:
        """Build from a coefficient record.

        Raises:
            ValueError: If a coefficient is missing or the limits are inverted
        """
        try:
            generator = cls(**{name: float(data[name]) for name in cls.__dataclass_fields__})
        except KeyError as e:
            raise ValueError(f"Generator record is missing coefficient {e}") from e
        if generator.p_min > generator.p_max:
            raise ValueError(
                f"Generator limits inverted: p_min={generator.p_min} > p_max={generator.p_max}"
            )
        if generator.ramp_up < 0 or generator.ramp_down < 0:
            raise ValueError("Generator ramp limits must be >= 0")
        return generator

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def redeed_cost(generator: Generator, power: float) -> float:
    """Local fuel cost of one unit, including the valve-point term."""
    return (
        generator.a
        + generator.b * power
        + generator.c * power * power
        + abs(generator.d * math.sin(generator.e * (generator.p_min - power)))
    )


def redeed_emissions(
    generator: Generator, power: float, scale: float = 10.0, wind: bool = False
) -> float:
    """Local emissions of one unit; the wind turbine emits nothing."""
    if wind:
        return 0.0
    return scale * (
        generator.alpha
        + generator.beta * power
        + generator.gamma * power * power
        + generator.eta * math.exp(generator.delta * power)
    )


def violation_penalty(violations: Sequence[float], weight: float) -> float:
    """``sum(C * |h + 1|)`` over violated constraints of magnitude ``h > 0``."""
    return sum(weight * abs(h + 1.0) for h in violations if h > 0.0)


def lambda_dispatch(
    demand: float, generators: Sequence[Generator], tolerance: float = 1e-6
) -> NDArray[np.float64]:
    """Equal-incremental-cost loading of ``generators`` to meet ``demand``.

    Bisects on the system marginal cost; each unit runs where its marginal
    cost ``b + 2cP`` equals it, clipped to its limits. Demand outside the
    combined limits loads every unit at the nearer limit.
    """
    b = np.array([g.b for g in generators])
    c2 = np.array([2.0 * g.c for g in generators])
    mins = np.array([g.p_min for g in generators])
    maxs = np.array([g.p_max for g in generators])

    def loads(marginal: float) -> NDArray[np.float64]:
        with np.errstate(divide="ignore", invalid="ignore"):
            p = np.where(c2 > 0, (marginal - b) / c2, np.where(marginal >= b, maxs, mins))
        return np.clip(p, mins, maxs)

    if demand <= mins.sum():
        return mins.copy()
    if demand >= maxs.sum():
        return maxs.copy()
    low = float(np.min(b + c2 * mins))
    high = float(np.max(b + c2 * maxs))
    for _ in range(200):
        mid = 0.5 * (low + high)
        total = float(loads(mid).sum())
        if abs(total - demand) <= tolerance:
            break
        if total > demand:
            high = mid
        else:
            low = mid
    return loads(mid)


@dataclass(frozen=True)
class HourlyDispatch:
    """Powers and global objectives of one hour."""

    powers: tuple[float, ...]
    cost: float
    emissions: float
    penalty: float
    infeasible: bool

    def reward(self) -> ReturnVector:
        return ReturnVector([-self.cost, -self.emissions, -self.penalty])


class Redeed(Environment):
    """Hourly dispatch where the agent controls one generator's setting.

    States are ``(hour, previous setting, previous hour's powers)``; the agent
    observes only the first two. The first hour has no previous setting
    (``-1``) and no ramp constraints.
    """

    name = "redeed"

    def __init__(
        self,
        generators: Sequence[Generator],
        demand: Sequence[float],
        emission_scale: float = 10.0,
        penalty_weight: float = 1e6,
        slack: int = 0,
        agent: int = 2,
        wind: int = 3,
        n_settings: int = DEFAULT_SETTINGS,
        storm_hours: Sequence[int] = DEFAULT_STORM_HOURS,
        wind_multipliers: Sequence[float] = DEFAULT_WIND_MULTIPLIERS,
        wind_probabilities: Sequence[float] = DEFAULT_WIND_PROBABILITIES,
        schedule: Sequence[Sequence[float]] | None = None,
        max_penalty: float | None = None,
    ) -> None:
        """Initialize the dispatch problem.

        Args:
            generators: Coefficient records, one per unit
            demand: Demand per hour (its length is the horizon)
            emission_scale: Emission scaling factor E
            penalty_weight: Violation weight C
            slack: Index of the slack generator (0-based)
            agent: Index of the agent's generator
            wind: Index of the wind turbine
            n_settings: Number of discrete agent power settings
            storm_hours: Hours (0-based) with random wind output
            wind_multipliers: Output multipliers during storm hours
            wind_probabilities: Probability of each multiplier
            schedule: Optional planned output per hour and generator; the
                default is equal-incremental-cost loading of each hour
            max_penalty: Penalty floor of an hour the slack cannot balance
                (default ``C * (slack p_max + 1)``)

        Raises:
            ValueError: Listing every invalid parameter
        """
        super().__init__()
        n = len(generators)
        errors = []
        if n < 3:
            errors.append("at least three generators are required")
        if not demand:
            errors.append("demand profile must not be empty")
        roles = {"slack": slack, "agent": agent, "wind": wind}
        for role, index in roles.items():
            if not (0 <= index < n):
                errors.append(f"{role} generator index {index} out of range")
        if len(set(roles.values())) != len(roles):
            errors.append("slack, agent and wind generators must differ")
        if n_settings < 2:
            errors.append("n_settings must be >= 2")
        if len(wind_multipliers) != len(wind_probabilities) or not math.isclose(
            math.fsum(wind_probabilities), 1.0, abs_tol=1e-9
        ):
            errors.append("wind probabilities must match multipliers and sum to 1")
        if any(not (0 <= h < len(demand)) for h in storm_hours):
            errors.append("storm hours must lie inside the demand profile")
        if schedule is not None and (
            len(schedule) != len(demand) or any(len(row) != n for row in schedule)
        ):
            errors.append("schedule must have one row per hour and one value per generator")
        if errors:
            raise ValueError("Invalid REDEED parameters: " + "; ".join(errors))

        self._generators = tuple(generators)
        self._demand = tuple(float(d) for d in demand)
        self.emission_scale = emission_scale
        self.penalty_weight = penalty_weight
        self.slack = slack
        self.agent = agent
        self.wind = wind
        self._storm_hours = frozenset(storm_hours)
        self._wind_multipliers = tuple(wind_multipliers)
        self._wind_cumulative = np.cumsum(wind_probabilities)
        self._wind_probabilities = tuple(wind_probabilities)
        controlled = self._generators[agent]
        self._settings = tuple(
            float(p) for p in np.linspace(controlled.p_min, controlled.p_max, n_settings)
        )
        self._explicit_schedule = schedule is not None
        if schedule is not None:
            self._schedule = np.asarray(schedule, dtype=np.float64)
        else:
            self._schedule = np.vstack(
                [lambda_dispatch(d, self._generators) for d in self._demand]
            )
        slack_gen = self._generators[slack]
        self.max_penalty = (
            max_penalty
            if max_penalty is not None
            else penalty_weight * (slack_gen.p_max + 1.0)
        )

    @property
    def n_objectives(self) -> int:
        return 3

    @property
    def horizon(self) -> int:
        return len(self._demand)

    @property
    def generators(self) -> tuple[Generator, ...]:
        return self._generators

    @property
    def demand(self) -> tuple[float, ...]:
        return self._demand

    @property
    def settings(self) -> tuple[float, ...]:
        """Agent power settings in MW, by action index."""
        return self._settings

    def is_storm_hour(self, hour: int) -> bool:
        return hour in self._storm_hours

    def planned_output(self, hour: int) -> NDArray[np.float64]:
        """Scheduled output of every generator at ``hour`` (read-only copy)."""
        return self._schedule[hour].copy()

    def num_actions(self, state: State) -> int:
        return len(self._settings)

    def initial_state(self, rng: np.random.Generator) -> State:
        return (0, -1, None)

    def initial_outcomes(self) -> list[tuple[float, State]]:
        return [(1.0, (0, -1, None))]

    def observation(self, state: State) -> tuple[int, int]:
        hour, setting, _ = state  # type: ignore[misc]
        return hour, setting

    def dispatch(
        self,
        hour: int,
        action: int,
        wind_multiplier: float,
        previous_powers: Sequence[float] | None = None,
    ) -> HourlyDispatch:
        """Balance demand for one hour and score it with :meth:`redeed_globals`.

        The slack generator covers ``demand - sum(other outputs)``
        (transmission losses are not modelled).
        """
        powers = self._schedule[hour].copy()
        powers[self.agent] = self._settings[action]
        powers[self.wind] *= wind_multiplier
        others = float(powers.sum() - powers[self.slack])
        powers[self.slack] = self._demand[hour] - others
        balanced = tuple(float(p) for p in powers)
        cost, emissions, penalty = self.redeed_globals(hour, balanced, previous_powers)
        return HourlyDispatch(
            balanced, cost, emissions, penalty, balanced[self.slack] < 0.0
        )

    def redeed_globals(
        self,
        hour: int,
        powers: Sequence[float],
        previous_powers: Sequence[float] | None = None,
    ) -> ReturnVector:
        """Global ``[cost, emissions, penalty]`` of one hour's power vector.

        Every generator except the wind turbine is penalised outside its
        limits and, given the previous hour's powers, outside its ramp
        limits. A negative slack output cannot be realised: it is clamped to
        zero for cost and emissions and the hour is charged at least
        ``max_penalty``.

        Raises:
            ContractViolationError: If the powers do not balance the hour's
                demand or have the wrong length
        """
        n = len(self._generators)
        if len(powers) != n or (previous_powers is not None and len(previous_powers) != n):
            raise ContractViolationError(f"REDEED power vectors need {n} entries")
        demand = self._demand[hour]
        if not math.isclose(math.fsum(powers), demand, rel_tol=1e-9, abs_tol=1e-6):
            raise ContractViolationError(
                f"Powers sum to {math.fsum(powers)}, hour {hour} demand is {demand}"
            )

        violations: list[float] = []
        for i, (g, p) in enumerate(zip(self._generators, powers)):
            if i == self.wind:
                continue
            violations += [p - g.p_max, g.p_min - p]
            if previous_powers is not None:
                violations += _ramp_violations(g, previous_powers[i], p)
        penalty = violation_penalty(violations, self.penalty_weight)
        if powers[self.slack] < 0.0:
            penalty = max(penalty, self.max_penalty)

        realised = [max(float(p), 0.0) for p in powers]
        cost = sum(redeed_cost(g, p) for g, p in zip(self._generators, realised))
        emissions = sum(
            redeed_emissions(g, p, self.emission_scale, wind=(i == self.wind))
            for i, (g, p) in enumerate(zip(self._generators, realised))
        )
        return ReturnVector([cost, emissions, penalty])

    def _wind_draw(self, hour: int, rng: np.random.Generator) -> float:
        if not self.is_storm_hour(hour):
            return 1.0
        index = int(np.searchsorted(self._wind_cumulative, rng.random(), side="right"))
        return self._wind_multipliers[min(index, len(self._wind_multipliers) - 1)]

    def transition(
        self, state: State, t: int, action: int, rng: np.random.Generator
    ) -> Transition:
        hour, _, previous_powers = state  # type: ignore[misc]
        result = self.dispatch(
            hour, action, self._wind_draw(hour, rng), previous_powers
        )
        return self._transition(hour, action, result)

    def outcomes(
        self, state: State, t: int, action: int
    ) -> list[tuple[float, Transition]]:
        hour, _, previous_powers = state  # type: ignore[misc]
        draws = (
            list(zip(self._wind_probabilities, self._wind_multipliers))
            if self.is_storm_hour(hour)
            else [(1.0, 1.0)]
        )
        return [
            (
                p,
                self._transition(
                    hour,
                    action,
                    self.dispatch(hour, action, m, previous_powers),
                ),
            )
            for p, m in draws
            if p > 0.0
        ]

    def _transition(self, hour: int, action: int, result: HourlyDispatch) -> Transition:
        next_state = (hour + 1, action, result.powers)
        return Transition(next_state, result.reward(), hour + 1 >= self.horizon)

    def config_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "generators": [g.to_dict() for g in self._generators],
            "demand": list(self._demand),
            "emission_scale": self.emission_scale,
            "penalty_weight": self.penalty_weight,
            "slack_generator": self.slack + 1,
            "agent_generator": self.agent + 1,
            "wind_generator": self.wind + 1,
            "n_settings": len(self._settings),
            "storm_hours": sorted(self._storm_hours),
            "wind_multipliers": list(self._wind_multipliers),
            "wind_probabilities": list(self._wind_probabilities),
            "max_penalty": self.max_penalty,
        }
        if self._explicit_schedule:
            data["schedule"] = self._schedule.tolist()
        return data

    @classmethod
    def from_config(cls, data: Mapping[str, Any]) -> Redeed:
        """Build from ``redeed-params.json``-style parameters.

        Generator roles are numbered from 1 in parameter files.

        Raises:
            ValueError: If required fields are missing or invalid
        """
        for field in ("generators", "demand"):
            if field not in data:
                raise ValueError(f"Missing required field: {field}")
        return cls(
            [Generator.from_dict(g) for g in data["generators"]],
            [float(d) for d in data["demand"]],
            emission_scale=float(data.get("emission_scale", 10.0)),
            penalty_weight=float(data.get("penalty_weight", 1e6)),
            slack=int(data.get("slack_generator", 1)) - 1,
            agent=int(data.get("agent_generator", 3)) - 1,
            wind=int(data.get("wind_generator", 4)) - 1,
            n_settings=int(data.get("n_settings", DEFAULT_SETTINGS)),
            storm_hours=[int(h) for h in data.get("storm_hours", DEFAULT_STORM_HOURS)],
            wind_multipliers=data.get("wind_multipliers", DEFAULT_WIND_MULTIPLIERS),
            wind_probabilities=data.get("wind_probabilities", DEFAULT_WIND_PROBABILITIES),
            schedule=data.get("schedule"),
            max_penalty=(
                float(data["max_penalty"]) if data.get("max_penalty") is not None else None
            ),
        )


def _ramp_violations(generator: Generator, previous: float, current: float) -> list[float]:
    return [current - previous - generator.ramp_up, previous - current - generator.ramp_down]
