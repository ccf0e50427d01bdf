"""Utility functions mapping return vectors to scalar utilities."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from typing import Any

from src.logic.validator import (
    ContractViolationError,
    validate_utility_spec,
)
from src.models.returns import ReturnVector, sum_returns

FEASIBILITY_TOLERANCE = 1e-9
# exp(600) ~ 3.8e260: sums of capped utilities stay finite
MAX_RISK_EXPONENT = 600.0


class UtilityFunction(ABC):
    """A declared mapping from a ReturnVector to a real utility.

    Evaluation is pure and deterministic. Subclasses declare the number of
    objectives they accept through ``n_objectives``.
    """

    kind: str = ""

    @property
    @abstractmethod
    def n_objectives(self) -> int:
        """Expected length of evaluated vectors."""

    @abstractmethod
    def _evaluate(self, values: tuple[float, ...]) -> float:
        """Evaluate on a vector of the right length."""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Declaration as stored in experiment configs."""

    def __call__(self, r: ReturnVector) -> float:
        return evaluate_utility(self, r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UtilityFunction):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(repr(sorted(self.to_dict().items())))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_dict()})"


class LinearUtility(UtilityFunction):
    """Weighted sum of objectives, one weight per objective."""

    kind = "linear"

    def __init__(self, weights: Sequence[float]) -> None:
        if not weights:
            raise ValueError("Linear utility needs at least one weight")
        self._weights = tuple(float(w) for w in weights)

    @property
    def weights(self) -> tuple[float, ...]:
        """Per-objective weights."""
        return self._weights

    @property
    def n_objectives(self) -> int:
        return len(self._weights)

    def _evaluate(self, values: tuple[float, ...]) -> float:
        return math.fsum(w * v for w, v in zip(self._weights, values))

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "weights": list(self._weights)}


class ExponentialRiskUtility(UtilityFunction):
    """Risk-averse exponential utility ``1 - exp(-k * R)`` on a scalar return.

    The exponent is capped at ``MAX_RISK_EXPONENT`` so catastrophic losses
    map to a large finite utility instead of ``-inf``.
    """

    kind = "exponential"

    def __init__(self, risk_aversion: float = 1.0) -> None:
        if risk_aversion <= 0:
            raise ValueError("risk_aversion must be positive")
        self._risk_aversion = float(risk_aversion)

    @property
    def risk_aversion(self) -> float:
        """Coefficient k."""
        return self._risk_aversion

    @property
    def n_objectives(self) -> int:
        return 1

    def _evaluate(self, values: tuple[float, ...]) -> float:
        return 1.0 - math.exp(min(-self._risk_aversion * values[0], MAX_RISK_EXPONENT))

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "risk_aversion": self._risk_aversion}


class FishwoodUtility(UtilityFunction):
    """Number of cooked fish: ``min(fish, floor(wood / wood_per_fish))``."""

    kind = "fishwood"

    def __init__(self, wood_per_fish: int = 2) -> None:
        if wood_per_fish < 1:
            raise ValueError("wood_per_fish must be >= 1")
        self._wood_per_fish = int(wood_per_fish)

    @property
    def n_objectives(self) -> int:
        return 2

    def _evaluate(self, values: tuple[float, ...]) -> float:
        fish, wood = values
        return float(min(fish, math.floor(wood / self._wood_per_fish)))

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "wood_per_fish": self._wood_per_fish}


class TargetVectorUtility(UtilityFunction):
    """Progress along the direction of a target return vector.

    Stores the target ``r_target`` and its unit direction ``e``. The utility
    of ``r`` is the largest ``c >= 0`` with ``r - c * e >= 0`` elementwise.
    """

    kind = "target"

    def __init__(self, target: Sequence[float]) -> None:
        self._target = ReturnVector(target)
        self._direction = unit_direction(self._target)

    @property
    def target(self) -> ReturnVector:
        """Target return vector."""
        return self._target

    @property
    def direction(self) -> tuple[float, ...]:
        """Unit vector ``target / |target|``."""
        return self._direction

    @property
    def n_objectives(self) -> int:
        return len(self._target)

    def _evaluate(self, values: tuple[float, ...]) -> float:
        return _max_progress(values, self._direction)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "target": list(self._target.values)}


def unit_direction(target: ReturnVector) -> tuple[float, ...]:
    """Euclidean unit vector of ``target``.

    Raises:
        ContractViolationError: If the target is zero or has no positive
            component (the supremum would be unbounded)
    """
    norm = math.sqrt(math.fsum(v * v for v in target))
    if norm == 0.0:
        raise ContractViolationError("Target vector must be non-zero")
    if not any(v > 0 for v in target):
        raise ContractViolationError(
            "Target vector needs at least one positive component"
        )
    return tuple(v / norm for v in target)


def _max_progress(values: Sequence[float], direction: Sequence[float]) -> float:
    upper = math.inf
    lower = 0.0
    for r_o, e_o in zip(values, direction):
        if e_o > 0:
            upper = min(upper, r_o / e_o)
        elif e_o < 0:
            lower = max(lower, r_o / e_o)
        elif r_o < 0:
            return 0.0
    tolerance = FEASIBILITY_TOLERANCE * max(1.0, abs(upper))
    if upper < 0 or lower > upper + tolerance:
        return 0.0
    return upper


def evaluate_utility(u: UtilityFunction, r: ReturnVector) -> float:
    """Apply ``u`` to a full return.

    Args:
        u: Utility function
        r: Return vector, one entry per objective

    Returns:
        Scalar utility

    Raises:
        ContractViolationError: If ``r`` has the wrong length
    """
    if len(r) != u.n_objectives:
        raise ContractViolationError(
            f"Utility '{u.kind}' expects {u.n_objectives} objectives, "
            f"got a vector of length {len(r)}"
        )
    return u._evaluate(r.values)


def target_vector_utility(r: ReturnVector, r_target: ReturnVector) -> float:
    """Largest ``c >= 0`` with ``r - c * r_target / |r_target| >= 0``.

    Components where the direction is zero require ``r_o >= 0``. Returns 0
    when no non-negative ``c`` is feasible.

    Raises:
        ContractViolationError: On length mismatch or a zero target
    """
    if len(r) != len(r_target):
        raise ContractViolationError(
            f"ReturnVector length mismatch: {len(r)} vs {len(r_target)}"
        )
    return _max_progress(r.values, unit_direction(r_target))


def episode_utility(
    u: UtilityFunction,
    rewards: Sequence[ReturnVector],
    application: str = "cumulative",
) -> float:
    """Score one episode from its per-step rewards.

    ``cumulative`` applies ``u`` to the summed return; ``per_step`` applies
    ``u`` to every reward and sums the utilities.
    """
    if application == "per_step":
        return math.fsum(evaluate_utility(u, r) for r in rewards)
    return evaluate_utility(u, sum_returns(rewards, u.n_objectives))


def utility_from_dict(spec: Mapping[str, Any]) -> UtilityFunction:
    """Build a utility function from its config declaration.

    Raises:
        ValueError: If the declaration is invalid
    """
    errors = validate_utility_spec(spec)
    if errors:
        raise ValueError(f"Invalid utility declaration: {errors[0].message}")

    kind = spec["kind"]
    if kind == "linear":
        return LinearUtility(spec["weights"])
    if kind == "exponential":
        return ExponentialRiskUtility(spec.get("risk_aversion", 1.0))
    if kind == "fishwood":
        return FishwoodUtility(spec.get("wood_per_fish", 2))
    return TargetVectorUtility(spec["target"])
