"""Planner settings for the distributional tree search."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from src.logic.bts import DEFAULT_REPLICATES, Criterion
from src.logic.validator import (
    ConfigError,
    validate_artificial_returns,
    validate_planner_section,
)


@dataclass(frozen=True)
class ArtificialReturnConfig:
    """Exploration by replacing rollout returns with uniform random vectors."""

    probability: float
    low: tuple[float, ...]
    high: tuple[float, ...]

    def __post_init__(self) -> None:
        errors = validate_artificial_returns(self.to_dict())
        if errors:
            raise ConfigError(errors)

    def to_dict(self) -> dict[str, Any]:
        return {
            "probability": self.probability,
            "low": list(self.low),
            "high": list(self.high),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ArtificialReturnConfig:
        return cls(
            probability=float(data["probability"]),
            low=tuple(float(v) for v in data["low"]),
            high=tuple(float(v) for v in data["high"]),
        )


@dataclass(frozen=True)
class PlannerConfig:
    """Hyperparameters of one planner instance.

    Attributes:
        criterion: ESR or SER
        replicates: Bootstrap replicates J per chance node
        alpha_prior: Initial alpha of every replicate
        iterations_per_step: Learning iterations before each real action
        reuse_tree: Keep the subtree below the real outcome between steps
            (and the root between episodes)
        utility_application: ``cumulative`` or ``per_step``
        artificial_returns: Optional rollout-replacement exploration
    """

    criterion: Criterion = Criterion.ESR
    replicates: int = DEFAULT_REPLICATES
    alpha_prior: float = 1.0
    iterations_per_step: int = 1
    reuse_tree: bool = True
    utility_application: str = "cumulative"
    artificial_returns: ArtificialReturnConfig | None = field(default=None)

    def __post_init__(self) -> None:
        errors = validate_planner_section(
            {
                "J": self.replicates,
                "alpha_prior": self.alpha_prior,
                "iterations_multiplier": self.iterations_per_step,
                "utility_application": self.utility_application,
            },
            field="planner",
        )
        if errors:
            raise ConfigError(errors)

    @classmethod
    def from_section(
        cls,
        section: Mapping[str, Any] | None,
        criterion: Criterion,
        n_exec: int,
    ) -> PlannerConfig:
        """Build from an experiment config's ``planner`` section.

        ``iterations_per_step`` is ``n_exec`` times the section's
        ``iterations_multiplier`` (default 1).
        """
        section = section or {}
        artificial = section.get("artificial_returns")
        return cls(
            criterion=criterion,
            replicates=int(section.get("J", DEFAULT_REPLICATES)),
            alpha_prior=float(section.get("alpha_prior", 1.0)),
            iterations_per_step=n_exec * int(section.get("iterations_multiplier", 1)),
            reuse_tree=bool(section.get("reuse_tree", True)),
            utility_application=str(section.get("utility_application", "cumulative")),
            artificial_returns=(
                ArtificialReturnConfig.from_dict(artificial) if artificial else None
            ),
        )
