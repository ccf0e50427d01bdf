"""Experiment configuration and learning-curve containers."""

from __future__ import annotations

import copy
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from src.logic.bts import Criterion
from src.logic.validator import ConfigError, ValidationError, validate_experiment_dict
from src.models.planner_config import PlannerConfig
from src.models.utility import UtilityFunction, utility_from_dict

DEFAULT_RUNS = 10
DEFAULT_SMOOTHING_WINDOW = 50


@dataclass
class ExperimentConfig:
    """A complete, self-describing experiment definition.

    Attributes:
        name: Experiment name, also the output sub-directory
        domain: Environment id (see ``src.envs.ENVIRONMENTS``)
        algorithm: ``dmcts``, ``q_learning`` or ``scalarised_q_learning``
        criterion: ESR or SER
        utility: Utility declaration (``kind`` plus parameters)
        n_exec: Simulated policy executions per real timestep
        episodes: Episodes per run
        runs: Independent seeded runs
        base_seed: Root of the per-run seed schedule
        workers: Size of the run worker pool
        smoothing_window: Sliding window of the smoothed mean column
        planner: Planner hyperparameters
        baseline: Q-learning hyperparameters
        environment: Parameter-file reference and inline overrides
        output_dir: Output root (``None`` defers to the CLI)
        overrides: Dotted overrides applied after file parsing
    """

    name: str
    domain: str
    algorithm: str
    utility: dict[str, Any]
    n_exec: int
    episodes: int
    criterion: Criterion = Criterion.ESR
    runs: int = DEFAULT_RUNS
    base_seed: int = 0
    workers: int = 1
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW
    planner: dict[str, Any] = field(default_factory=dict)
    baseline: dict[str, Any] = field(default_factory=dict)
    environment: dict[str, Any] = field(default_factory=dict)
    output_dir: str | None = None
    overrides: list[str] = field(default_factory=list)

    def validate(self) -> list[ValidationError]:
        """Re-run field validation on the current values."""
        return validate_experiment_dict(self.to_dict())

    def utility_function(self) -> UtilityFunction:
        return utility_from_dict(self.utility)

    def planner_config(self) -> PlannerConfig:
        """Planner settings with ``n_exec`` iterations per real step."""
        return PlannerConfig.from_section(self.planner, self.criterion, self.n_exec)

    def to_dict(self) -> dict[str, Any]:
        """Convert to a JSON-serialisable dictionary.

        Returns:
            Dictionary representation
        """
        return {
            "name": self.name,
            "domain": self.domain,
            "algorithm": self.algorithm,
            "criterion": self.criterion.value,
            "utility": copy.deepcopy(self.utility),
            "n_exec": self.n_exec,
            "episodes": self.episodes,
            "runs": self.runs,
            "base_seed": self.base_seed,
            "workers": self.workers,
            "smoothing_window": self.smoothing_window,
            "planner": copy.deepcopy(self.planner),
            "baseline": copy.deepcopy(self.baseline),
            "environment": copy.deepcopy(self.environment),
            "output_dir": self.output_dir,
            "overrides": list(self.overrides),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ExperimentConfig:
        """Create from a parsed JSON object.

        Args:
            data: Dictionary representation

        Returns:
            ExperimentConfig instance

        Raises:
            ConfigError: Listing every violated field
        """
        errors = validate_experiment_dict(data)
        if errors:
            raise ConfigError(errors)
        return cls(
            name=str(data["name"]).strip(),
            domain=data["domain"],
            algorithm=data["algorithm"],
            criterion=Criterion(data.get("criterion", "ESR")),
            utility=copy.deepcopy(dict(data["utility"])),
            n_exec=int(data["n_exec"]),
            episodes=int(data["episodes"]),
            runs=int(data.get("runs", DEFAULT_RUNS)),
            base_seed=int(data.get("base_seed", 0)),
            workers=int(data.get("workers", 1)),
            smoothing_window=int(
                data.get("smoothing_window", DEFAULT_SMOOTHING_WINDOW)
            ),
            planner=copy.deepcopy(dict(data.get("planner") or {})),
            baseline=copy.deepcopy(dict(data.get("baseline") or {})),
            environment=copy.deepcopy(dict(data.get("environment") or {})),
            output_dir=data.get("output_dir"),
            overrides=[str(o) for o in data.get("overrides", [])],
        )


class LearningCurve:
    """Per-episode realised utilities of every run of one experiment.

    Attributes:
        runs: Run index to utility-per-episode array
    """

    def __init__(self, runs: Mapping[int, Sequence[float] | NDArray[np.float64]]) -> None:
        """Initialize from per-run utility sequences.

        Raises:
            ValueError: If there are no runs or their lengths differ
        """
        if not runs:
            raise ValueError("A learning curve needs at least one run")
        arrays = {int(k): np.asarray(v, dtype=np.float64) for k, v in runs.items()}
        lengths = {len(v) for v in arrays.values()}
        if len(lengths) != 1:
            raise ValueError(f"Run files have unequal lengths: {sorted(lengths)}")
        self.runs = dict(sorted(arrays.items()))

    @property
    def episodes(self) -> int:
        return len(next(iter(self.runs.values())))

    def frame(self) -> pd.DataFrame:
        """One column per run, indexed by 1-based episode."""
        frame = pd.DataFrame(
            {f"run-{k}": v for k, v in self.runs.items()},
            index=pd.RangeIndex(1, self.episodes + 1, name="episode"),
        )
        return frame

    @property
    def mean(self) -> NDArray[np.float64]:
        return self.frame().mean(axis=1).to_numpy()

    @property
    def stderr(self) -> NDArray[np.float64]:
        """Standard error of the mean; zero for a single run."""
        return self.frame().sem(axis=1, ddof=1).fillna(0.0).to_numpy()

    def summary(self, smoothing_window: int = DEFAULT_SMOOTHING_WINDOW) -> pd.DataFrame:
        """Aggregate table: mean, stderr, smoothed and normalised means.

        The normalised column rescales the mean to [0, 1] over the episodes
        (all zeros for a constant curve).
        """
        frame = self.frame()
        mean = frame.mean(axis=1)
        span = mean.max() - mean.min()
        normalised = (
            (mean - mean.min()) / span if span > 0 else pd.Series(0.0, index=mean.index)
        )
        return pd.DataFrame(
            {
                "episode": frame.index.to_numpy(),
                "mean": mean.to_numpy(),
                "stderr": frame.sem(axis=1, ddof=1).fillna(0.0).to_numpy(),
                "mean_smoothed": mean.rolling(smoothing_window, min_periods=1)
                .mean()
                .to_numpy(),
                "mean_normalised": normalised.to_numpy(),
            }
        )
