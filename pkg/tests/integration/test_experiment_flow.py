"""Integration tests for the experiment workflow.

Tests the path from a config file through seeded runs to the aggregate
table and the planner's decisions against the exact oracle.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.envs.fishwood import MOVE, RIVER, STAY, WOODS, Fishwood
from src.logic.harness import aggregate, run_experiment
from src.logic.oracles import ESROracle
from src.logic.planner import plan_step
from src.models.planner_config import PlannerConfig
from src.models.returns import ReturnVector
from src.models.tree import DecisionNode
from src.models.utility import FishwoodUtility
from src.utils.file_io import load_experiment

FIXTURES = Path(__file__).parent.parent / "fixtures"

pytestmark = pytest.mark.integration


class TestExperimentFlow:
    """Integration tests for config-to-curve runs."""

    def test_aggregate_matches_written_table(self, tmp_path: Path) -> None:
        """Test that re-aggregating run files reproduces aggregate.csv."""
        cfg = load_experiment(FIXTURES / "fishwood-smoke.json")
        run_experiment(cfg, tmp_path)
        out_dir = tmp_path / cfg.name

        written = pd.read_csv(out_dir / "aggregate.csv")
        recomputed = aggregate(sorted(out_dir.glob("run-*.csv")), cfg.smoothing_window)
        assert written["mean"].tolist() == pytest.approx(recomputed["mean"].tolist())
        assert written["stderr"].tolist() == pytest.approx(recomputed["stderr"].tolist())

    def test_utilities_are_valid_fishwood_scores(self, tmp_path: Path) -> None:
        """Test that realised utilities are cooked-fish counts within the horizon."""
        cfg = load_experiment(FIXTURES / "fishwood-smoke.json")
        run_experiment(cfg, tmp_path)
        run = pd.read_csv(tmp_path / cfg.name / "run-0.csv")
        assert run["utility"].between(0, 4).all()
        expected = np.minimum(run["return_0"], np.floor(run["return_1"] / 2))
        assert run["utility"].tolist() == expected.tolist()

    def test_every_algorithm_runs(self, tmp_path: Path) -> None:
        """Test the planner and both baselines on the same config."""
        overrides = {
            "dmcts": [],
            "q_learning": ["baseline.signal=linear", "baseline.weights=[0.5, 0.5]"],
            "scalarised_q_learning": [],
        }
        for algorithm, extra in overrides.items():
            cfg = load_experiment(
                FIXTURES / "fishwood-smoke.json",
                [f"algorithm={algorithm}", f"name=smoke-{algorithm}", "runs=1", *extra],
            )
            curve = run_experiment(cfg, tmp_path)
            assert curve.episodes == 5


class TestPlannerAgainstOracle:
    """Integration tests comparing planner choices with exact values."""

    def test_last_step_goes_to_river(self) -> None:
        """Test that with two wood and no fish the final step moves to the river."""
        env = Fishwood()
        env.set_state(WOODS, 12)
        accrued = ReturnVector([0, 2])
        u = FishwoodUtility()
        cfg = PlannerConfig(replicates=20, alpha_prior=1.0, iterations_per_step=500)

        assert ESROracle(env, u).best_action(WOODS, 12, accrued) == MOVE
        action = plan_step(DecisionNode(WOODS), env, accrued, cfg, u, np.random.default_rng(0))
        assert action == MOVE

    def test_enough_fish_stays_for_wood(self) -> None:
        """Test that with a spare fish and one wood short the planner keeps chopping."""
        env = Fishwood()
        env.set_state(WOODS, 12)
        accrued = ReturnVector([1, 1])
        u = FishwoodUtility()
        cfg = PlannerConfig(replicates=20, iterations_per_step=500)

        assert ESROracle(env, u).best_action(WOODS, 12, accrued) == STAY
        action = plan_step(DecisionNode(WOODS), env, accrued, cfg, u, np.random.default_rng(0))
        assert action == STAY

    @pytest.mark.slow
    def test_root_means_approach_oracle(self) -> None:
        """Test pooled root means against exact action values after 10,000 iterations."""
        env = Fishwood()
        env.set_state(RIVER, 0)
        zero = ReturnVector.zeros(2)
        u = FishwoodUtility()
        cfg = PlannerConfig(replicates=50, alpha_prior=10.0, iterations_per_step=10_000)
        root = DecisionNode(RIVER)

        plan_step(root, env, zero, cfg, u, np.random.default_rng(0))
        exact = ESROracle(env, u).action_values(RIVER, 0, zero)
        best = int(np.argmax(exact))
        assert root.children[best].distribution.pooled_mean() == pytest.approx(
            exact[best], abs=0.05
        )
