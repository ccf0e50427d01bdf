"""Integration tests for reproducible experiment outputs."""

from __future__ import annotations

from pathlib import Path

import pytest

from src.logic.harness import run_experiment
from src.utils.file_io import load_experiment

SMOKE = Path(__file__).parent.parent / "fixtures" / "fishwood-smoke.json"

pytestmark = pytest.mark.integration

COMPARED = ("run-0.csv", "run-1.csv", "aggregate.csv")


def outputs(root: Path, name: str = "fishwood-smoke") -> dict[str, bytes]:
    return {f: (root / name / f).read_bytes() for f in COMPARED}


class TestDeterminism:
    """Test that seeds fully determine the results."""

    def test_same_seed_identical_files(self, tmp_path: Path) -> None:
        """Test byte-identical CSVs from two serial runs."""
        cfg = load_experiment(SMOKE)
        run_experiment(cfg, tmp_path / "a")
        run_experiment(cfg, tmp_path / "b")
        assert outputs(tmp_path / "a") == outputs(tmp_path / "b")

    def test_pool_matches_serial(self, tmp_path: Path) -> None:
        """Test that the worker pool does not change any run."""
        cfg = load_experiment(SMOKE)
        run_experiment(cfg, tmp_path / "serial", workers=1)
        run_experiment(cfg, tmp_path / "pool", workers=2)
        assert outputs(tmp_path / "serial") == outputs(tmp_path / "pool")

    def test_seed_changes_results(self, tmp_path: Path) -> None:
        """Test that another base seed gives another experiment."""
        run_experiment(load_experiment(SMOKE, ["episodes=20"]), tmp_path / "a")
        run_experiment(load_experiment(SMOKE, ["episodes=20", "base_seed=8"]), tmp_path / "b")
        assert outputs(tmp_path / "a") != outputs(tmp_path / "b")
