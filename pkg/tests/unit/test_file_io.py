"""Unit tests for file I/O operations."""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

import pandas as pd
import pytest

from src.logic.validator import ConfigError

FIXTURES = Path(__file__).parent.parent / "fixtures"


class TestLoadJson:
    """Test load_json function."""

    def test_load_missing_file_raises_error(self) -> None:
        """Test loading from non-existent file raises IOError."""
        from src.utils.file_io import load_json

        with pytest.raises(IOError, match="File not found"):
            load_json(Path("/nonexistent/file.json"))

    def test_load_invalid_json_raises_error(self) -> None:
        """Test loading invalid JSON raises ValueError."""
        from src.utils.file_io import load_json

        with tempfile.NamedTemporaryFile(mode="w", delete=False, suffix=".json") as f:
            filepath = Path(f.name)
            f.write("{ invalid json }")

        try:
            with pytest.raises(ValueError, match="Invalid JSON"):
                load_json(filepath)
        finally:
            if filepath.exists():
                filepath.unlink()

    def test_resolve_bare_name_to_data_dir(self) -> None:
        """Test that shipped parameter files are found by name."""
        from src.utils.file_io import DATA_DIR, resolve_data_path

        assert resolve_data_path(Path("fishwood.json")) == DATA_DIR / "fishwood.json"
        explicit = FIXTURES / "tiny-ddst-map.json"
        assert resolve_data_path(explicit) == explicit


class TestOverrides:
    """Test dotted key=value overrides."""

    def test_parse_json_value(self) -> None:
        """Test that values are parsed as JSON."""
        from src.utils.file_io import parse_override

        assert parse_override("planner.J=10") == (["planner", "J"], 10)
        assert parse_override("utility.target=[1, 2]") == (["utility", "target"], [1, 2])

    def test_parse_string_value(self) -> None:
        """Test that non-JSON values stay strings."""
        from src.utils.file_io import parse_override

        assert parse_override("criterion=SER") == (["criterion"], "SER")

    def test_malformed_override(self) -> None:
        """Test that a missing '=' or empty key is refused."""
        from src.utils.file_io import parse_override

        for bad in ("episodes", "=3", "planner..J=3"):
            with pytest.raises(ValueError, match="Malformed override"):
                parse_override(bad)

    def test_apply_creates_sections_and_records(self) -> None:
        """Test nested creation and the recorded override list."""
        from src.utils.file_io import apply_overrides

        original = {"name": "x", "episodes": 5}
        result = apply_overrides(original, ["episodes=10", "planner.alpha_prior=5"])
        assert result["episodes"] == 10
        assert result["planner"] == {"alpha_prior": 5}
        assert result["overrides"] == ["episodes=10", "planner.alpha_prior=5"]
        assert original == {"name": "x", "episodes": 5}

    def test_apply_into_scalar_fails(self) -> None:
        """Test that overrides cannot descend into a non-object."""
        from src.utils.file_io import apply_overrides

        with pytest.raises(ValueError, match="not an object"):
            apply_overrides({"episodes": 5}, ["episodes.x=1"])


class TestLoadExperiment:
    """Test load_experiment function."""

    def test_load_fixture(self) -> None:
        """Test loading the smoke config."""
        from src.utils.file_io import load_experiment

        cfg = load_experiment(FIXTURES / "fishwood-smoke.json")
        assert cfg.name == "fishwood-smoke"
        assert cfg.n_exec == 2
        assert cfg.planner["J"] == 5

    def test_override_after_parse(self) -> None:
        """Test that overrides are applied before validation."""
        from src.utils.file_io import load_experiment

        cfg = load_experiment(FIXTURES / "fishwood-smoke.json", ["episodes=10"])
        assert cfg.episodes == 10
        assert cfg.overrides == ["episodes=10"]

    def test_invalid_config_lists_fields(self) -> None:
        """Test that validation failures name the field."""
        from src.utils.file_io import load_experiment

        with pytest.raises(ConfigError) as excinfo:
            load_experiment(FIXTURES / "invalid-runs.json")
        assert [e.field for e in excinfo.value.errors] == ["runs"]

    def test_non_object_config(self, tmp_path: Path) -> None:
        """Test that a JSON array is refused."""
        from src.utils.file_io import load_experiment

        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ValueError, match="JSON object"):
            load_experiment(path)


class TestOutputRoot:
    """Test output directory precedence."""

    def test_explicit_wins(self, monkeypatch) -> None:
        """Test that --out beats the environment variable."""
        from src.utils.file_io import output_root

        monkeypatch.setenv("DMCTS_OUT", "/from/env")
        assert output_root(Path("/explicit"), "cfg") == Path("/explicit")

    def test_environment_variable(self, monkeypatch) -> None:
        """Test that DMCTS_OUT beats the config."""
        from src.utils.file_io import output_root

        monkeypatch.setenv("DMCTS_OUT", "/from/env")
        assert output_root(None, "cfg") == Path("/from/env")

    def test_fallbacks(self, monkeypatch) -> None:
        """Test the config value and the default."""
        from src.utils.file_io import DEFAULT_OUTPUT_ROOT, output_root

        monkeypatch.delenv("DMCTS_OUT", raising=False)
        assert output_root(None, "cfg") == Path("cfg")
        assert output_root() == DEFAULT_OUTPUT_ROOT


class TestWriters:
    """Test atomic output writers."""

    def test_save_json_sorted(self, tmp_path: Path) -> None:
        """Test that JSON output is sorted and newline-terminated."""
        from src.utils.file_io import save_json

        path = tmp_path / "nested" / "meta.json"
        save_json({"b": 1, "a": 2}, path)
        text = path.read_text()
        assert text.endswith("\n")
        assert list(json.loads(text)) == ["a", "b"]

    def test_save_csv_round_trip(self, tmp_path: Path) -> None:
        """Test that run CSVs load back with their columns."""
        from src.utils.file_io import load_run_csv, save_csv

        path = tmp_path / "run-0.csv"
        save_csv(pd.DataFrame({"episode": [1, 2], "utility": [0.5, 1.0 / 3.0]}), path)
        frame = load_run_csv(path)
        assert frame["utility"].tolist() == pytest.approx([0.5, 1.0 / 3.0])
        assert "\r" not in path.read_text()

    def test_no_temporary_files_left(self, tmp_path: Path) -> None:
        """Test that the atomic writer cleans up."""
        from src.utils.file_io import save_text

        save_text("hello\n", tmp_path / "plot.gp")
        assert [p.name for p in tmp_path.iterdir()] == ["plot.gp"]

    def test_save_jsonl(self, tmp_path: Path) -> None:
        """Test one JSON object per line."""
        from src.utils.file_io import save_jsonl

        path = tmp_path / "stats.jsonl"
        save_jsonl([{"episode": 1}, {"episode": 2}], path)
        lines = path.read_text().splitlines()
        assert [json.loads(line)["episode"] for line in lines] == [1, 2]

    def test_run_csv_missing_columns(self, tmp_path: Path) -> None:
        """Test that run files need episode and utility columns."""
        from src.utils.file_io import load_run_csv

        path = tmp_path / "bad.csv"
        path.write_text("episode,mean\n1,0.5\n")
        with pytest.raises(ValueError, match="missing columns"):
            load_run_csv(path)
