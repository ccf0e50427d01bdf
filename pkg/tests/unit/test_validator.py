"""Unit tests for validation logic."""

from __future__ import annotations

from typing import Any

import pytest

from src.logic.validator import (
    ConfigError,
    ValidationError,
    validate_artificial_returns,
    validate_baseline_section,
    validate_experiment_dict,
    validate_planner_section,
    validate_utility_spec,
)


def valid_config(**changes: Any) -> dict[str, Any]:
    config: dict[str, Any] = {
        "name": "smoke",
        "domain": "fishwood",
        "algorithm": "dmcts",
        "utility": {"kind": "fishwood"},
        "n_exec": 2,
        "episodes": 3,
    }
    config.update(changes)
    return config


def fields(errors: list[ValidationError]) -> list[str | None]:
    return [e.field for e in errors]


class TestValidationError:
    """Test the ValidationError record."""

    def test_str_with_context(self) -> None:
        """Test the rendered message."""
        error = ValidationError("OUT_OF_RANGE", "runs must be >= 1", {"field": "runs"})
        assert str(error) == "OUT_OF_RANGE: runs must be >= 1 (field=runs)"
        assert error.field == "runs"

    def test_equality(self) -> None:
        """Test value equality."""
        a = ValidationError("X", "m", {"field": "f"})
        assert a == ValidationError("X", "m", {"field": "f"})
        assert a != ValidationError("X", "m")

    def test_config_error_lists_all(self) -> None:
        """Test that ConfigError carries every violation."""
        errors = [ValidationError("A", "first"), ValidationError("B", "second")]
        error = ConfigError(errors)
        assert error.errors == errors
        assert "first" in str(error) and "second" in str(error)


class TestValidateExperimentDict:
    """Test whole-config validation."""

    def test_valid_config(self) -> None:
        """Test that a minimal config passes."""
        assert validate_experiment_dict(valid_config()) == []

    def test_not_an_object(self) -> None:
        """Test that non-mappings are refused."""
        assert fields(validate_experiment_dict([1, 2])) == ["$"]

    def test_zero_runs(self) -> None:
        """Test that runs must be positive."""
        errors = validate_experiment_dict(valid_config(runs=0))
        assert fields(errors) == ["runs"]
        assert errors[0].error_type == "OUT_OF_RANGE"

    def test_every_problem_reported(self) -> None:
        """Test that validation does not stop at the first error."""
        config = valid_config(domain="chess", algorithm="sarsa", criterion="XYZ", n_exec=0)
        del config["episodes"]
        assert set(fields(validate_experiment_dict(config))) == {
            "domain",
            "algorithm",
            "criterion",
            "n_exec",
            "episodes",
        }

    def test_booleans_are_not_integers(self) -> None:
        """Test that true is not accepted as a count."""
        errors = validate_experiment_dict(valid_config(episodes=True))
        assert errors[0].error_type == "INVALID_TYPE"

    def test_blank_name(self) -> None:
        """Test that the name cannot be blank."""
        assert fields(validate_experiment_dict(valid_config(name="  "))) == ["name"]

    def test_environment_must_be_object(self) -> None:
        """Test the environment section type."""
        errors = validate_experiment_dict(valid_config(environment="fishwood.json"))
        assert fields(errors) == ["environment"]


class TestValidateUtilitySpec:
    """Test utility declarations."""

    def test_unknown_kind(self) -> None:
        """Test that unknown kinds are refused."""
        assert fields(validate_utility_spec({"kind": "log"})) == ["utility.kind"]

    def test_linear_needs_weights(self) -> None:
        """Test the weights vector."""
        assert fields(validate_utility_spec({"kind": "linear"})) == ["utility.weights"]

    def test_exponential_coefficient(self) -> None:
        """Test that the risk aversion must be positive."""
        errors = validate_utility_spec({"kind": "exponential", "risk_aversion": 0})
        assert fields(errors) == ["utility.risk_aversion"]

    def test_target_needs_positive_component(self) -> None:
        """Test the unbounded target case."""
        errors = validate_utility_spec({"kind": "target", "target": [0, -1, -2]})
        assert errors[0].error_type == "INVALID_TARGET"

    @pytest.mark.parametrize(
        "spec",
        [
            {"kind": "linear", "weights": [1, 0.5]},
            {"kind": "exponential"},
            {"kind": "fishwood", "wood_per_fish": 3},
            {"kind": "target", "target": [54, 0, -14]},
        ],
    )
    def test_valid_specs(self, spec: dict[str, Any]) -> None:
        """Test that every kind has a valid form."""
        assert validate_utility_spec(spec) == []


class TestValidatePlannerSection:
    """Test planner hyperparameters."""

    def test_missing_section_is_fine(self) -> None:
        """Test that the planner section is optional."""
        assert validate_planner_section(None) == []

    def test_bad_values(self) -> None:
        """Test replicates, prior and utility application."""
        errors = validate_planner_section(
            {"J": 0, "alpha_prior": -1, "utility_application": "sometimes"}
        )
        assert fields(errors) == [
            "planner.J",
            "planner.alpha_prior",
            "planner.utility_application",
        ]


class TestValidateArtificialReturns:
    """Test artificial-return exploration settings."""

    def test_valid(self) -> None:
        """Test a well-formed section."""
        section = {"probability": 0.1, "low": [0, 0], "high": [5, 10]}
        assert validate_artificial_returns(section) == []

    def test_probability_required(self) -> None:
        """Test the probability field."""
        errors = validate_artificial_returns({"low": [0], "high": [1]})
        assert errors[0].error_type == "MISSING_FIELD"

    def test_length_mismatch(self) -> None:
        """Test bounds of different length."""
        errors = validate_artificial_returns({"probability": 0.1, "low": [0], "high": [1, 2]})
        assert errors[0].error_type == "DIMENSION_MISMATCH"

    def test_inverted_bounds(self) -> None:
        """Test that low must not exceed high."""
        errors = validate_artificial_returns({"probability": 0.1, "low": [2], "high": [1]})
        assert errors[0].error_type == "MALFORMED_BOUNDS"


class TestValidateBaselineSection:
    """Test Q-learning hyperparameters."""

    def test_bad_values(self) -> None:
        """Test epsilon, decay, learning rate and signal."""
        errors = validate_baseline_section(
            {"epsilon": 2, "epsilon_decay": 0, "learning_rate": 0, "signal": "utility"}
        )
        assert fields(errors) == [
            "baseline.epsilon",
            "baseline.epsilon_decay",
            "baseline.learning_rate",
            "baseline.signal",
        ]

    def test_linear_signal_needs_weights(self) -> None:
        """Test that the linear signal needs weights."""
        errors = validate_baseline_section({"signal": "linear"})
        assert fields(errors) == ["baseline.weights"]
