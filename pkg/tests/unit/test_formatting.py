"""Unit tests for report and plot-script formatting."""

from __future__ import annotations

from src.logic.validator import ValidationError
from src.utils.formatting import (
    format_oracle_report,
    format_return,
    format_validation_errors,
    gnuplot_script,
)


class TestGnuplotScript:
    """Test the plot script."""

    def test_reads_aggregate(self) -> None:
        """Test the data file, columns and output."""
        script = gnuplot_script("fishwood-esr", smoothing_window=25)
        assert "set output 'fishwood-esr.png'" in script
        assert "'aggregate.csv' using 1:2" in script
        assert "using 1:4" in script
        assert "25-episode window" in script
        assert script.endswith("\n")


class TestFormatValidationErrors:
    """Test the validation diagnostic."""

    def test_one_line_per_field(self) -> None:
        """Test the header and field lines."""
        text = format_validation_errors(
            [
                ValidationError("OUT_OF_RANGE", "runs must be >= 1", {"field": "runs"}),
                ValidationError("INVALID_TYPE", "Configuration must be a JSON object"),
            ]
        )
        lines = text.splitlines()
        assert lines[0] == "2 configuration error(s):"
        assert lines[1] == "  runs: runs must be >= 1 [OUT_OF_RANGE]"
        assert lines[2].startswith("  $:")


class TestFormatReports:
    """Test oracle report rendering."""

    def test_format_return(self) -> None:
        """Test compact vectors."""
        assert format_return([54.0, 0.0, -14.0]) == "[54, 0, -14]"

    def test_risk_report(self) -> None:
        """Test that the optimal constant policy is marked."""
        text = format_oracle_report(
            {
                "domain": "risk-mdp",
                "optimal_value": 0.0,
                "constant_policies": {"invest-0": 0.0, "invest-1": -0.4},
                "optimal_constant_policy": "invest-0",
            }
        )
        assert "invest-0: E[u] = 0.000000 (optimal)" in text
        assert "invest-1: E[u] = -0.400000" in text

    def test_ddst_report(self) -> None:
        """Test safe routes and the best route."""
        route = {
            "cell": [7, 7],
            "treasure": 54.0,
            "steps": 14,
            "return": [54.0, 0.0, -14.0],
            "utility": 55.785,
        }
        text = format_oracle_report(
            {"domain": "ddst", "safe_routes": [route], "best_route": route}
        )
        assert "treasure 54 at (7, 7): 14 steps, return [54, 0, -14], utility 55.785" in text
        assert "best route: treasure 54 in 14 steps" in text

    def test_esr_report(self) -> None:
        """Test start-state action values."""
        text = format_oracle_report(
            {
                "domain": "tabular",
                "optimal_value": 1.5,
                "roots": [
                    {"state": 0, "probability": 1.0, "action_values": [1.0, 1.5], "best_action": 1}
                ],
            }
        )
        assert "start 0 (p=1): action values [1.000000, 1.500000], best action 1" in text
