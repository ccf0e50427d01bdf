"""Text formatting for plot scripts and command-line reports."""

from __future__ import annotations

import json
from collections.abc import Sequence
from typing import Any

from src.logic.validator import ValidationError


def gnuplot_script(
    experiment: str,
    aggregate_file: str = "aggregate.csv",
    output_file: str | None = None,
    smoothing_window: int = 50,
) -> str:
    """Gnuplot script drawing mean utility with a stderr band.

    Args:
        experiment: Plot title
        aggregate_file: CSV produced by aggregation, relative to the script
        output_file: PNG to render (default ``<experiment>.png``)
        smoothing_window: Window of the smoothed column, shown in the key

    Returns:
        Script text
    """
    output_file = output_file or f"{experiment}.png"
    return "\n".join(
        [
            f"# Learning curve for {experiment}",
            "set datafile separator ','",
            "set terminal pngcairo size 1000,600",
            f"set output '{output_file}'",
            f"set title '{experiment}' noenhanced",
            "set xlabel 'Episode'",
            "set ylabel 'Utility'",
            "set key bottom right",
            "set grid",
            f"plot '{aggregate_file}' using 1:($2-$3):($2+$3) skip 1 "
            "with filledcurves fs transparent solid 0.2 noborder title 'stderr', \\",
            f"     '{aggregate_file}' using 1:2 skip 1 with lines lw 1 title 'mean', \\",
            f"     '{aggregate_file}' using 1:4 skip 1 with lines lw 2 "
            f"title 'mean ({smoothing_window}-episode window)'",
            "",
        ]
    )


def format_validation_errors(errors: Sequence[ValidationError]) -> str:
    """One line per violated field."""
    lines = [f"{len(errors)} configuration error(s):"]
    for error in errors:
        lines.append(f"  {error.field or '$'}: {error.message} [{error.error_type}]")
    return "\n".join(lines)


def format_return(values: Sequence[float]) -> str:
    """Compact ``[a, b, c]`` rendering of a return vector."""
    return "[" + ", ".join(f"{v:g}" for v in values) + "]"


def format_oracle_report(report: dict[str, Any]) -> str:
    """Human-readable summary of an oracle result."""
    lines = [f"Oracle: {report.get('domain', '?')}"]
    if "optimal_value" in report:
        lines.append(f"  optimal expected utility: {report['optimal_value']:.6f}")
    for name, value in report.get("constant_policies", {}).items():
        marker = " (optimal)" if name == report.get("optimal_constant_policy") else ""
        lines.append(f"  {name}: E[u] = {value:.6f}{marker}")
    for root in report.get("roots", []):
        values = ", ".join(f"{v:.6f}" for v in root["action_values"])
        lines.append(
            f"  start {json.dumps(root['state'])} (p={root['probability']:g}): "
            f"action values [{values}], best action {root['best_action']}"
        )
    for route in report.get("safe_routes", []):
        lines.append(
            f"  treasure {route['treasure']:g} at {tuple(route['cell'])}: "
            f"{route['steps']} steps, return {format_return(route['return'])}, "
            f"utility {route['utility']:.3f}"
        )
    best = report.get("best_route")
    if best is not None:
        lines.append(
            f"  best route: treasure {best['treasure']:g} in {best['steps']} steps, "
            f"utility {best['utility']:.3f}"
        )
    return "\n".join(lines)
