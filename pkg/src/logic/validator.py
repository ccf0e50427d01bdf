"""Validation logic for experiment configurations and core contracts."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from typing import Any

DOMAINS = ("risk-mdp", "fishwood", "redeed", "ddst", "tabular")
ALGORITHMS = ("dmcts", "q_learning", "scalarised_q_learning")
CRITERIA = ("ESR", "SER")
UTILITY_KINDS = ("linear", "exponential", "fishwood", "target")
UTILITY_APPLICATIONS = ("cumulative", "per_step")
BASELINE_SIGNALS = ("raw", "linear")


class ContractViolationError(ValueError):
    """Raised when a core operation is called with broken preconditions."""


class ValidationError:
    """Represents a validation error.

    Attributes:
        error_type: Type of validation error
        message: Human-readable error message
        context: Additional context; ``context["field"]`` holds the dotted
            path of the offending config field
    """

    def __init__(
        self,
        error_type: str,
        message: str,
        context: dict[str, Any] | None = None,
    ) -> None:
        """Initialize a validation error.

        Args:
            error_type: Type of validation error
            message: Human-readable error message
            context: Additional context information
        """
        self.error_type = error_type
        self.message = message
        self.context = context or {}

    @property
    def field(self) -> str | None:
        """Dotted path of the offending field, if known."""
        value = self.context.get("field")
        return str(value) if value is not None else None

    def __str__(self) -> str:
        """Get string representation."""
        if self.context:
            context_str = ", ".join(f"{k}={v}" for k, v in self.context.items())
            return f"{self.error_type}: {self.message} ({context_str})"
        return f"{self.error_type}: {self.message}"

    def __eq__(self, other: object) -> bool:
        """Check equality with another error."""
        if not isinstance(other, ValidationError):
            return NotImplemented
        return (
            self.error_type == other.error_type
            and self.message == other.message
            and self.context == other.context
        )

    def __repr__(self) -> str:
        return f"ValidationError({self})"


class ConfigError(ValueError):
    """Raised when a configuration fails validation.

    Attributes:
        errors: Every violation found, not just the first one
    """

    def __init__(self, errors: Sequence[ValidationError]) -> None:
        self.errors = list(errors)
        summary = "; ".join(str(e) for e in self.errors)
        super().__init__(f"Invalid configuration: {summary}")


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_int(
    data: Mapping[str, Any],
    key: str,
    field: str,
    minimum: int,
    errors: list[ValidationError],
    required: bool = False,
) -> None:
    if key not in data or data[key] is None:
        if required:
            errors.append(
                ValidationError(
                    "MISSING_FIELD", f"Missing required field: {field}", {"field": field}
                )
            )
        return
    value = data[key]
    if not _is_int(value):
        errors.append(
            ValidationError(
                "INVALID_TYPE",
                f"{field} must be an integer",
                {"field": field, "value": value},
            )
        )
    elif value < minimum:
        errors.append(
            ValidationError(
                "OUT_OF_RANGE",
                f"{field} must be >= {minimum}",
                {"field": field, "value": value},
            )
        )


def _check_probability(
    data: Mapping[str, Any], key: str, field: str, errors: list[ValidationError]
) -> None:
    if key not in data or data[key] is None:
        return
    value = data[key]
    if not _is_number(value) or not (0.0 <= value <= 1.0):
        errors.append(
            ValidationError(
                "OUT_OF_RANGE",
                f"{field} must be a number in [0, 1]",
                {"field": field, "value": value},
            )
        )


def _check_vector(
    value: Any, field: str, errors: list[ValidationError]
) -> list[float] | None:
    if not isinstance(value, list) or not value or not all(
        _is_number(v) for v in value
    ):
        errors.append(
            ValidationError(
                "INVALID_VECTOR",
                f"{field} must be a non-empty list of numbers",
                {"field": field, "value": value},
            )
        )
        return None
    return [float(v) for v in value]


def validate_utility_spec(
    spec: Any, field: str = "utility"
) -> list[ValidationError]:
    """Validate a utility function declaration.

    Args:
        spec: Mapping with ``kind`` and the kind's parameters
        field: Dotted path used in error context

    Returns:
        List of validation errors (empty if valid)
    """
    errors: list[ValidationError] = []
    if not isinstance(spec, Mapping):
        errors.append(
            ValidationError(
                "INVALID_TYPE", f"{field} must be an object", {"field": field}
            )
        )
        return errors

    kind = spec.get("kind")
    if kind not in UTILITY_KINDS:
        errors.append(
            ValidationError(
                "UNKNOWN_UTILITY",
                f"{field}.kind must be one of {', '.join(UTILITY_KINDS)}",
                {"field": f"{field}.kind", "value": kind},
            )
        )
        return errors

    if kind == "linear":
        _check_vector(spec.get("weights"), f"{field}.weights", errors)
    elif kind == "exponential":
        coefficient = spec.get("risk_aversion", 1.0)
        if not _is_number(coefficient) or coefficient <= 0:
            errors.append(
                ValidationError(
                    "OUT_OF_RANGE",
                    f"{field}.risk_aversion must be a positive number",
                    {"field": f"{field}.risk_aversion", "value": coefficient},
                )
            )
    elif kind == "fishwood":
        _check_int(spec, "wood_per_fish", f"{field}.wood_per_fish", 1, errors)
    elif kind == "target":
        target = _check_vector(spec.get("target"), f"{field}.target", errors)
        if target is not None and not any(v > 0 for v in target):
            errors.append(
                ValidationError(
                    "INVALID_TARGET",
                    f"{field}.target needs at least one positive component",
                    {"field": f"{field}.target", "value": target},
                )
            )
    return errors


def validate_planner_section(
    planner: Any, field: str = "planner"
) -> list[ValidationError]:
    """Validate the ``planner`` section of an experiment config."""
    errors: list[ValidationError] = []
    if planner is None:
        return errors
    if not isinstance(planner, Mapping):
        errors.append(
            ValidationError(
                "INVALID_TYPE", f"{field} must be an object", {"field": field}
            )
        )
        return errors

    _check_int(planner, "J", f"{field}.J", 1, errors)
    _check_int(
        planner, "iterations_multiplier", f"{field}.iterations_multiplier", 1, errors
    )
    alpha_prior = planner.get("alpha_prior")
    if alpha_prior is not None and (not _is_number(alpha_prior) or alpha_prior <= 0):
        errors.append(
            ValidationError(
                "OUT_OF_RANGE",
                f"{field}.alpha_prior must be a positive number",
                {"field": f"{field}.alpha_prior", "value": alpha_prior},
            )
        )
    application = planner.get("utility_application", "cumulative")
    if application not in UTILITY_APPLICATIONS:
        errors.append(
            ValidationError(
                "INVALID_CHOICE",
                f"{field}.utility_application must be one of "
                f"{', '.join(UTILITY_APPLICATIONS)}",
                {"field": f"{field}.utility_application", "value": application},
            )
        )

    artificial = planner.get("artificial_returns")
    if artificial is not None:
        errors.extend(
            validate_artificial_returns(artificial, f"{field}.artificial_returns")
        )
    return errors


def validate_artificial_returns(
    section: Any, field: str = "planner.artificial_returns"
) -> list[ValidationError]:
    """Validate artificial-return exploration settings (probability and bounds)."""
    errors: list[ValidationError] = []
    if not isinstance(section, Mapping):
        errors.append(
            ValidationError(
                "INVALID_TYPE", f"{field} must be an object", {"field": field}
            )
        )
        return errors
    if "probability" not in section:
        errors.append(
            ValidationError(
                "MISSING_FIELD",
                f"Missing required field: {field}.probability",
                {"field": f"{field}.probability"},
            )
        )
    _check_probability(section, "probability", f"{field}.probability", errors)
    low = _check_vector(section.get("low"), f"{field}.low", errors)
    high = _check_vector(section.get("high"), f"{field}.high", errors)
    if low is not None and high is not None:
        if len(low) != len(high):
            errors.append(
                ValidationError(
                    "DIMENSION_MISMATCH",
                    f"{field}.low and {field}.high differ in length "
                    f"({len(low)} vs {len(high)})",
                    {"field": field},
                )
            )
        elif any(lo > hi for lo, hi in zip(low, high, strict=True)):
            errors.append(
                ValidationError(
                    "MALFORMED_BOUNDS",
                    f"{field}.low must not exceed {field}.high",
                    {"field": field, "low": low, "high": high},
                )
            )
    return errors


def validate_baseline_section(
    baseline: Any, field: str = "baseline"
) -> list[ValidationError]:
    """Validate the ``baseline`` section of an experiment config."""
    errors: list[ValidationError] = []
    if baseline is None:
        return errors
    if not isinstance(baseline, Mapping):
        errors.append(
            ValidationError(
                "INVALID_TYPE", f"{field} must be an object", {"field": field}
            )
        )
        return errors

    _check_probability(baseline, "epsilon", f"{field}.epsilon", errors)
    decay = baseline.get("epsilon_decay")
    if decay is not None and (not _is_number(decay) or not (0.0 < decay <= 1.0)):
        errors.append(
            ValidationError(
                "OUT_OF_RANGE",
                f"{field}.epsilon_decay must be a number in (0, 1]",
                {"field": f"{field}.epsilon_decay", "value": decay},
            )
        )
    rate = baseline.get("learning_rate")
    if rate is not None and (not _is_number(rate) or not (0.0 < rate <= 1.0)):
        errors.append(
            ValidationError(
                "OUT_OF_RANGE",
                f"{field}.learning_rate must be a number in (0, 1]",
                {"field": f"{field}.learning_rate", "value": rate},
            )
        )
    signal = baseline.get("signal", "raw")
    if signal not in BASELINE_SIGNALS:
        errors.append(
            ValidationError(
                "INVALID_CHOICE",
                f"{field}.signal must be one of {', '.join(BASELINE_SIGNALS)}",
                {"field": f"{field}.signal", "value": signal},
            )
        )
    elif signal == "linear":
        _check_vector(baseline.get("weights"), f"{field}.weights", errors)
    return errors


def validate_experiment_dict(data: Any) -> list[ValidationError]:
    """Validate a raw experiment configuration mapping.

    Every violated field is reported, so callers can print a complete
    diagnostic instead of failing on the first problem.

    Args:
        data: Parsed JSON object

    Returns:
        List of validation errors (empty if configuration is valid)
    """
    errors: list[ValidationError] = []
    if not isinstance(data, Mapping):
        errors.append(
            ValidationError(
                "INVALID_TYPE", "Configuration must be a JSON object", {"field": "$"}
            )
        )
        return errors

    name = data.get("name")
    if not isinstance(name, str) or not name.strip():
        errors.append(
            ValidationError(
                "MISSING_FIELD", "Experiment name cannot be empty", {"field": "name"}
            )
        )

    if data.get("domain") not in DOMAINS:
        errors.append(
            ValidationError(
                "UNKNOWN_DOMAIN",
                f"domain must be one of {', '.join(DOMAINS)}",
                {"field": "domain", "value": data.get("domain")},
            )
        )
    algorithm = data.get("algorithm")
    if algorithm not in ALGORITHMS:
        errors.append(
            ValidationError(
                "UNKNOWN_ALGORITHM",
                f"algorithm must be one of {', '.join(ALGORITHMS)}",
                {"field": "algorithm", "value": algorithm},
            )
        )
    criterion = data.get("criterion", "ESR")
    if criterion not in CRITERIA:
        errors.append(
            ValidationError(
                "INVALID_CHOICE",
                f"criterion must be one of {', '.join(CRITERIA)}",
                {"field": "criterion", "value": criterion},
            )
        )

    _check_int(data, "runs", "runs", 1, errors)
    _check_int(data, "episodes", "episodes", 1, errors, required=True)
    _check_int(data, "n_exec", "n_exec", 1, errors, required=True)
    _check_int(data, "workers", "workers", 1, errors)
    _check_int(data, "smoothing_window", "smoothing_window", 1, errors)
    _check_int(data, "base_seed", "base_seed", 0, errors)

    if "utility" not in data:
        errors.append(
            ValidationError(
                "MISSING_FIELD", "Missing required field: utility", {"field": "utility"}
            )
        )
    else:
        errors.extend(validate_utility_spec(data["utility"]))

    environment = data.get("environment")
    if environment is not None and not isinstance(environment, Mapping):
        errors.append(
            ValidationError(
                "INVALID_TYPE", "environment must be an object", {"field": "environment"}
            )
        )

    errors.extend(validate_planner_section(data.get("planner")))
    errors.extend(validate_baseline_section(data.get("baseline")))
    return errors
