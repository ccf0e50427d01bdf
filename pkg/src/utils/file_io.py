"""File I/O for experiment configs, parameter files and run outputs."""

from __future__ import annotations

import copy
import json
import logging
import os
import tempfile
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

import pandas as pd

from src.models.experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
OUTPUT_ENV_VAR = "DMCTS_OUT"
DEFAULT_OUTPUT_ROOT = Path("results")
CSV_FLOAT_FORMAT = "%.12g"


def load_json(filepath: Path) -> Any:
    """Load a JSON document.

    Args:
        filepath: Input file path

    Returns:
        Parsed JSON value

    Raises:
        IOError: If file cannot be read
        ValueError: If file contains invalid JSON
    """
    try:
        if not filepath.exists():
            raise OSError(f"File not found: {filepath}")

        with filepath.open("r") as f:
            return json.load(f)

    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in file {filepath}: {e}") from e
    except OSError as e:
        raise OSError(f"Failed to load {filepath}: {e}") from e


def resolve_data_path(path: Path) -> Path:
    """Resolve a parameter-file reference.

    Existing paths are used as given; a bare file name falls back to the
    shipped data directory.
    """
    if path.exists() or path.is_absolute() or len(path.parts) > 1:
        return path
    return DATA_DIR / path


def parse_override(override: str) -> tuple[list[str], Any]:
    """Split ``dotted.key=value`` into key path and value.

    Values are parsed as JSON when possible and kept as strings otherwise.

    Raises:
        ValueError: If the override has no ``=`` or an empty key
    """
    key, sep, raw = override.partition("=")
    key = key.strip()
    if not sep or not key or any(not part for part in key.split(".")):
        raise ValueError(f"Malformed override {override!r}; expected key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def apply_overrides(
    data: Mapping[str, Any], overrides: Iterable[str]
) -> dict[str, Any]:
    """Apply dotted overrides to a copy of a config mapping.

    Intermediate objects are created as needed. Applied overrides are
    appended to the copy's ``overrides`` list.

    Raises:
        ValueError: If an override is malformed or descends into a non-object
    """
    result = copy.deepcopy(dict(data))
    applied: list[str] = list(result.get("overrides", []))
    for override in overrides:
        path, value = parse_override(override)
        target = result
        for part in path[:-1]:
            child = target.setdefault(part, {})
            if not isinstance(child, dict):
                raise ValueError(
                    f"Cannot apply override {override!r}: {part} is not an object"
                )
            target = child
        target[path[-1]] = value
        applied.append(override)
        logger.info("Override applied: %s", override)
    if applied:
        result["overrides"] = applied
    return result


def load_experiment(
    filepath: Path, overrides: Iterable[str] = ()
) -> ExperimentConfig:
    """Load an experiment config and apply overrides.

    Raises:
        IOError: If file cannot be read
        ValueError: If the JSON is invalid or an override is malformed
        ConfigError: If the resulting config fails validation
    """
    data = load_json(filepath)
    if not isinstance(data, dict):
        raise ValueError(f"Experiment config {filepath} must hold a JSON object")
    return ExperimentConfig.from_dict(apply_overrides(data, overrides))


def output_root(explicit: Path | None = None, config_dir: str | None = None) -> Path:
    """Pick the output root: ``--out``, then ``DMCTS_OUT``, then the config."""
    if explicit is not None:
        return explicit
    from_env = os.environ.get(OUTPUT_ENV_VAR)
    if from_env:
        return Path(from_env)
    if config_dir:
        return Path(config_dir)
    return DEFAULT_OUTPUT_ROOT


def _atomic_write(filepath: Path, text: str) -> None:
    try:
        filepath.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(
            prefix=f".{filepath.name}.", suffix=".tmp", dir=filepath.parent
        )
        try:
            with os.fdopen(fd, "w", newline="") as f:
                f.write(text)
            os.replace(tmp_name, filepath)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
    except OSError as e:
        raise OSError(f"Failed to write {filepath}: {e}") from e


def save_json(data: Any, filepath: Path) -> None:
    """Atomically write a JSON document.

    Raises:
        IOError: If file cannot be written
    """
    _atomic_write(filepath, json.dumps(data, indent=2, sort_keys=True) + "\n")


def save_csv(frame: pd.DataFrame, filepath: Path) -> None:
    """Atomically write a DataFrame as CSV without its index.

    Raises:
        IOError: If file cannot be written
    """
    _atomic_write(
        filepath, frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    )


def save_text(text: str, filepath: Path) -> None:
    """Atomically write a text file.

    Raises:
        IOError: If file cannot be written
    """
    _atomic_write(filepath, text)


def save_jsonl(records: Iterable[Mapping[str, Any]], filepath: Path) -> None:
    """Write records as JSON lines, replacing the file atomically.

    Raises:
        IOError: If file cannot be written
    """
    _atomic_write(
        filepath, "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    )


def load_run_csv(filepath: Path) -> pd.DataFrame:
    """Load a per-run learning curve (``episode``, ``utility`` columns).

    Raises:
        IOError: If file cannot be read
        ValueError: If the columns are missing
    """
    try:
        frame = pd.read_csv(filepath)
    except OSError as e:
        raise OSError(f"Failed to load {filepath}: {e}") from e
    missing = {"episode", "utility"} - set(frame.columns)
    if missing:
        raise ValueError(f"{filepath} is missing columns: {sorted(missing)}")
    return frame
