"""Benchmark environments and the domain registry."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from pathlib import Path
from typing import Any

from src.envs.ddst import DangerousDST
from src.envs.fishwood import Fishwood
from src.envs.redeed import Redeed
from src.envs.risk_mdp import RiskMDP
from src.envs.tabular import TabularEnv
from src.models.environment import Environment
from src.utils.file_io import load_json, resolve_data_path

ENVIRONMENTS: dict[str, Callable[[Mapping[str, Any]], Environment]] = {
    "risk-mdp": RiskMDP.from_config,
    "fishwood": Fishwood.from_config,
    "redeed": Redeed.from_config,
    "ddst": DangerousDST.from_config,
    "tabular": TabularEnv.from_config,
}

DEFAULT_PARAMS: dict[str, str] = {
    "risk-mdp": "risk-mdp.json",
    "fishwood": "fishwood.json",
    "redeed": "redeed-params.json",
    "ddst": "ddst-map.json",
}


def environment_parameters(
    domain: str, section: Mapping[str, Any] | None = None
) -> dict[str, Any]:
    """Merge a domain's parameter file with inline overrides.

    ``section["params"]`` names the parameter file (a bare name is looked up
    in the shipped data directory); every other key overrides a top-level
    field of that file.

    Raises:
        ValueError: If the domain is unknown or has no parameters
        OSError: If the parameter file cannot be read
    """
    if domain not in ENVIRONMENTS:
        raise ValueError(
            f"Unknown domain {domain!r}; expected one of {sorted(ENVIRONMENTS)}"
        )
    section = dict(section or {})
    params_ref = section.pop("params", DEFAULT_PARAMS.get(domain))
    data: dict[str, Any] = {}
    if params_ref is not None:
        loaded = load_json(resolve_data_path(Path(params_ref)))
        if not isinstance(loaded, dict):
            raise ValueError(f"Parameter file {params_ref} must hold a JSON object")
        data.update(loaded)
    data.update(section)
    data.pop("description", None)
    if not data:
        raise ValueError(f"Domain {domain!r} needs environment parameters")
    return data


def make_environment(
    domain: str, section: Mapping[str, Any] | None = None
) -> Environment:
    """Instantiate the environment for ``domain``.

    Raises:
        ValueError: If the domain is unknown or its parameters are invalid
        OSError: If a parameter file cannot be read
    """
    return ENVIRONMENTS[domain](environment_parameters(domain, section))


__all__ = [
    "ENVIRONMENTS",
    "DangerousDST",
    "Fishwood",
    "Redeed",
    "RiskMDP",
    "TabularEnv",
    "environment_parameters",
    "make_environment",
]
