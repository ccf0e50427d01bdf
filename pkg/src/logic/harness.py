"""Experiment orchestration: seeded runs, learning curves and run outputs.

Each run owns a fresh environment and agent seeded from the experiment's
base seed and the run index. An episode alternates ``agent.act`` and a real
environment step until termination and is scored by the configured utility
of the realised return. Runs execute in a bounded process pool and every
output file is written atomically, so an interrupted experiment keeps the
runs it completed.
"""

from __future__ import annotations

import logging
from collections.abc import Generator, Iterable, Sequence
from concurrent.futures import Future, ProcessPoolExecutor, as_completed
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.envs import environment_parameters, make_environment
from src.logic.baselines import (
    BaselineConfig,
    QLearningAgent,
    ScalarisedQLearningAgent,
)
from src.logic.planner import DMCTSAgent
from src.logic.validator import ConfigError, ValidationError
from src.models.environment import Agent, Environment
from src.models.experiment_config import ExperimentConfig, LearningCurve
from src.models.returns import ReturnVector, sum_returns
from src.models.utility import UtilityFunction, episode_utility
from src.utils.file_io import (
    load_run_csv,
    save_csv,
    save_json,
    save_jsonl,
    save_text,
)
from src.utils.formatting import gnuplot_script

logger = logging.getLogger(__name__)

BASELINE_SIGNAL_NOTES = {
    "raw": "Q-learning learns from the raw per-step scalar reward",
    "linear": "Q-learning learns from the linearly scalarised per-step reward",
}


def seed_schedule(base_seed: int, run_index: int) -> np.random.Generator:
    """Random stream of one run, derived from the base seed and run index."""
    return np.random.default_rng(
        np.random.SeedSequence(base_seed, spawn_key=(run_index,))
    )


def run_streams(
    base_seed: int, run_index: int
) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (environment, agent) streams spawned from the run's stream."""
    env_rng, agent_rng = seed_schedule(base_seed, run_index).spawn(2)
    return env_rng, agent_rng


def build_agent(
    cfg: ExperimentConfig,
    env: Environment,
    u: UtilityFunction,
    rng: np.random.Generator,
    reuse_tree: bool | None = None,
) -> Agent:
    """Instantiate the configured algorithm.

    Raises:
        ConfigError: If the algorithm cannot run on this domain
    """
    if u.n_objectives != env.n_objectives:
        raise ConfigError(
            [
                ValidationError(
                    "DIMENSION_MISMATCH",
                    f"utility expects {u.n_objectives} objectives, "
                    f"{env.name} produces {env.n_objectives}",
                    {"field": "utility"},
                )
            ]
        )
    if cfg.algorithm == "dmcts":
        planner = cfg.planner_config()
        if reuse_tree is not None and reuse_tree != planner.reuse_tree:
            planner = replace(planner, reuse_tree=reuse_tree)
        return DMCTSAgent(planner, u, rng)

    baseline = BaselineConfig.from_section(cfg.baseline)
    agent_cls = (
        ScalarisedQLearningAgent
        if cfg.algorithm == "scalarised_q_learning"
        else QLearningAgent
    )
    try:
        return agent_cls(baseline, u, cfg.n_exec, env.n_objectives, rng)
    except ValueError as e:
        raise ConfigError(
            [ValidationError("INCOMPATIBLE_SIGNAL", str(e), {"field": "baseline.signal"})]
        ) from e


def run_episode(
    env: Environment,
    agent: Agent,
    u: UtilityFunction,
    episode: int,
    rng: np.random.Generator,
    application: str = "cumulative",
    statistics: bool = False,
) -> Generator[dict[str, Any], None, None]:
    """Play one real episode, yielding progress states.

    Yields:
        ``{"type": "step", ...}`` after every real step and a final
        ``{"type": "episode_end", ...}`` with the realised return, its
        utility, the executions consumed per step and, with
        ``statistics``, the agent's episode statistics
    """
    env.reset(rng)
    agent.begin_episode(env, episode)
    accrued = ReturnVector.zeros(env.n_objectives)
    rewards: list[ReturnVector] = []
    executions: list[int] = []

    while not env.done:
        action = agent.act(env, accrued)
        executions.append(agent.executions_last_step)
        transition = env.step(action, rng)
        agent.observe(action, transition)
        accrued = accrued + transition.reward
        rewards.append(transition.reward)
        yield {
            "type": "step",
            "episode": episode,
            "t": env.t,
            "action": action,
            "reward": transition.reward,
            "accrued": accrued,
        }

    yield {
        "type": "episode_end",
        "episode": episode,
        "steps": env.t,
        "return": sum_returns(rewards, env.n_objectives),
        "utility": episode_utility(u, rewards, application),
        "executions": executions,
        "statistics": agent.episode_statistics() if statistics else None,
    }


def run_single(
    cfg: ExperimentConfig,
    run_index: int,
    out_dir: Path | None = None,
    progress: bool = False,
    tree_stats: bool = False,
    reuse_tree: bool | None = None,
) -> dict[str, Any]:
    """Execute one seeded run and write ``run-<k>.csv``.

    Returns:
        Summary with the per-episode utilities and the observed range of
        simulated executions per real step
    """
    env_rng, agent_rng = run_streams(cfg.base_seed, run_index)
    env = make_environment(cfg.domain, cfg.environment)
    u = cfg.utility_function()
    agent = build_agent(cfg, env, u, agent_rng, reuse_tree)
    application = str(cfg.planner.get("utility_application", "cumulative"))

    utilities: list[float] = []
    returns: list[list[float]] = []
    stats: list[dict[str, Any]] = []
    min_exec, max_exec = None, None
    episodes = tqdm(
        range(cfg.episodes),
        desc=f"{cfg.name} run {run_index}",
        disable=not progress,
        leave=False,
    )
    for episode in episodes:
        for state in run_episode(
            env, agent, u, episode, env_rng, application, tree_stats
        ):
            if state["type"] != "episode_end":
                continue
            utilities.append(state["utility"])
            returns.append(list(state["return"].values))
            if state["executions"]:
                lo, hi = min(state["executions"]), max(state["executions"])
                min_exec = lo if min_exec is None else min(min_exec, lo)
                max_exec = hi if max_exec is None else max(max_exec, hi)
            if tree_stats and state["statistics"] is not None:
                stats.append({"episode": episode + 1, **state["statistics"]})

    frame = pd.DataFrame(
        {"episode": np.arange(1, cfg.episodes + 1), "utility": utilities}
    )
    for i in range(env.n_objectives):
        frame[f"return_{i}"] = [r[i] for r in returns]

    if out_dir is not None:
        save_csv(frame, out_dir / f"run-{run_index}.csv")
        if tree_stats:
            save_jsonl(stats, out_dir / f"tree-stats-run-{run_index}.jsonl")
    if min_exec != cfg.n_exec or max_exec != cfg.n_exec:
        logger.warning(
            "Run %d consumed %s..%s executions per step, expected n_exec=%d",
            run_index,
            min_exec,
            max_exec,
            cfg.n_exec,
        )
    logger.info(
        "Run %d finished: mean utility %.6g over %d episodes",
        run_index,
        float(np.mean(utilities)),
        cfg.episodes,
    )
    return {
        "run": run_index,
        "utilities": utilities,
        "executions_min": min_exec,
        "executions_max": max_exec,
    }


def _run_worker(
    config: dict[str, Any],
    run_index: int,
    out_dir: str,
    progress: bool,
    tree_stats: bool,
    reuse_tree: bool | None,
) -> dict[str, Any]:
    return run_single(
        ExperimentConfig.from_dict(config),
        run_index,
        Path(out_dir),
        progress,
        tree_stats,
        reuse_tree,
    )


def aggregate(
    run_files: Iterable[Path], smoothing_window: int = 50
) -> pd.DataFrame:
    """Mean and standard error across per-run learning curves.

    Raises:
        ValueError: If no files are given or their lengths differ
    """
    runs = {}
    for i, path in enumerate(sorted(run_files)):
        runs[i] = load_run_csv(path)["utility"].to_numpy()
    return LearningCurve(runs).summary(smoothing_window)


def run_experiment(
    cfg: ExperimentConfig,
    out_root: Path,
    workers: int | None = None,
    progress: bool = False,
    tree_stats: bool = False,
    reuse_tree: bool | None = None,
) -> LearningCurve:
    """Run every seeded run of ``cfg`` and write its outputs.

    Writes ``run-<k>.csv`` per run, then ``aggregate.csv``,
    ``metadata.json`` and ``plot.gp`` under ``out_root / cfg.name``.

    Raises:
        ConfigError: If the algorithm and domain are incompatible
        OSError: If outputs cannot be written
        KeyboardInterrupt: After cancelling pending runs; finished run
            files stay on disk
    """
    out_dir = out_root / cfg.name
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = workers or cfg.workers
    started = datetime.now(timezone.utc)
    logger.info(
        "Experiment %s: %s on %s, %d runs x %d episodes, n_exec=%d, %d worker(s)",
        cfg.name,
        cfg.algorithm,
        cfg.domain,
        cfg.runs,
        cfg.episodes,
        cfg.n_exec,
        workers,
    )

    results: list[dict[str, Any]]
    if workers == 1 or cfg.runs == 1:
        results = [
            run_single(cfg, k, out_dir, progress, tree_stats, reuse_tree)
            for k in range(cfg.runs)
        ]
    else:
        results = _run_pool(cfg, out_dir, workers, progress, tree_stats, reuse_tree)
    results.sort(key=lambda r: r["run"])

    curve = LearningCurve({r["run"]: r["utilities"] for r in results})
    save_csv(curve.summary(cfg.smoothing_window), out_dir / "aggregate.csv")
    save_json(
        build_metadata(cfg, results, started, reuse_tree), out_dir / "metadata.json"
    )
    save_text(
        gnuplot_script(cfg.name, smoothing_window=cfg.smoothing_window),
        out_dir / "plot.gp",
    )
    logger.info("Experiment %s written to %s", cfg.name, out_dir)
    return curve


def _run_pool(
    cfg: ExperimentConfig,
    out_dir: Path,
    workers: int,
    progress: bool,
    tree_stats: bool,
    reuse_tree: bool | None,
) -> list[dict[str, Any]]:
    results: list[dict[str, Any]] = []
    config = cfg.to_dict()
    executor = ProcessPoolExecutor(max_workers=workers)
    futures: list[Future[dict[str, Any]]] = []
    try:
        futures = [
            executor.submit(
                _run_worker, config, k, str(out_dir), progress, tree_stats, reuse_tree
            )
            for k in range(cfg.runs)
        ]
        for future in as_completed(futures):
            results.append(future.result())
    except KeyboardInterrupt:
        logger.warning(
            "Interrupted; cancelling pending runs (%d completed)", len(results)
        )
        for future in futures:
            future.cancel()
        executor.shutdown(wait=True, cancel_futures=True)
        raise
    executor.shutdown(wait=True)
    return results


def build_metadata(
    cfg: ExperimentConfig,
    results: Sequence[dict[str, Any]],
    started: datetime,
    reuse_tree: bool | None = None,
) -> dict[str, Any]:
    """Self-describing record of an experiment's outputs."""
    lows = [r["executions_min"] for r in results if r["executions_min"] is not None]
    highs = [r["executions_max"] for r in results if r["executions_max"] is not None]
    metadata: dict[str, Any] = {
        "config": cfg.to_dict(),
        "overrides": list(cfg.overrides),
        "environment_parameters": environment_parameters(cfg.domain, cfg.environment),
        "runs_completed": len(results),
        "seeds": {
            "base_seed": cfg.base_seed,
            "derivation": "SeedSequence(base_seed, spawn_key=(run,)).spawn(2)",
        },
        "executions_per_step": {
            "expected": cfg.n_exec,
            "min": min(lows) if lows else None,
            "max": max(highs) if highs else None,
        },
        "smoothing_window": cfg.smoothing_window,
        "columns": {
            "run": ["episode", "utility", "return_<i>"],
            "aggregate": ["episode", "mean", "stderr", "mean_smoothed", "mean_normalised"],
        },
        "started_at": started.isoformat(),
        "finished_at": datetime.now(timezone.utc).isoformat(),
    }
    if reuse_tree is not None:
        metadata["reuse_tree"] = reuse_tree
    if cfg.algorithm != "dmcts":
        signal = BaselineConfig.from_section(cfg.baseline).signal
        metadata["baseline_signal"] = {
            "signal": signal,
            "assumption": BASELINE_SIGNAL_NOTES[signal],
        }
    return metadata
