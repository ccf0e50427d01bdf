"""Command-line entry point for the DMCTS planner experiments."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from src.envs import environment_parameters, make_environment
from src.envs.ddst import DangerousDST
from src.envs.risk_mdp import RiskMDP
from src.logic.harness import aggregate, run_experiment
from src.logic.oracles import (
    DEFAULT_MAX_ENTRIES,
    OracleTooLargeError,
    ddst_oracle,
    esr_oracle_report,
    risk_mdp_oracle,
)
from src.logic.validator import ConfigError, validate_experiment_dict
from src.models.utility import ExponentialRiskUtility, utility_from_dict
from src.utils.file_io import (
    apply_overrides,
    load_experiment,
    load_json,
    output_root,
    save_csv,
    save_json,
    save_text,
)
from src.utils.formatting import (
    format_oracle_report,
    format_validation_errors,
    gnuplot_script,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INTERRUPTED = 130

ORACLE_DOMAINS = ("fishwood", "risk-mdp", "ddst", "tabular")
DEFAULT_ORACLE_UTILITIES: dict[str, dict[str, Any]] = {
    "fishwood": {"kind": "fishwood", "wood_per_fish": 2},
    "risk-mdp": {"kind": "exponential", "risk_aversion": 1.0},
    "ddst": {"kind": "target", "target": [54, 0, -14]},
    "tabular": {"kind": "linear", "weights": [1.0]},
}


def configure_logging(verbosity: int) -> None:
    """Root logger at WARNING, INFO (-v) or DEBUG (-vv)."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for every subcommand."""
    parser = argparse.ArgumentParser(
        prog="dmcts",
        description="Distributional Monte Carlo tree search experiments",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="increase log verbosity (-v info, -vv debug)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--config", type=Path, required=True, help="experiment config (JSON)"
        )
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dotted config override, applied after parsing (repeatable)",
        )

    run = sub.add_parser("run", help="run an experiment")
    add_config_args(run)
    run.add_argument(
        "--out",
        type=Path,
        default=None,
        help="output root (default: $DMCTS_OUT, then the config's output_dir)",
    )
    run.add_argument("--workers", type=int, default=None, help="worker processes")
    run.add_argument(
        "--progress", action="store_true", help="show per-run episode progress bars"
    )
    run.add_argument(
        "--fresh-tree",
        action="store_true",
        help="rebuild the search tree at every real step instead of reusing it",
    )
    run.add_argument(
        "--tree-stats",
        action="store_true",
        help="write per-episode search tree statistics as JSON lines",
    )

    validate = sub.add_parser("validate", help="validate an experiment config")
    add_config_args(validate)

    oracle = sub.add_parser("oracle", help="compute exact reference values")
    oracle.add_argument("domain", choices=ORACLE_DOMAINS, help="oracle domain")
    oracle.add_argument(
        "--env-config",
        type=Path,
        default=None,
        help="environment parameter file (default: the shipped one)",
    )
    oracle.add_argument(
        "--map", type=Path, default=None, help="DDST map file (alias of --env-config)"
    )
    oracle.add_argument(
        "--utility",
        type=str,
        default=None,
        help="utility declaration as JSON (default depends on the domain)",
    )
    oracle.add_argument(
        "--max-entries",
        type=int,
        default=DEFAULT_MAX_ENTRIES,
        help="refuse enumeration beyond this many memoised entries",
    )
    oracle.add_argument(
        "--output", type=Path, default=None, help="write the report as JSON"
    )

    plot = sub.add_parser(
        "plot", help="re-aggregate run files and emit a gnuplot script"
    )
    plot.add_argument(
        "experiment_dir", type=Path, help="directory holding run-<k>.csv files"
    )
    plot.add_argument(
        "--smoothing-window", type=int, default=50, help="sliding window in episodes"
    )
    return parser


def cmd_validate(args: argparse.Namespace) -> int:
    data = load_json(args.config)
    data = apply_overrides(data, args.override) if isinstance(data, dict) else data
    errors = validate_experiment_dict(data)
    if errors:
        print(format_validation_errors(errors), file=sys.stderr)
        return EXIT_CONFIG
    print(f"{args.config}: OK")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_experiment(args.config, args.override)
    if args.workers is not None and args.workers < 1:
        print("--workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    root = output_root(args.out, cfg.output_dir)
    curve = run_experiment(
        cfg,
        root,
        workers=args.workers,
        progress=args.progress,
        tree_stats=args.tree_stats,
        reuse_tree=False if args.fresh_tree else None,
    )
    final = curve.mean[-1]
    print(
        f"{cfg.name}: {len(curve.runs)} run(s) x {curve.episodes} episodes, "
        f"final mean utility {final:.6g} -> {root / cfg.name}"
    )
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    section: dict[str, Any] = {}
    params_file = args.map or args.env_config
    if params_file is not None:
        section["params"] = str(params_file)
    elif args.domain == "tabular":
        print("oracle tabular needs --env-config", file=sys.stderr)
        return EXIT_CONFIG
    spec = (
        json.loads(args.utility)
        if args.utility
        else DEFAULT_ORACLE_UTILITIES[args.domain]
    )
    u = utility_from_dict(spec)
    env = make_environment(args.domain, section)

    report: dict[str, Any]
    if isinstance(env, RiskMDP) and isinstance(u, ExponentialRiskUtility):
        report = risk_mdp_oracle(env, u)
    elif isinstance(env, DangerousDST):
        report = ddst_oracle(env, u)
    else:
        report = esr_oracle_report(
            env, u, env.initial_outcomes(), args.max_entries
        )
    report["utility"] = u.to_dict()
    report["environment_parameters"] = environment_parameters(args.domain, section)

    print(format_oracle_report(report))
    if args.output is not None:
        save_json(report, args.output)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    run_files = sorted(args.experiment_dir.glob("run-*.csv"))
    if not run_files:
        print(f"No run-<k>.csv files in {args.experiment_dir}", file=sys.stderr)
        return EXIT_IO
    summary = aggregate(run_files, args.smoothing_window)
    save_csv(summary, args.experiment_dir / "aggregate.csv")
    save_text(
        gnuplot_script(
            args.experiment_dir.name, smoothing_window=args.smoothing_window
        ),
        args.experiment_dir / "plot.gp",
    )
    print(f"Wrote {args.experiment_dir / 'plot.gp'}")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "validate": cmd_validate,
    "oracle": cmd_oracle,
    "plot": cmd_plot,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for the command-line interface."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(format_validation_errors(e.errors), file=sys.stderr)
        return EXIT_CONFIG
    except OracleTooLargeError as e:
        print(f"Oracle refused: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        print("Interrupted; completed run files were kept", file=sys.stderr)
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())
