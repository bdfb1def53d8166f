"""
``symbranch`` command-line entry point.

Usage:
    symbranch kernel --kernel laplacian:d=3 -T 100
    symbranch lyapunov --kernel laplacian:d=3 --rho 1 --kappa-grid 1.32:2.0:0.02
    symbranch moments --kernel laplacian:d=1 --rho 0 --kappa 1 -T 10
    symbranch aging --kernel laplacian:d=1 --model superrw --a 0.5,1 --t 1e2,1e3
    symbranch simulate --method dual_pair --kernel laplacian:d=1 --rho -0.5 -T 2
    symbranch validate --suite quick

Environment Variables:
    LOG_LEVEL: Logging level (overrides --log-level)
    CONFIG_PATH: Directory holding numerics.yaml (default: config)
    SYMBRANCH_CACHE_DIR: Return-curve cache directory

Exit codes:
    0 on success, 2 if a validation suite has failing checks, 1 on any error.
"""

import argparse
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError
import structlog

from src import __version__
from src.cli.commands import COMMANDS
from src.cli.config import Command, SimulationMethod, load_run_config, parse_grid
from src.cli.logging import resolve_level, setup_logging
from src.config.loader import ConfigLoadError, load_settings
from src.exceptions import SymbranchError
from src.models.aging import DiffusionModel, ScalingKind
from src.models.simulation import Observable, StartType
from src.storage.artifacts import provenance, write_json

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION_FAILED = 2


def _values(enum: Any) -> List[str]:
    return [member.value for member in enum]


def _grid(text: str) -> List[float]:
    try:
        return parse_grid(text)
    except SymbranchError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _observables(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


# =============================================================================
# PARSER
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    """
    Argument parser with one subcommand per analysis.

    Defaults are suppressed so that only flags given explicitly override
    the ``--config`` document; RunConfig supplies the rest.
    """
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--output", "-o", help="Output directory (default: results)")
    common.add_argument("--settings-dir", dest="settings_dir", help="Directory of numerics.yaml")
    common.add_argument("--log-level", dest="log_level", type=str.upper)
    common.add_argument("--log-format", dest="log_format", choices=["json", "text"])
    common.add_argument(
        "--no-cache", dest="no_cache", action="store_true", help="Skip the return-curve cache"
    )

    kernel = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    kernel.add_argument("--kernel", "-k", help="Kernel spec, e.g. laplacian:d=3")

    model = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    model.add_argument("--kappa", type=float, help="Branching rate")
    model.add_argument("--rho", type=float, help="Noise correlation in [-1, 1]")

    horizon = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    horizon.add_argument("-T", "--horizon", dest="horizon", type=float, help="Final time")

    parser = argparse.ArgumentParser(
        prog="symbranch",
        description="Numerical lab for the symbiotic branching model",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(
        name: str, parents: List[argparse.ArgumentParser], help: str
    ) -> argparse.ArgumentParser:
        return sub.add_parser(
            name, parents=parents, help=help, argument_default=argparse.SUPPRESS
        )

    command("kernel", parents=[common, kernel, horizon], help="Return curve and Green values")

    p = command(
        "volterra", parents=[common, kernel, model, horizon], help="Solve for E[exp(kappa L_t)]"
    )
    p.add_argument("--step", dest="step", type=float, help="Step size h")

    p = command("lyapunov", parents=[common, kernel, model], help="r(kappa) or gamma_2")
    p.add_argument("--kappa-grid", dest="kappa_grid", help="start:stop:step or a,b,c")

    p = command(
        "moments", parents=[common, kernel, model, horizon], help="E[uv], E[u^2] and verdict"
    )
    p.add_argument("--step", dest="step", type=float, help="Step size h")

    p = command("aging", parents=[common, kernel, model], help="Aging correlations")
    p.add_argument("--model", choices=_values(DiffusionModel))
    p.add_argument("--w", type=float, help="Stepping stone frequency")
    p.add_argument("--lower", type=float, help="alpha_1 of the bounded class")
    p.add_argument("--upper", type=float, help="alpha_2 of the bounded class")
    p.add_argument("--a", dest="a_values", type=_grid, help="Scaling parameters")
    p.add_argument("--t", dest="t_values", type=_grid, help="Base times")
    p.add_argument("--scaling", choices=_values(ScalingKind))
    p.add_argument("--workers", type=int)

    p = command(
        "simulate", parents=[common, kernel, model, horizon], help="Monte Carlo estimates"
    )
    p.add_argument("--method", choices=_values(SimulationMethod))
    p.add_argument(
        "--observables",
        type=_observables,
        help=f"Comma list of {','.join(_values(Observable))}",
    )
    p.add_argument("--start", choices=_values(StartType))
    p.add_argument("--w", type=float, help="Initial frequency")
    p.add_argument("-N", "--torus-size", dest="torus_size", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--lag", type=float)
    p.add_argument("--replicas", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)

    p = command("validate", parents=[common], help="Cross-oracle validation suite")
    p.add_argument("--suite", choices=["quick", "full"])

    return parser


# =============================================================================
# ENTRY POINTS
# =============================================================================


def _print_table(outcome_table: Any) -> None:
    if len(outcome_table):
        sys.stdout.write(outcome_table.to_string(index=False) + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv``, execute the subcommand and return the exit code.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:]).

    Returns:
        int: 0 on success, 2 on failed validation checks, 1 on error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help and --version exit with 0; usage errors with 2.
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR

    overrides: Dict[str, Any] = vars(args).copy()
    config_path = overrides.pop("config", None)

    try:
        config = load_run_config(config_path, overrides)
        settings = load_settings(config.settings_dir)
        log_format = config.log_format or settings.logging.format
        flag = config.log_level.value if config.log_level else None
        level = resolve_level(flag, settings.logging)
        setup_logging(level, log_format)

        command = Command(config.command)
        logger.info("command_started", command=command.value, output=config.output)
        started = time.perf_counter()
        outcome = COMMANDS[command](config, settings)
        wall_time = time.perf_counter() - started

        outputs = {name: str(path) for name, path in outcome.outputs.items()}
        record = provenance(command.value, config.model_dump(mode="json"), wall_time, outputs)
        write_json(config.output_dir / "provenance.json", record)
    except (SymbranchError, ConfigLoadError, ValidationError, ValueError, OSError) as e:
        sys.stderr.write(f"symbranch: error: {e}\n")
        logger.error("command_failed", error=str(e), error_type=type(e).__name__)
        return EXIT_ERROR

    _print_table(outcome.table)
    logger.info(
        "command_complete",
        command=command.value,
        wall_time=round(wall_time, 3),
        passed=outcome.passed,
    )
    return EXIT_OK if outcome.passed else EXIT_VALIDATION_FAILED


def main() -> None:
    """Console-script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
