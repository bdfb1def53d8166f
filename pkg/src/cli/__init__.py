"""
Command-line interface of the symbiotic branching lab.

Modules:
    config: RunConfig and grid parsing
    logging: structlog setup for the CLI
    commands: One function per subcommand
    suites: Cross-oracle validation suites
    main: argparse front end and exit codes

Example:
    >>> from src.cli import run
    >>> run(["validate", "--suite", "quick", "--output", "results"])
    0
"""

from src.cli.config import Command, RunConfig, SimulationMethod, load_run_config, parse_grid
from src.cli.logging import resolve_level, setup_logging
from src.cli.main import build_parser, run
from src.cli.suites import run_suite

__all__: list[str] = [
    # Configuration
    "Command",
    "RunConfig",
    "SimulationMethod",
    "load_run_config",
    "parse_grid",
    # Logging
    "resolve_level",
    "setup_logging",
    # Entry points
    "build_parser",
    "run",
    "run_suite",
]
