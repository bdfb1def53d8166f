"""
Integration test fixtures and configuration.

This module provides fixtures for end-to-end runs of the ``symbranch``
command:
- cli: invokes run() with an isolated output directory

Note:
    These tests run real computations but keep horizons short; Monte Carlo
    comparisons against the deterministic solvers are marked slow.
"""

import logging
from pathlib import Path
from typing import Callable, Generator, List

import pytest
import structlog

from src.cli.main import run


# =============================================================================
# PYTEST MARKERS
# =============================================================================


def pytest_configure(config: pytest.Config) -> None:
    """Register custom markers."""
    config.addinivalue_line("markers", "integration: end-to-end command runs")
    config.addinivalue_line("markers", "slow: long-running Monte Carlo comparisons")


# =============================================================================
# CLI FIXTURES
# =============================================================================


@pytest.fixture(autouse=True)
def restore_logging() -> Generator[None, None, None]:
    """Undo the logging setup performed by each run."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        root.removeHandler(handler)
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)
    structlog.reset_defaults()


@pytest.fixture
def cli(output_dir: Path) -> Callable[..., int]:
    """
    Run ``symbranch`` with its output directed at a temporary directory.

    Example:
        >>> code = cli("moments", "--kappa", "1")
    """

    def invoke(*argv: str, output: Path | None = None) -> int:
        target = output or output_dir
        args: List[str] = [*argv, "--output", str(target), "--log-level", "WARNING"]
        return run(args)

    return invoke
