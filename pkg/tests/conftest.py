"""
Pytest configuration and shared fixtures.

This module provides common fixtures used across all test modules.
"""

from pathlib import Path
from typing import List

import numpy as np
import pytest

from src.config.models import LabSettings, MonteCarloSettings
from src.kernels.builder import kernel_from_text, symmetrize
from src.kernels.fourier import FourierQuadrature
from src.kernels.profiles import ExponentialProfile
from src.models.kernel import Kernel


# ============================================================================
# SETTINGS FIXTURES
# ============================================================================


@pytest.fixture
def settings() -> LabSettings:
    """Default numerical settings."""
    return LabSettings()


@pytest.fixture
def quadrature() -> FourierQuadrature:
    """Fresh quadrature engine with default tolerances."""
    return FourierQuadrature()


@pytest.fixture
def small_batches() -> MonteCarloSettings:
    """Monte Carlo settings with tiny batches so runs span several batches."""
    return MonteCarloSettings(batch_size=7)


# ============================================================================
# KERNEL FIXTURES
# ============================================================================


@pytest.fixture
def laplacian_1d() -> Kernel:
    """Nearest-neighbour walk on Z."""
    return kernel_from_text("laplacian:d=1")


@pytest.fixture
def laplacian_2d() -> Kernel:
    """Nearest-neighbour walk on Z^2."""
    return kernel_from_text("laplacian:d=2")


@pytest.fixture
def laplacian_3d() -> Kernel:
    """Nearest-neighbour walk on Z^3."""
    return kernel_from_text("laplacian:d=3")


@pytest.fixture
def symmetrized_3d(laplacian_3d: Kernel) -> Kernel:
    """Difference walk of two d=3 nearest-neighbour walks."""
    return symmetrize(laplacian_3d)


@pytest.fixture
def drifted_kernel() -> Kernel:
    """Asymmetric finite-range walk on Z."""
    return kernel_from_text("finite:d=1,jumps=1@0.7|-1@0.3")


@pytest.fixture
def riemann_kernel() -> Kernel:
    """Truncated Riemann walk with beta = 1/2."""
    return kernel_from_text("riemann:beta=0.5,radius=200")


# ============================================================================
# RETURN PROFILE FIXTURES
# ============================================================================


@pytest.fixture
def single_state() -> ExponentialProfile:
    """f = 1: the local time of the single-state chain is t."""
    return ExponentialProfile(0.0)


@pytest.fixture
def exponential_return() -> ExponentialProfile:
    """f(t) = e^{-t}."""
    return ExponentialProfile(1.0)


@pytest.fixture
def three_state_generator() -> List[List[float]]:
    """Irreducible generator on three states."""
    return [[-2.0, 1.0, 1.0], [1.0, -3.0, 2.0], [0.5, 0.5, -1.0]]


# ============================================================================
# FILESYSTEM FIXTURES
# ============================================================================


@pytest.fixture
def output_dir(tmp_path: Path) -> Path:
    """Empty output directory for artifacts."""
    directory = tmp_path / "results"
    directory.mkdir()
    return directory


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Keep tests away from the user's cache and log environment."""
    monkeypatch.setenv("SYMBRANCH_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.delenv("LOG_LEVEL", raising=False)
    monkeypatch.delenv("CONFIG_PATH", raising=False)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test data."""
    return np.random.default_rng(20240601)
