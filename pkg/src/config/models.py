"""
Pydantic models for numerical configuration.

This module defines the settings validated when loading
config/numerics.yaml. Every model is frozen and rejects unknown keys so a
misspelt tolerance fails loudly instead of silently falling back to a default.

Configuration file:
    - config/numerics.yaml: quadrature, Volterra, Lyapunov, aging,
      Monte Carlo, cache and logging settings

Example:
    >>> from src.config.models import LabSettings
    >>> settings = LabSettings()
    >>> settings.quadrature.tolerance_for(3)
    1e-08
"""

from enum import Enum

from pydantic import BaseModel, Field, model_validator


# =============================================================================
# ENUMS
# =============================================================================


class LogFormat(str, Enum):
    """Logging format options."""

    JSON = "json"
    TEXT = "text"


class LogLevel(str, Enum):
    """Logging level options."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


# =============================================================================
# NUMERICAL SETTINGS
# =============================================================================


class QuadratureSettings(BaseModel):
    """
    Fourier and time-domain quadrature controls.

    Attributes:
        abs_tol_low_dim: Absolute tolerance for return probabilities, d<=2.
        abs_tol_3d: Absolute tolerance for return probabilities, d>=3.
        initial_nodes: Nodes per dimension at the first refinement level.
        max_total_nodes: Largest tensor grid (all dimensions) ever built.
        green_rel_tol: Relative tolerance of singular Green integrals.
        time_rel_tol: Relative tolerance of time-domain integrals (scipy quad).
        divergence_factor: Growth factor between refinements that signals divergence.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    abs_tol_low_dim: float = Field(default=1e-10, gt=0, description="Tolerance for d<=2")
    abs_tol_3d: float = Field(default=1e-8, gt=0, description="Tolerance for d>=3")
    initial_nodes: int = Field(default=16, ge=4, description="Nodes per dimension, first level")
    max_total_nodes: int = Field(
        default=2**22,
        ge=2**10,
        description="Upper bound on nodes of one tensor grid",
    )
    green_rel_tol: float = Field(default=1e-4, gt=0, description="Green integral tolerance")
    time_rel_tol: float = Field(default=1e-10, gt=0, description="scipy quad epsrel")
    divergence_factor: float = Field(default=1.5, gt=1, description="Divergence growth factor")

    def tolerance_for(self, dimension: int) -> float:
        """Return the absolute tolerance used for a kernel of this dimension."""
        return self.abs_tol_low_dim if dimension <= 2 else self.abs_tol_3d


class VolterraSettings(BaseModel):
    """Step-size policy of the renewal-equation solver."""

    model_config = {"frozen": True, "extra": "forbid"}

    max_kappa_step: float = Field(
        default=0.01,
        gt=0,
        description="Default step keeps |kappa| * h below this value",
    )
    min_steps: int = Field(default=1000, ge=10, description="Default step keeps h <= T / min_steps")
    richardson: bool = Field(default=True, description="Extrapolate h against h/2")
    residual_checkpoints: int = Field(
        default=64,
        ge=2,
        description="Grid points at which the residual is re-evaluated",
    )


class LyapunovSettings(BaseModel):
    """Root-finding controls for r(kappa) = f^-1(1/kappa)."""

    model_config = {"frozen": True, "extra": "forbid"}

    rel_tol: float = Field(default=1e-10, gt=0, description="Relative tolerance of the root")
    bracket_floor: float = Field(default=1e-14, gt=0, description="Smallest admissible lambda")
    boundary_rel_tol: float = Field(
        default=1e-9,
        gt=0,
        description="Relative width of the critical boundary band",
    )


class AgingSettings(BaseModel):
    """Controls of the two-time correlation integrals."""

    model_config = {"frozen": True, "extra": "forbid"}

    exact_crossover: float = Field(
        default=1e4,
        gt=0,
        description="Largest t+s evaluated with exact return probabilities",
    )
    crossover_agreement: float = Field(
        default=0.01,
        gt=0,
        description="Required relative agreement of exact and asymptotic kernels",
    )
    solve_horizon: float = Field(
        default=200.0,
        gt=0,
        description="Volterra horizon before splicing the proven asymptote",
    )
    gauss_order: int = Field(default=16, ge=4, description="Gauss-Legendre nodes per panel")
    panel_ratio: float = Field(default=1.5, gt=1, description="Geometric panel growth")


class MonteCarloSettings(BaseModel):
    """Monte Carlo execution controls."""

    model_config = {"frozen": True, "extra": "forbid"}

    batch_size: int = Field(default=500, ge=1, description="Replicas advanced together")
    workers: int = Field(default=1, ge=1, description="Worker processes")
    explosion_threshold: float = Field(default=1e10, gt=0, description="UnstableStep bound")
    heavy_tail_fraction: float = Field(default=0.01, gt=0, lt=1, description="Top replica share")
    heavy_tail_share: float = Field(default=0.5, gt=0, lt=1, description="Mean share flagged")
    noise_block: int = Field(default=50, ge=1, description="Steps of noise drawn per call")


class CacheSettings(BaseModel):
    """Return-curve cache location."""

    model_config = {"frozen": True, "extra": "forbid"}

    enabled: bool = Field(default=True, description="Persist return curves")
    directory: str = Field(default=".symbranch_cache", description="Cache directory")


class LoggingConfig(BaseModel):
    """Logging configuration."""

    model_config = {"frozen": True, "extra": "forbid"}

    format: LogFormat = Field(
        default=LogFormat.JSON,
        description="Log output format",
    )
    level: LogLevel = Field(
        default=LogLevel.WARNING,
        description="Default log level",
    )


# =============================================================================
# ROOT CONFIGURATION
# =============================================================================


class LabSettings(BaseModel):
    """Complete numerical configuration."""

    model_config = {"frozen": True, "extra": "forbid"}

    quadrature: QuadratureSettings = Field(default_factory=QuadratureSettings)
    volterra: VolterraSettings = Field(default_factory=VolterraSettings)
    lyapunov: LyapunovSettings = Field(default_factory=LyapunovSettings)
    aging: AgingSettings = Field(default_factory=AgingSettings)
    montecarlo: MonteCarloSettings = Field(default_factory=MonteCarloSettings)
    cache: CacheSettings = Field(default_factory=CacheSettings)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @model_validator(mode="after")
    def validate_tolerances(self) -> "LabSettings":
        """Ensure the 3-d tolerance is not tighter than the low-dimensional one."""
        if self.quadrature.abs_tol_3d < self.quadrature.abs_tol_low_dim:
            raise ValueError(
                "quadrature.abs_tol_3d must be >= quadrature.abs_tol_low_dim "
                f"({self.quadrature.abs_tol_3d} < {self.quadrature.abs_tol_low_dim})"
            )
        return self
