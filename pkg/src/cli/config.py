"""
Per-run configuration of the ``symbranch`` command.

A RunConfig is assembled from an optional JSON document (``--config``)
overlaid with the flags passed on the command line. Unknown keys are
rejected. The full model, defaults included, is echoed into the run's
provenance file and parses back into an equal RunConfig.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
import orjson
from pydantic import BaseModel, Field, field_validator, model_validator

from src.config.loader import ConfigLoadError
from src.config.models import LogFormat, LogLevel
from src.exceptions import InvalidConfig
from src.kernels.builder import parse_kernel_spec
from src.models.aging import DiffusionModel, ScalingKind
from src.models.simulation import Observable, StartType


class Command(str, Enum):
    """Subcommands."""

    KERNEL = "kernel"
    VOLTERRA = "volterra"
    LYAPUNOV = "lyapunov"
    MOMENTS = "moments"
    AGING = "aging"
    SIMULATE = "simulate"
    VALIDATE = "validate"


class SimulationMethod(str, Enum):
    """Monte Carlo estimators."""

    LATTICE = "lattice"
    DUAL_PAIR = "dual_pair"
    COALESCING_DUAL = "coalescing_dual"


def parse_grid(text: str) -> List[float]:
    """
    Expand ``start:stop:step`` (stop included) or a comma-separated list.

    Example:
        >>> parse_grid("1:2:0.5")
        [1.0, 1.5, 2.0]
    """
    text = text.strip()
    if ":" not in text:
        try:
            return [float(item) for item in text.split(",") if item.strip()]
        except ValueError as e:
            raise InvalidConfig(f"cannot parse grid '{text}': {e}") from e
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidConfig(f"grid '{text}' must look like start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as e:
        raise InvalidConfig(f"cannot parse grid '{text}': {e}") from e
    if step <= 0 or stop < start:
        raise InvalidConfig(f"grid '{text}' needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [float(x) for x in np.round(start + step * np.arange(count), 12)]


class RunConfig(BaseModel):
    """
    Everything one ``symbranch`` invocation needs.

    Attributes:
        command: Subcommand.
        kernel: Kernel spec string (see the README grammar).
        kappa: Branching rate.
        rho: Noise correlation; None lets ``lyapunov`` report r(kappa) of
            the kernel itself.
        model: Diffusion class for ``aging``.
        w: Stepping stone frequency.
        lower: alpha_1 of the bounded class.
        upper: alpha_2 of the bounded class.
        horizon: Final time T.
        step: Volterra step h (default chosen by the solver).
        kappa_grid: kappa grid for ``lyapunov``.
        a_values: Scaling parameters for ``aging``.
        t_values: Base times for ``aging``.
        scaling: Lag scaling for ``aging``; inferred from the tail when unset.
        method: Monte Carlo estimator for ``simulate``.
        observables: Lattice observables.
        start: Dual pair start type.
        torus_size: Torus side N.
        dt: Euler step.
        lag: Correlation lag s.
        replicas: Replica count.
        seed: Master seed.
        workers: Worker processes (simulate) or threads (aging).
        suite: Validation suite.
        output: Output directory.
        settings_dir: Directory holding numerics.yaml.
        no_cache: Skip the return-curve cache.
        log_level: Log level override.
        log_format: Log format override.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    command: Command
    kernel: str = Field(default="laplacian:d=1", description="Kernel spec")
    kappa: float = Field(default=1.0, gt=0, description="Branching rate")
    rho: Optional[float] = Field(default=None, ge=-1.0, le=1.0, description="Noise correlation")
    model: DiffusionModel = Field(default=DiffusionModel.SYMBIOTIC, description="Diffusion class")
    w: Optional[float] = Field(default=None, gt=0, lt=1, description="Stepping stone frequency")
    lower: Optional[float] = Field(default=None, gt=0, description="alpha_1")
    upper: Optional[float] = Field(default=None, gt=0, description="alpha_2")
    horizon: float = Field(default=10.0, gt=0, description="Final time T")
    step: Optional[float] = Field(default=None, gt=0, description="Volterra step")
    kappa_grid: str = Field(default="0.5:2.0:0.25", description="start:stop:step or a,b,c")
    a_values: List[float] = Field(default_factory=lambda: [0.5], description="Scaling parameters")
    t_values: List[float] = Field(
        default_factory=lambda: [1e2, 1e3, 1e4], description="Base times"
    )
    scaling: Optional[ScalingKind] = Field(default=None, description="Lag scaling")
    method: SimulationMethod = Field(default=SimulationMethod.LATTICE, description="Estimator")
    observables: List[Observable] = Field(
        default_factory=lambda: [Observable.MEAN_U, Observable.MIXED_UV],
        description="Lattice observables",
    )
    start: StartType = Field(default=StartType.DIFFERENT, description="Dual pair start")
    torus_size: int = Field(default=64, ge=4, description="Torus side N")
    dt: float = Field(default=1e-3, gt=0, description="Euler step")
    lag: float = Field(default=0.0, ge=0, description="Correlation lag")
    replicas: int = Field(default=1000, ge=1, description="Replica count")
    seed: int = Field(default=0, ge=0, description="Master seed")
    workers: int = Field(default=1, ge=1, description="Parallel workers")
    suite: Literal["quick", "full"] = Field(default="quick", description="Validation suite")
    output: str = Field(default="results", description="Output directory")
    settings_dir: Optional[str] = Field(default=None, description="numerics.yaml directory")
    no_cache: bool = Field(default=False, description="Skip the curve cache")
    log_level: Optional[LogLevel] = Field(default=None, description="Log level")
    log_format: Optional[LogFormat] = Field(default=None, description="Log format")

    @field_validator("kernel")
    @classmethod
    def validate_kernel(cls, v: str) -> str:
        """Kernel strings must parse."""
        parse_kernel_spec(v)
        return v

    @field_validator("kappa_grid")
    @classmethod
    def validate_kappa_grid(cls, v: str) -> str:
        """Grid strings must expand to positive rates."""
        values = parse_grid(v)
        if not values or min(values) <= 0:
            raise ValueError(f"kappa grid '{v}' must contain positive rates")
        return v

    @model_validator(mode="after")
    def validate_bounds(self) -> "RunConfig":
        """Bounded class needs lower <= upper."""
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError("lower must not exceed upper")
        return self

    @property
    def kappas(self) -> List[float]:
        """Expanded kappa grid."""
        return parse_grid(self.kappa_grid)

    @property
    def output_dir(self) -> Path:
        """Output directory as a path."""
        return Path(self.output)


def load_run_config(path: Optional[Path | str], overrides: Dict[str, Any]) -> RunConfig:
    """
    Build a RunConfig from a JSON file and command-line overrides.

    Args:
        path: JSON document, or None.
        overrides: Explicitly passed flags; they win over the file.

    Raises:
        ConfigLoadError: If the file cannot be read or is not a JSON object.
        pydantic.ValidationError: If the merged values are invalid.
    """
    data: Dict[str, Any] = {}
    if path is not None:
        file_path = Path(path)
        try:
            loaded = orjson.loads(file_path.read_bytes())
        except OSError as e:
            raise ConfigLoadError(
                f"Error reading {file_path}: {e}", file_path=file_path, cause=e
            ) from e
        except orjson.JSONDecodeError as e:
            raise ConfigLoadError(
                f"Invalid JSON in {file_path}: {e}", file_path=file_path, cause=e
            ) from e
        if not isinstance(loaded, dict):
            raise ConfigLoadError(
                f"Run configuration root must be an object: {file_path}", file_path=file_path
            )
        data.update(loaded)
    data.update(overrides)
    return RunConfig.model_validate(data)
