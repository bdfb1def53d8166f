"""
Monte Carlo configuration and result models.

Models:
    Observable: Quantities estimated by the lattice simulation
    StartType: Initial types of the dual particle pair
    SimConfig: Euler-Maruyama lattice simulation settings
    ObservableEstimate: Mean, standard error and flags of one observable
    SimResult: All estimates of one run with its seed lineage
"""

from enum import Enum
import math
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from src.models.kernel import Kernel

SEED_SCHEME = "blake2b-64(master, index)"


class Observable(str, Enum):
    """Lattice observables at the origin."""

    MEAN_U = "mean_u"
    SECOND_U = "second_u"
    MIXED_UV = "mixed_uv"
    CORRELATION = "correlation"


class StartType(str, Enum):
    """Types of the two dual particles at time 0."""

    SAME = "same"
    DIFFERENT = "different"


class EstimateFlag(str, Enum):
    """Reliability flags attached to an estimate."""

    HEAVY_TAIL = "heavy_tail"
    TORUS_WINDOW = "torus_window"


class SimConfig(BaseModel):
    """
    Euler-Maruyama simulation of the symbiotic branching system on a torus.

    Attributes:
        kernel: Base random-walk kernel.
        torus_size: Side N of the torus (Z/NZ)^d.
        dt: Time step.
        horizon: Final time T.
        kappa: Branching rate.
        rho: Noise correlation.
        replicas: Number of independent replicas.
        seed: Master seed.
        clamp: Use max(uv, 0) under the square root.
        lag: Lag s of the correlation observable.
        initial_u: Homogeneous initial value of u.
        initial_v: Homogeneous initial value of v.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    kernel: Kernel = Field(..., description="Base random-walk kernel")
    torus_size: int = Field(..., ge=4, description="Torus side N")
    dt: float = Field(..., gt=0, description="Time step")
    horizon: float = Field(..., gt=0, description="Final time T")
    kappa: float = Field(..., gt=0, description="Branching rate")
    rho: float = Field(..., ge=-1.0, le=1.0, description="Noise correlation")
    replicas: int = Field(..., ge=1, description="Replica count")
    seed: int = Field(default=0, ge=0, description="Master seed")
    clamp: bool = Field(default=True, description="Clamp negative uv before the square root")
    lag: float = Field(default=0.0, ge=0, description="Correlation lag s")
    initial_u: float = Field(default=1.0, ge=0, description="u_0")
    initial_v: float = Field(default=1.0, ge=0, description="v_0")

    @model_validator(mode="after")
    def validate_stability(self) -> "SimConfig":
        """Enforce kappa dt <= 0.1 and dt <= T."""
        if self.kappa * self.dt > 0.1:
            raise ValueError(
                f"kappa * dt must be <= 0.1 for stability, got {self.kappa * self.dt:.4g}"
            )
        if self.dt > self.horizon:
            raise ValueError(f"dt ({self.dt}) must not exceed horizon ({self.horizon})")
        return self

    @property
    def steps(self) -> int:
        """Number of Euler steps to the horizon."""
        return int(round(self.horizon / self.dt))

    @property
    def lag_steps(self) -> int:
        """Additional steps to reach T + s."""
        return int(round(self.lag / self.dt))


class ObservableEstimate(BaseModel):
    """Estimate of one observable."""

    model_config = {"frozen": True, "extra": "forbid"}

    observable: str = Field(..., description="Observable name")
    estimate: float = Field(..., description="Sample mean")
    stderr: float = Field(..., ge=0, description="Standard error")
    replicas: int = Field(..., ge=1, description="Replica count")
    flags: List[EstimateFlag] = Field(default_factory=list, description="Reliability flags")

    @property
    def interval(self) -> tuple[float, float]:
        """95% normal confidence interval."""
        half = 1.96 * self.stderr
        return (self.estimate - half, self.estimate + half)

    def agrees_with(self, value: float, sigmas: float = 3.0, bias: float = 0.0) -> bool:
        """True if value lies within sigmas * stderr + bias of the estimate."""
        return math.fabs(self.estimate - value) <= sigmas * self.stderr + bias


class SimResult(BaseModel):
    """
    Result of a Monte Carlo run.

    Attributes:
        estimates: One entry per requested observable.
        replicas: Replica count.
        seed: Master seed.
        seed_scheme: How per-replica seeds derive from the master seed.
        method: lattice | dual_pair | coalescing_dual.
        time: Observation time.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    estimates: List[ObservableEstimate] = Field(..., min_length=1)
    replicas: int = Field(..., ge=1)
    seed: int = Field(..., ge=0)
    seed_scheme: str = Field(default=SEED_SCHEME)
    method: str = Field(...)
    time: float = Field(..., ge=0)

    def get(self, observable: str | Observable) -> ObservableEstimate:
        """Look up the estimate of an observable."""
        name = observable.value if isinstance(observable, Observable) else observable
        for item in self.estimates:
            if item.observable == name:
                return item
        raise KeyError(name)

    def records(self) -> List[dict]:
        """Export rows {observable, estimate, stderr, replicas, seed, flags}."""
        return [
            {
                "observable": item.observable,
                "estimate": item.estimate,
                "stderr": item.stderr,
                "replicas": item.replicas,
                "seed": self.seed,
                "flags": [flag.value for flag in item.flags],
            }
            for item in self.estimates
        ]

    @property
    def primary(self) -> Optional[ObservableEstimate]:
        """First estimate."""
        return self.estimates[0] if self.estimates else None
