"""
Aging data models.

Models:
    DiffusionModel: Interacting diffusion whose correlations are studied
    NoiseRegime: Sign class of rho
    ScalingKind: s = a t or log s / log t = a
    AgingQuery: One two-time correlation request
    AgingRow: One (t, s) cell of a sweep
    AgingReport: Sweep rows with limits and deviation trends
"""

from enum import Enum
import math
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from src.models.kernel import Kernel


class DiffusionModel(str, Enum):
    """Interacting diffusion class."""

    SYMBIOTIC = "symbiotic"
    ANDERSON = "anderson"
    BOUNDED = "bounded"
    SUPER_RW = "superrw"
    STEPPING_STONE = "steppingstone"


class NoiseRegime(str, Enum):
    """Sign class of the noise correlation."""

    POSITIVE = "positive"
    ZERO = "zero"
    NEGATIVE = "negative"

    @classmethod
    def of(cls, rho: float) -> "NoiseRegime":
        """Classify a correlation value."""
        if rho > 0:
            return cls.POSITIVE
        if rho < 0:
            return cls.NEGATIVE
        return cls.ZERO


class ScalingKind(str, Enum):
    """How the lag s grows with t."""

    LINEAR = "linear"
    LOGARITHMIC = "log"

    def lag(self, t: float, a: float) -> float:
        """Lag s for base time t and scaling parameter a."""
        if self == ScalingKind.LINEAR:
            return a * t
        return t**a


class EvaluationPath(str, Enum):
    """Which return-probability kernel the integrals used."""

    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"


class AgingQuery(BaseModel):
    """
    Request for cor[u(t,k), u(t+s,k)].

    Attributes:
        kernel: Symmetric base kernel.
        kappa: Branching rate.
        rho: Noise correlation (symbiotic model).
        model: Diffusion class.
        lower: Lower bound alpha_1 of a bounded diffusion coefficient.
        upper: Upper bound alpha_2 of a bounded diffusion coefficient.
        w: Initial frequency of the stepping stone model.
        t: Base time.
        s: Lag.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    kernel: Kernel = Field(..., description="Symmetric base kernel")
    kappa: float = Field(default=1.0, gt=0, description="Branching rate")
    rho: float = Field(default=0.0, ge=-1.0, le=1.0, description="Noise correlation")
    model: DiffusionModel = Field(default=DiffusionModel.SYMBIOTIC, description="Diffusion class")
    lower: Optional[float] = Field(default=None, gt=0, description="alpha_1")
    upper: Optional[float] = Field(default=None, gt=0, description="alpha_2")
    w: Optional[float] = Field(default=None, gt=0, lt=1, description="Stepping stone frequency")
    t: float = Field(..., gt=0, description="Base time")
    s: float = Field(..., ge=0, description="Lag")

    @model_validator(mode="after")
    def validate_model_fields(self) -> "AgingQuery":
        """Model-specific parameters must be present."""
        if self.model == DiffusionModel.BOUNDED:
            if self.lower is None or self.upper is None or self.lower > self.upper:
                raise ValueError("bounded model needs 0 < lower <= upper")
        if self.model == DiffusionModel.STEPPING_STONE and self.w is None:
            raise ValueError("stepping stone model needs w in (0, 1)")
        return self

    @property
    def effective_rho(self) -> float:
        """Correlation implied by the model tag."""
        if self.model == DiffusionModel.ANDERSON:
            return 1.0
        if self.model == DiffusionModel.STEPPING_STONE:
            return -1.0
        if self.model in (DiffusionModel.SUPER_RW, DiffusionModel.BOUNDED):
            return 0.0
        return self.rho


class AgingRow(BaseModel):
    """One cell of an aging sweep."""

    model_config = {"frozen": True, "extra": "forbid"}

    t: float
    s: float
    a: float
    numeric: float = Field(..., ge=0, le=1 + 1e-9)
    limit: Optional[float] = None
    deviation: Optional[float] = None
    path: EvaluationPath
    lower: Optional[float] = None
    upper: Optional[float] = None


class AgingReport(BaseModel):
    """
    Correlations on a (a, t) grid compared with their limits.

    Attributes:
        model: Diffusion class.
        rho: Effective noise correlation.
        alpha: Tail exponent of the return probability.
        scaling: Lag scaling.
        rows: Sweep cells in (a, t) order.
        splice_point: Horizon beyond which m(t) used its asymptote, if any.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    model: DiffusionModel
    rho: float
    alpha: float
    scaling: ScalingKind
    rows: List[AgingRow] = Field(default_factory=list)
    splice_point: Optional[float] = None

    def deviation_trend(self) -> Dict[float, bool]:
        """
        Per scaling parameter a, whether |numeric - limit| decreases along t.

        One non-monotone step is tolerated to absorb quadrature noise.
        """
        trends: Dict[float, bool] = {}
        for a in sorted({row.a for row in self.rows}):
            deviations = [
                row.deviation
                for row in sorted(self.rows, key=lambda r: r.t)
                if row.a == a and row.deviation is not None and math.isfinite(row.deviation)
            ]
            increases = sum(1 for x, y in zip(deviations, deviations[1:]) if y > x)
            trends[a] = increases <= 1 and (len(deviations) < 2 or deviations[-1] <= deviations[0])
        return trends
