"""
Second-moment data models for the symbiotic branching model.

Models:
    ModelParams: Kernel, branching rate kappa and noise correlation rho
    IntermittencyVerdict: intermittent | boundary | non_intermittent
    IntermittencyResult: Verdict with gamma_2 and the threshold
    MomentReport: E[uv] and E[u^2] curves with verdict and asymptote
"""

from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from src.models.arrays import FloatArray
from src.models.curves import GrowthAsymptote
from src.models.kernel import Kernel


class IntermittencyVerdict(str, Enum):
    """Classification of exponential second-moment growth."""

    INTERMITTENT = "intermittent"
    BOUNDARY = "boundary"
    NON_INTERMITTENT = "non_intermittent"


class ModelParams(BaseModel):
    """
    Parameters of the symbiotic branching model with u_0 = v_0 = 1.

    Attributes:
        kernel: Base random-walk kernel (total rate 1).
        kappa: Branching rate, kappa > 0.
        rho: Correlation of the driving noises, rho in [-1, 1].
        homogeneous: Homogeneous unit initial condition (always True).
    """

    model_config = {"frozen": True, "extra": "forbid"}

    kernel: Kernel = Field(..., description="Base random-walk kernel")
    kappa: float = Field(..., gt=0, description="Branching rate")
    rho: float = Field(..., ge=-1.0, le=1.0, description="Noise correlation")
    homogeneous: Literal[True] = Field(default=True, description="u_0 = v_0 = 1")

    @property
    def effective_rate(self) -> float:
        """kappa * rho, the rate driving E[uv]."""
        return self.kappa * self.rho


class IntermittencyResult(BaseModel):
    """Verdict JSON: {kappa, rho, kappa_cr, gamma2, verdict}."""

    model_config = {"frozen": True, "extra": "forbid"}

    kappa: float = Field(..., description="Branching rate")
    rho: float = Field(..., description="Noise correlation")
    kappa_cr: float = Field(..., ge=0, description="1/G of the symmetrization")
    gamma2: float = Field(..., ge=0, description="Second-moment Lyapunov exponent")
    verdict: IntermittencyVerdict = Field(..., description="Classification")

    @property
    def is_intermittent(self) -> bool:
        """True if second moments grow exponentially."""
        return self.verdict == IntermittencyVerdict.INTERMITTENT


class MomentReport(BaseModel):
    """
    Second moments of the symbiotic branching model.

    Attributes:
        times: Uniform time grid.
        mixed: t -> E[u(t,k) v(t,k)].
        second: t -> E[u(t,k)^2].
        result: Intermittency verdict with gamma_2.
        asymptote: Subexponential asymptote of E[u^2], None when intermittent.
        growth_rate_mixed: Measured slope of log E[uv] on the last half.
        growth_rate_second: Measured slope of log E[u^2] on the last half.
    """

    model_config = {"frozen": True, "extra": "forbid", "arbitrary_types_allowed": True}

    times: FloatArray = Field(..., description="Time grid")
    mixed: FloatArray = Field(..., description="E[uv]")
    second: FloatArray = Field(..., description="E[u^2]")
    result: IntermittencyResult = Field(..., description="Verdict")
    asymptote: Optional[GrowthAsymptote] = Field(default=None, description="E[u^2] asymptote")
    growth_rate_mixed: float = Field(..., description="Measured growth rate of E[uv]")
    growth_rate_second: float = Field(..., description="Measured growth rate of E[u^2]")

    @model_validator(mode="after")
    def validate_curves(self) -> "MomentReport":
        """Curves share the grid and start at 1."""
        if not (self.times.shape == self.mixed.shape == self.second.shape):
            raise ValueError("times, mixed and second must have the same length")
        if abs(self.mixed[0] - 1.0) > 1e-12 or abs(self.second[0] - 1.0) > 1e-12:
            raise ValueError("second moments must equal 1 at t=0")
        return self
