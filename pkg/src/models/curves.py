"""
Local-time moment models.

Models:
    MomentCurve: Sampled t -> g(t) = E[exp(kappa L_t)] from the renewal solver
    GrowthAsymptote: Symbolic large-t asymptote with an evaluator
    AsymptoticRate: Closed-form prediction of r(kappa)
    LyapunovPoint: One sample of r(kappa) with its regime
    PropertyCheck: Outcome of one numerical property check
    LyapunovReport: kappa_cr, r(kappa) samples and checks
"""

from enum import Enum
import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.models.arrays import FloatArray


class LyapunovRegime(str, Enum):
    """Position of kappa relative to kappa_cr."""

    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


class MomentCurve(BaseModel):
    """
    Solution of g(t) = 1 + kappa int_0^t f(r) g(t-r) dr on a uniform grid.

    Attributes:
        times: Uniform grid {0, h, ..., T}.
        values: g on the grid, values[0] = 1.
        kappa: Rate parameter.
        step: Step size h.
        source: Label of the return source f.
        residual: Renewal-equation residual at checkpoints, NaN elsewhere.
        error_estimate: Richardson error estimate per grid point, if computed.
        extrapolated: True if values are Richardson-extrapolated.
    """

    model_config = {"frozen": True, "extra": "forbid", "arbitrary_types_allowed": True}

    times: FloatArray = Field(..., description="Uniform time grid")
    values: FloatArray = Field(..., description="g(t) on the grid")
    kappa: float = Field(..., description="Rate parameter kappa")
    step: float = Field(..., gt=0, description="Step size h")
    source: str = Field(..., description="Return source label")
    residual: FloatArray = Field(..., description="Residual at checkpoints (NaN elsewhere)")
    error_estimate: Optional[FloatArray] = Field(default=None, description="Richardson estimate")
    extrapolated: bool = Field(default=False, description="Richardson-extrapolated values")

    @model_validator(mode="after")
    def validate_shape(self) -> "MomentCurve":
        """Arrays share the grid and g(0) = 1."""
        if self.values.shape != self.times.shape or self.residual.shape != self.times.shape:
            raise ValueError("times, values and residual must have the same length")
        if self.error_estimate is not None and self.error_estimate.shape != self.times.shape:
            raise ValueError("error_estimate must match the grid")
        if self.values[0] != 1.0:
            raise ValueError(f"g(0) must be exactly 1, got {self.values[0]!r}")
        return self

    @property
    def horizon(self) -> float:
        """Last grid time T."""
        return float(self.times[-1])

    @property
    def max_residual(self) -> float:
        """Largest absolute residual over the checkpoints."""
        finite = self.residual[np.isfinite(self.residual)]
        return float(np.abs(finite).max()) if finite.size else 0.0

    def at(self, t: float) -> float:
        """Value at a grid time (nearest node)."""
        index = int(round(t / self.step))
        if index < 0 or index >= self.values.size:
            raise ValueError(f"t={t} outside the solved horizon [0, {self.horizon}]")
        return float(self.values[index])

    def growth_rate(self, fraction: float = 0.5) -> float:
        """Slope of log g over the last ``fraction`` of the horizon."""
        start = int((1.0 - fraction) * (self.values.size - 1))
        g0, g1 = self.values[start], self.values[-1]
        if g0 <= 0 or g1 <= 0:
            return float("nan")
        return float((math.log(g1) - math.log(g0)) / (self.times[-1] - self.times[start]))


class GrowthAsymptote(BaseModel):
    """
    Large-t asymptote offset + prefactor * t^power * (log t)^log_power.

    Attributes:
        regime: Regime label, e.g. "negative", "critical", "subcritical".
        offset: Additive constant (nonzero after the duality map).
        prefactor: Leading coefficient.
        power: Exponent of t.
        log_power: Exponent of log t.
        formula: Human-readable formula.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    regime: str = Field(..., description="Regime label")
    offset: float = Field(default=0.0, description="Additive constant")
    prefactor: float = Field(..., description="Leading coefficient")
    power: float = Field(default=0.0, description="Exponent of t")
    log_power: float = Field(default=0.0, description="Exponent of log t")
    formula: str = Field(..., description="Readable formula")

    @property
    def is_constant(self) -> bool:
        """True if the asymptote does not depend on t."""
        return self.power == 0.0 and self.log_power == 0.0

    @property
    def limit(self) -> Optional[float]:
        """Finite limit as t -> infinity, None if the asymptote diverges."""
        if self.is_constant:
            return self.offset + self.prefactor
        if self.power < 0 or (self.power == 0 and self.log_power < 0):
            return self.offset
        return None

    def evaluate(self, t: np.ndarray | float) -> np.ndarray | float:
        """Evaluate the asymptote at t > 1."""
        t_arr = np.asarray(t, dtype=np.float64)
        value = self.prefactor * np.power(t_arr, self.power)
        if self.log_power != 0.0:
            value = value * np.power(np.log(t_arr), self.log_power)
        result = self.offset + value
        return float(result) if np.ndim(result) == 0 else result

    def scaled(self, factor: float, offset: float) -> "GrowthAsymptote":
        """Affine image offset + factor * (this asymptote)."""
        return GrowthAsymptote(
            regime=self.regime,
            offset=offset + factor * self.offset,
            prefactor=factor * self.prefactor,
            power=self.power,
            log_power=self.log_power,
            formula=f"{offset!r} + {factor!r} * ({self.formula})",
        )


class AsymptoticRate(BaseModel):
    """
    Closed-form prediction of r(kappa).

    For alpha = 1 only the logarithmic exponent -1/(c kappa) is asserted;
    ``value`` then carries exp(exponent) as a scale, flagged by
    ``exponent_only``.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    regime: str = Field(..., description="alpha<1, alpha=1, 1<alpha<2, alpha=2 or alpha>2")
    value: float = Field(..., ge=0, description="Predicted r(kappa)")
    log_exponent: Optional[float] = Field(default=None, description="log r for alpha=1")
    exponent_only: bool = Field(default=False, description="Only the exponent is asserted")


class LyapunovPoint(BaseModel):
    """One sample of r(kappa)."""

    model_config = {"frozen": True, "extra": "forbid"}

    kappa: float = Field(..., description="Rate parameter")
    rate: float = Field(..., ge=0, description="r(kappa)")
    regime: LyapunovRegime = Field(..., description="Position relative to kappa_cr")
    prediction: Optional[float] = Field(default=None, description="Asymptotic prediction")


class PropertyCheck(BaseModel):
    """Outcome of a numerical property check."""

    model_config = {"frozen": True, "extra": "forbid"}

    name: str = Field(..., description="Check name")
    passed: bool = Field(..., description="True if the check holds")
    measured: Optional[float] = Field(default=None, description="Measured quantity")
    expected: Optional[float] = Field(default=None, description="Reference value")
    detail: str = Field(default="", description="Explanation")
    boundary_case: bool = Field(default=False, description="Degenerate case, not a failure")


class LyapunovReport(BaseModel):
    """
    Critical rate, sampled exponents and property checks.

    Attributes:
        kappa_cr: 1/G (0 for recurrent walks).
        rho: Noise correlation the kappa grid is scaled by (1 for r(kappa)).
        points: Samples over the kappa grid.
        checks: Property checks performed on the samples.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    kappa_cr: float = Field(..., ge=0, description="Critical rate 1/G")
    rho: float = Field(default=1.0, description="Noise correlation")
    points: List[LyapunovPoint] = Field(default_factory=list, description="Samples")
    checks: List[PropertyCheck] = Field(default_factory=list, description="Checks")

    @property
    def all_passed(self) -> bool:
        """True if every non-degenerate check passed."""
        return all(check.passed or check.boundary_case for check in self.checks)

    def check(self, name: str) -> PropertyCheck:
        """Look up a check by name."""
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)
