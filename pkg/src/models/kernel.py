"""
Random-walk kernel data models.

This module defines translation-invariant jump kernels on Z^d and the
sampled quantities derived from them: return-probability curves, their
power-law tails and Green values.

Models:
    Kernel: Normalized jump-rate table a(0, j) with a total jump rate
    TailCoefficients: (c, alpha) of p_t(0,0) ~ c t^-alpha
    ReturnCurve: Sampled t -> p_t(0,0) with tail metadata
    GreenValues: G = int p_t dt and H = int t p_t dt
"""

from enum import Enum
from functools import cached_property
import math
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.arrays import FloatArray

RATE_SUM_TOLERANCE = 1e-12


# =============================================================================
# ENUMS
# =============================================================================


class KernelVariant(str, Enum):
    """Family a kernel was built from."""

    DISCRETE_LAPLACIAN = "laplacian"
    RIEMANN_WALK = "riemann"
    FINITE_RANGE = "finite"


class CurveProvenance(str, Enum):
    """Which walk a return curve describes."""

    BASE = "base"
    SYMMETRIZATION = "symmetrization"


class TailSource(str, Enum):
    """How tail coefficients were obtained."""

    ANALYTIC = "analytic"
    FITTED = "fitted"


# =============================================================================
# KERNEL
# =============================================================================


class Kernel(BaseModel):
    """
    Translation-invariant jump kernel on Z^d.

    Only offsets from the origin are stored, so translation invariance is
    structural. ``rates`` are the jump probabilities q(j) and always sum to 1;
    the walk jumps at ``total_rate`` so that a(0, j) = total_rate * q(j).
    Base walks have total rate 1, the symmetrization (difference walk of two
    independent copies) has total rate 2.

    Attributes:
        dimension: Lattice dimension d.
        variant: Family the kernel was built from.
        offsets: Jump offsets j, one d-tuple per entry, no duplicates.
        rates: Jump probabilities q(j) >= 0 summing to 1.
        total_rate: Jump rate of the walk.
        beta: Riemann walk exponent, None otherwise.
        radius: Riemann walk truncation radius, None otherwise.
        truncated_mass: Mass of the infinite Riemann kernel beyond the radius.
        symmetrized: True if produced by symmetrize().

    Example:
        >>> from src.kernels import make_kernel, KernelSpec
        >>> k = make_kernel(KernelSpec(variant="laplacian", dimension=1))
        >>> k.jump_rates
        {(-1,): 0.5, (1,): 0.5}
    """

    model_config = {"frozen": True, "extra": "forbid"}

    dimension: int = Field(..., ge=1, description="Lattice dimension d")
    variant: KernelVariant = Field(..., description="Kernel family")
    offsets: Tuple[Tuple[int, ...], ...] = Field(..., min_length=1, description="Jump offsets")
    rates: Tuple[float, ...] = Field(..., min_length=1, description="Jump probabilities")
    total_rate: float = Field(default=1.0, gt=0, description="Total jump rate")
    beta: Optional[float] = Field(default=None, gt=0, description="Riemann exponent")
    radius: Optional[int] = Field(default=None, ge=1, description="Riemann truncation radius")
    truncated_mass: float = Field(default=0.0, ge=0, description="Discarded Riemann tail mass")
    symmetrized: bool = Field(default=False, description="Produced by symmetrize()")

    @model_validator(mode="after")
    def validate_table(self) -> "Kernel":
        """Check table shape, nonnegativity and normalization."""
        if len(self.offsets) != len(self.rates):
            raise ValueError(
                f"offsets ({len(self.offsets)}) and rates ({len(self.rates)}) differ in length"
            )
        for offset in self.offsets:
            if len(offset) != self.dimension:
                raise ValueError(f"offset {offset} does not have dimension {self.dimension}")
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError("offsets must be unique")
        if min(self.rates) < 0:
            raise ValueError("rates must be nonnegative")
        total = math.fsum(self.rates)
        if abs(total - 1.0) > RATE_SUM_TOLERANCE:
            raise ValueError(f"rates must sum to 1, got {total!r}")
        return self

    @cached_property
    def offset_array(self) -> np.ndarray:
        """Offsets as an (m, d) integer array."""
        array = np.asarray(self.offsets, dtype=np.int64).reshape(len(self.offsets), self.dimension)
        array.setflags(write=False)
        return array

    @cached_property
    def rate_array(self) -> np.ndarray:
        """Jump probabilities as a float array."""
        array = np.asarray(self.rates, dtype=np.float64)
        array.setflags(write=False)
        return array

    @property
    def jump_rates(self) -> Dict[Tuple[int, ...], float]:
        """Rate table a(0, j) = total_rate * q(j)."""
        return {j: self.total_rate * q for j, q in zip(self.offsets, self.rates)}

    @cached_property
    def symmetric(self) -> bool:
        """True if a(0, j) = a(0, -j) for every offset."""
        table = dict(zip(self.offsets, self.rates))
        for offset, rate in table.items():
            mirror = tuple(-x for x in offset)
            if not math.isclose(rate, table.get(mirror, 0.0), rel_tol=1e-12, abs_tol=1e-15):
                return False
        return True

    @property
    def drift(self) -> np.ndarray:
        """Mean jump sum_j q(j) j."""
        return self.rate_array @ self.offset_array.astype(np.float64)

    @property
    def has_drift(self) -> bool:
        """True if the mean jump is nonzero."""
        return bool(np.any(np.abs(self.drift) > 1e-12))

    @property
    def max_range(self) -> int:
        """Largest coordinate of any offset."""
        return int(np.abs(self.offset_array).max())

    def label(self) -> str:
        """Compact description in the kernel spec grammar."""
        if self.variant == KernelVariant.DISCRETE_LAPLACIAN:
            text = f"laplacian:d={self.dimension}"
        elif self.variant == KernelVariant.RIEMANN_WALK:
            text = f"riemann:beta={self.beta!r},radius={self.radius}"
        else:
            jumps = "|".join(
                f"{'x'.join(str(x) for x in j)}@{q!r}" for j, q in zip(self.offsets, self.rates)
            )
            text = f"finite:d={self.dimension},jumps={jumps}"
        if self.symmetrized:
            text += ",sym=1"
        if self.total_rate != 1.0 and not self.symmetrized:
            text += f",rate={self.total_rate!r}"
        return text

    def describe(self) -> Dict[str, object]:
        """JSON-ready summary used in cache headers and provenance blocks."""
        return {
            "label": self.label(),
            "dimension": self.dimension,
            "variant": self.variant.value,
            "total_rate": self.total_rate,
            "symmetric": self.symmetric,
            "symmetrized": self.symmetrized,
            "support_size": len(self.offsets),
            "truncated_mass": self.truncated_mass,
        }


# =============================================================================
# DERIVED QUANTITIES
# =============================================================================


class TailCoefficients(BaseModel):
    """
    Power-law tail p_t(0,0) ~ c t^-alpha.

    Attributes:
        c: Prefactor.
        alpha: Decay exponent.
        source: Analytic (closed form) or fitted (log-log regression).
        residual: RMS residual of the fit in log space, None when analytic.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    c: float = Field(..., gt=0, description="Tail prefactor")
    alpha: float = Field(..., gt=0, description="Tail exponent")
    source: TailSource = Field(..., description="Analytic or fitted")
    residual: Optional[float] = Field(default=None, ge=0, description="Fit residual")

    def evaluate(self, t: np.ndarray | float) -> np.ndarray | float:
        """Evaluate c t^-alpha."""
        return self.c * np.power(t, -self.alpha)


class ReturnCurve(BaseModel):
    """
    Sampled return probability t -> p_t(0,0).

    Attributes:
        times: Strictly increasing grid starting at 0.
        values: Return probabilities, values[0] = 1.
        tail: Tail coefficients when known or fitted.
        provenance: Base walk or symmetrization.
        kernel_label: Spec string of the kernel.
        total_rate: Jump rate used in the evaluation.
        tolerance: Absolute quadrature tolerance.
    """

    model_config = {"frozen": True, "extra": "forbid", "arbitrary_types_allowed": True}

    times: FloatArray = Field(..., description="Time grid")
    values: FloatArray = Field(..., description="p_t(0,0) on the grid")
    tail: Optional[TailCoefficients] = Field(default=None, description="Tail coefficients")
    provenance: CurveProvenance = Field(..., description="Base walk or symmetrization")
    kernel_label: str = Field(..., description="Kernel spec string")
    total_rate: float = Field(..., gt=0, description="Jump rate used")
    tolerance: float = Field(..., gt=0, description="Quadrature tolerance")

    @field_validator("times")
    @classmethod
    def validate_times(cls, v: np.ndarray) -> np.ndarray:
        """Grid must start at 0 and increase strictly."""
        if v.size < 2:
            raise ValueError("a return curve needs at least two grid points")
        if v[0] != 0.0:
            raise ValueError(f"time grid must start at 0, got {v[0]!r}")
        if np.any(np.diff(v) <= 0):
            raise ValueError("time grid must be strictly increasing")
        return v

    @model_validator(mode="after")
    def validate_values(self) -> "ReturnCurve":
        """p_0 = 1, values in [0, 1] and nonincreasing up to the tolerance."""
        if self.values.shape != self.times.shape:
            raise ValueError("values and times must have the same length")
        if abs(self.values[0] - 1.0) > self.tolerance:
            raise ValueError(f"p_0(0,0) must be 1, got {self.values[0]!r}")
        if np.any(self.values < 0) or np.any(self.values > 1.0 + self.tolerance):
            raise ValueError("return probabilities must lie in [0, 1]")
        if np.any(np.diff(self.values) > 2 * self.tolerance):
            raise ValueError("return probabilities must be nonincreasing in t")
        return self


class GreenValues(BaseModel):
    """
    Integrated return probabilities.

    Attributes:
        green: G = int_0^inf p_t(0,0) dt, infinite for recurrent walks.
        green_moment: H = int_0^inf t p_t(0,0) dt.
        total_rate: Jump rate the values refer to.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    green: float = Field(..., gt=0, description="G (may be inf)")
    green_moment: float = Field(..., gt=0, description="H (may be inf)")
    total_rate: float = Field(..., gt=0, description="Jump rate")

    @property
    def recurrent(self) -> bool:
        """True if G is infinite."""
        return math.isinf(self.green)

    @property
    def critical_rate(self) -> float:
        """kappa_cr = 1/G, zero for recurrent walks."""
        return 0.0 if self.recurrent else 1.0 / self.green
