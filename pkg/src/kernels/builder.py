"""
Kernel construction, symmetrization and spec-string parsing.

Kernels are described by a KernelSpec (or the compact grammar
``name:key=value,...``) and normalized by make_kernel so the jump
probabilities sum to one. symmetrize returns the difference walk of two
independent copies, which jumps at twice the rate.

Grammar:
    spec     = name [ ":" option { "," option } ]
    name     = "laplacian" | "riemann" | "finite"
    option   = key "=" value
    key      = "d" | "beta" | "radius" | "jumps" | "rate" | "sym"
    jumps    = jump { "|" jump }
    jump     = coord { "x" coord } "@" rate

Example:
    >>> k = make_kernel(parse_kernel_spec("riemann:beta=0.5,radius=3"))
    >>> len(k.offsets)
    6
"""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError
from scipy import special
import structlog

from src.exceptions import EmptySupport, InvalidConfig, NegativeRate, NonNormalizable
from src.models.kernel import Kernel, KernelVariant

logger = structlog.get_logger(__name__)

DEFAULT_RIEMANN_RADIUS = 10_000


class KernelSpec(BaseModel):
    """
    Unnormalized kernel description.

    Attributes:
        variant: Kernel family.
        dimension: Lattice dimension (Riemann walks are one-dimensional).
        beta: Riemann exponent.
        radius: Riemann truncation radius.
        jumps: FiniteRange (offset, rate) pairs; rates need not sum to 1.
        rate: Total jump rate of the walk.
        symmetrize: Return the symmetrization instead of the walk itself.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    variant: KernelVariant = Field(..., description="Kernel family")
    dimension: int = Field(default=1, ge=1, description="Lattice dimension")
    beta: Optional[float] = Field(default=None, description="Riemann exponent")
    radius: int = Field(default=DEFAULT_RIEMANN_RADIUS, description="Riemann truncation radius")
    jumps: Tuple[Tuple[Tuple[int, ...], float], ...] = Field(
        default=(),
        description="FiniteRange (offset, rate) pairs",
    )
    rate: float = Field(default=1.0, gt=0, description="Total jump rate")
    symmetrize: bool = Field(default=False, description="Build the symmetrization")

    def to_text(self) -> str:
        """Render the spec in the compact grammar."""
        parts: List[str] = []
        if self.variant == KernelVariant.RIEMANN_WALK:
            parts += [f"beta={self.beta!r}", f"radius={self.radius}"]
        else:
            parts.append(f"d={self.dimension}")
        if self.variant == KernelVariant.FINITE_RANGE:
            jumps = "|".join(f"{'x'.join(str(c) for c in j)}@{r!r}" for j, r in self.jumps)
            parts.append(f"jumps={jumps}")
        if self.rate != 1.0:
            parts.append(f"rate={self.rate!r}")
        if self.symmetrize:
            parts.append("sym=1")
        return f"{self.variant.value}:{','.join(parts)}"


# =============================================================================
# CONSTRUCTION
# =============================================================================


def _laplacian_table(dimension: int) -> Dict[Tuple[int, ...], float]:
    table: Dict[Tuple[int, ...], float] = {}
    for axis in range(dimension):
        for sign in (1, -1):
            offset = [0] * dimension
            offset[axis] = sign
            table[tuple(offset)] = 1.0 / (2 * dimension)
    return table


def _riemann_table(
    beta: Optional[float], radius: int
) -> Tuple[Dict[Tuple[int, ...], float], float]:
    if beta is None or not beta > 0:
        raise NonNormalizable(f"Riemann walk needs beta > 0, got {beta!r}")
    if radius < 1:
        raise NonNormalizable(f"Riemann walk needs radius >= 1, got {radius}")

    distances = np.arange(1, radius + 1, dtype=np.float64)
    weights = distances ** (-1.0 - beta)
    table: Dict[Tuple[int, ...], float] = {}
    for j, w in zip(range(1, radius + 1), weights):
        table[(j,)] = float(w)
        table[(-j,)] = float(w)

    # Mass of |j| > R in the infinite kernel, relative to its total.
    truncated = float(special.zeta(1.0 + beta, radius + 1) / special.zeta(1.0 + beta, 1))
    return table, truncated


def _finite_table(
    jumps: Tuple[Tuple[Tuple[int, ...], float], ...], dimension: int
) -> Dict[Tuple[int, ...], float]:
    table: Dict[Tuple[int, ...], float] = {}
    for offset, rate in jumps:
        if len(offset) != dimension:
            raise InvalidConfig(f"offset {offset} does not have dimension {dimension}")
        if rate < 0:
            raise NegativeRate(f"rate {rate!r} at offset {offset} is negative")
        table[tuple(offset)] = table.get(tuple(offset), 0.0) + float(rate)
    return table


def _normalize(
    table: Dict[Tuple[int, ...], float],
) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[float, ...]]:
    positive = {j: r for j, r in table.items() if r > 0}
    if not positive:
        raise EmptySupport("kernel has no positive rate")
    total = math.fsum(positive.values())
    if not math.isfinite(total) or total <= 0:
        raise NonNormalizable(f"rates sum to {total!r}")

    offsets = tuple(sorted(positive))
    rates = [positive[j] / total for j in offsets]
    # Push the rounding residue onto the largest entry so the sum is 1 to the last bit.
    residue = 1.0 - math.fsum(rates)
    largest = int(np.argmax(rates))
    rates[largest] += residue
    return offsets, tuple(rates)


def make_kernel(spec: KernelSpec) -> Kernel:
    """
    Build a normalized kernel from its description.

    Args:
        spec: Kernel description.

    Returns:
        Kernel: Rates normalized to sum 1; the symmetrization if requested.

    Raises:
        NegativeRate: If a FiniteRange rate is negative.
        EmptySupport: If no rate is positive.
        NonNormalizable: If the rates cannot be normalized or Riemann
            parameters are out of range.
    """
    truncated = 0.0
    beta: Optional[float] = None
    radius: Optional[int] = None
    dimension = spec.dimension

    if spec.variant == KernelVariant.DISCRETE_LAPLACIAN:
        table = _laplacian_table(dimension)
    elif spec.variant == KernelVariant.RIEMANN_WALK:
        table, truncated = _riemann_table(spec.beta, spec.radius)
        beta, radius, dimension = spec.beta, spec.radius, 1
    else:
        table = _finite_table(spec.jumps, dimension)

    offsets, rates = _normalize(table)
    kernel = Kernel(
        dimension=dimension,
        variant=spec.variant,
        offsets=offsets,
        rates=rates,
        total_rate=spec.rate,
        beta=beta,
        radius=radius,
        truncated_mass=truncated,
    )
    logger.debug(
        "kernel_created",
        label=kernel.label(),
        support=len(offsets),
        symmetric=kernel.symmetric,
        truncated_mass=truncated,
    )
    return symmetrize(kernel) if spec.symmetrize else kernel


def symmetrize(kernel: Kernel) -> Kernel:
    """
    Symmetrization a(i,j) + a(j,i) of a kernel.

    The result is the difference walk of two independent copies: its jump
    probabilities are (q(j) + q(-j)) / 2 and its total rate is twice the
    input rate, so a_bar(0, j) = a(0, j) + a(0, -j).

    Args:
        kernel: Any valid kernel.

    Returns:
        Kernel: Symmetric kernel with doubled total rate.
    """
    table: Dict[Tuple[int, ...], float] = {}
    for offset, rate in zip(kernel.offsets, kernel.rates):
        mirror = tuple(-x for x in offset)
        table[offset] = table.get(offset, 0.0) + 0.5 * rate
        table[mirror] = table.get(mirror, 0.0) + 0.5 * rate

    offsets, rates = _normalize(table)
    return Kernel(
        dimension=kernel.dimension,
        variant=kernel.variant,
        offsets=offsets,
        rates=rates,
        total_rate=2.0 * kernel.total_rate,
        beta=kernel.beta,
        radius=kernel.radius,
        truncated_mass=kernel.truncated_mass,
        symmetrized=True,
    )


# =============================================================================
# SPEC GRAMMAR
# =============================================================================


def _parse_jumps(text: str) -> Tuple[Tuple[Tuple[int, ...], float], ...]:
    jumps = []
    for item in text.split("|"):
        if "@" not in item:
            raise InvalidConfig(f"jump '{item}' must look like 'offset@rate'")
        offset_text, rate_text = item.split("@", 1)
        try:
            offset = tuple(int(c) for c in offset_text.split("x"))
            rate = float(rate_text)
        except ValueError as e:
            raise InvalidConfig(f"cannot parse jump '{item}': {e}") from e
        jumps.append((offset, rate))
    return tuple(jumps)


def parse_kernel_spec(text: str) -> KernelSpec:
    """
    Parse the compact kernel grammar.

    Args:
        text: e.g. ``laplacian:d=3``, ``riemann:beta=0.5,radius=1000`` or
            ``finite:d=1,jumps=1@0.7|-1@0.3``.

    Returns:
        KernelSpec: Parsed description.

    Raises:
        InvalidConfig: If the text does not follow the grammar.
    """
    name, _, rest = text.strip().partition(":")
    try:
        variant = KernelVariant(name.strip().lower())
    except ValueError as e:
        raise InvalidConfig(f"unknown kernel '{name}' in '{text}'") from e

    fields: Dict[str, object] = {"variant": variant}
    for option in filter(None, (part.strip() for part in rest.split(","))):
        key, sep, value = option.partition("=")
        if not sep:
            raise InvalidConfig(f"option '{option}' must look like key=value")
        key = key.strip().lower()
        try:
            if key == "d":
                fields["dimension"] = int(value)
            elif key == "beta":
                fields["beta"] = float(value)
            elif key == "radius":
                fields["radius"] = int(value)
            elif key == "rate":
                fields["rate"] = float(value)
            elif key == "sym":
                fields["symmetrize"] = value.strip().lower() in ("1", "true", "yes")
            elif key == "jumps":
                fields["jumps"] = _parse_jumps(value)
            else:
                raise InvalidConfig(f"unknown kernel option '{key}' in '{text}'")
        except ValueError as e:
            if isinstance(e, InvalidConfig):
                raise
            raise InvalidConfig(f"bad value for '{key}' in '{text}': {e}") from e

    try:
        return KernelSpec.model_validate(fields)
    except ValidationError as e:
        raise InvalidConfig(f"invalid kernel spec '{text}': {e}") from e


def kernel_from_text(text: str) -> Kernel:
    """Parse and build a kernel in one step."""
    return make_kernel(parse_kernel_spec(text))
