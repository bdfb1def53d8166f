"""
Return curves and power-tail coefficients.

return_curve samples p_t(0,0) on a caller-supplied grid and attaches the
tail p_t ~ c t^-alpha: analytically for the discrete Laplacian
(alpha = d/2), with alpha = 1/beta and a fitted constant for Riemann walks
with beta < 2, and by log-log least squares on the last decade of the grid
otherwise.
"""

import math
from typing import Optional

import numpy as np
import structlog

from src.kernels.fourier import FourierQuadrature, is_separable, laplacian_tail
from src.models.kernel import (
    CurveProvenance,
    Kernel,
    KernelVariant,
    ReturnCurve,
    TailCoefficients,
    TailSource,
)

logger = structlog.get_logger(__name__)

MIN_FIT_POINTS = 3


def default_grid(horizon: float, linear_end: float = 5.0, points: int = 300) -> np.ndarray:
    """
    Grid that is linear near 0 and geometric beyond ``linear_end``.

    Args:
        horizon: Last grid time.
        linear_end: End of the linear segment.
        points: Number of geometric points.

    Returns:
        np.ndarray: Strictly increasing grid starting at 0.
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    head = np.linspace(0.0, min(horizon, linear_end), 101)
    if horizon <= linear_end:
        return head
    tail = np.geomspace(linear_end, horizon, points)[1:]
    return np.concatenate([head, tail])


def _fit_window(times: np.ndarray, values: np.ndarray, upper: Optional[float]) -> np.ndarray:
    end = float(times[-1]) if upper is None else min(float(times[-1]), upper)
    mask = (times >= end / 10.0) & (times <= end) & (times > 0) & (values > 0)
    return mask


def fit_tail(
    times: np.ndarray,
    values: np.ndarray,
    alpha: Optional[float] = None,
    upper: Optional[float] = None,
) -> Optional[TailCoefficients]:
    """
    Least-squares fit of log p = log c - alpha log t on the last decade.

    Args:
        times: Time grid.
        values: Return probabilities on the grid.
        alpha: Fix the exponent and fit only c.
        upper: Right end of the fitted decade (default: last grid time).

    Returns:
        TailCoefficients or None if fewer than three usable points exist.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    mask = _fit_window(times, values, upper)
    if int(mask.sum()) < MIN_FIT_POINTS:
        logger.debug("tail_fit_skipped", points=int(mask.sum()))
        return None

    log_t = np.log(times[mask])
    log_p = np.log(values[mask])
    if alpha is None:
        slope, intercept = np.polyfit(log_t, log_p, 1)
        alpha_fit = -float(slope)
    else:
        alpha_fit = alpha
        intercept = float(np.mean(log_p + alpha * log_t))
    if alpha_fit <= 0:
        return None

    residual = float(np.sqrt(np.mean((log_p - (intercept - alpha_fit * log_t)) ** 2)))
    return TailCoefficients(
        c=math.exp(intercept),
        alpha=alpha_fit,
        source=TailSource.FITTED,
        residual=residual,
    )


def kernel_tail(
    kernel: Kernel,
    times: np.ndarray,
    values: np.ndarray,
    total_rate: Optional[float] = None,
) -> Optional[TailCoefficients]:
    """
    Tail of a kernel's return probability, analytic where available.

    Riemann walks use alpha = 1/beta. A truncated walk only follows the
    stable scaling up to t ~ radius^beta, so c is fitted on the decade
    ending there when the grid reaches it.
    """
    rate = kernel.total_rate if total_rate is None else total_rate
    if is_separable(kernel):
        return laplacian_tail(rate, kernel.dimension)
    if kernel.variant == KernelVariant.RIEMANN_WALK and kernel.beta is not None and kernel.beta < 2:
        upper = None
        if kernel.radius is not None:
            crossover = float(kernel.radius) ** kernel.beta
            if crossover / 10.0 > times[1]:
                upper = crossover
        return fit_tail(times, values, alpha=1.0 / kernel.beta, upper=upper)
    return fit_tail(times, values)


def return_curve(
    kernel: Kernel,
    grid: np.ndarray,
    quadrature: Optional[FourierQuadrature] = None,
    total_rate: Optional[float] = None,
) -> ReturnCurve:
    """
    Sample t -> p_t(0,0) on a grid.

    Args:
        kernel: Jump kernel.
        grid: Strictly increasing times starting at 0.
        quadrature: Quadrature engine (a fresh one with default settings if None).
        total_rate: Jump rate (default: the kernel's own rate).

    Returns:
        ReturnCurve: Values with tail coefficients attached.

    Raises:
        QuadratureNotConverged: Propagated from return_probability.
    """
    quadrature = quadrature or FourierQuadrature()
    rate = kernel.total_rate if total_rate is None else total_rate
    times = np.asarray(grid, dtype=np.float64)
    values = np.clip(quadrature.return_probabilities(kernel, times, rate), 0.0, 1.0)
    if values.size:
        values[0] = 1.0 if times[0] == 0.0 else values[0]
    # Quadrature noise can break monotonicity below the tolerance.
    values = np.minimum.accumulate(values)

    tail = kernel_tail(kernel, times, values, rate)
    provenance = CurveProvenance.SYMMETRIZATION if kernel.symmetrized else CurveProvenance.BASE
    curve = ReturnCurve(
        times=times,
        values=values,
        tail=tail,
        provenance=provenance,
        kernel_label=kernel.label(),
        total_rate=rate,
        tolerance=quadrature.settings.tolerance_for(kernel.dimension),
    )
    logger.info(
        "return_curve_computed",
        kernel=curve.kernel_label,
        points=int(times.size),
        horizon=float(times[-1]),
        alpha=tail.alpha if tail else None,
    )
    return curve
