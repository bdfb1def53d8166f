"""
Fourier quadrature for return probabilities and Green functions.

Every quantity is an average over the torus [0, 2pi)^d of a function of the
characteristic function a_hat(theta) = sum_j q(j) e^{i theta.j}:

    p_t(0,0)      = mean exp(t rho (a_hat - 1))
    f_hat(lambda) = mean 1 / (lambda + rho (1 - a_hat))
    G             = mean 1 / (rho (1 - a_hat))
    H             = mean 1 / (rho (1 - a_hat))^2

The tensor-product trapezoidal rule on an n^d grid is spectrally accurate
for periodic integrands. a_hat on the grid is exact for any n: offsets are
wrapped modulo n and transformed with an inverse FFT. The grid doubles until
two successive estimates agree.

Green integrals are singular at theta = 0. The origin node is dropped and
the punctured sums are Richardson-extrapolated in h with the leading error
exponent d - s, where s is the degree of the singularity.

The discrete Laplacian factorises into d one-dimensional walks, and the
one-dimensional integral equals e^{-x} I_0(x). Laplacian kernels use that
identity (scipy.special.ive) and time-domain integration instead of the
tensor grid.

Classes:
    FourierQuadrature: Adaptive quadrature with per-grid caching
"""

import math
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import integrate, special
import structlog

from src.config.models import QuadratureSettings
from src.exceptions import QuadratureNotConverged
from src.interfaces.curve_store import CurveStore
from src.kernels.timedomain import laplace_integral
from src.models.kernel import GreenValues, Kernel, KernelVariant, TailCoefficients, TailSource

logger = structlog.get_logger(__name__)

FINITE_VARIANCE_ORDER = 2.0


def is_separable(kernel: Kernel) -> bool:
    """True if the kernel is a (possibly symmetrized) discrete Laplacian."""
    return kernel.variant == KernelVariant.DISCRETE_LAPLACIAN


def laplacian_return(t: np.ndarray | float, rate: float, dimension: int) -> np.ndarray:
    """p_t(0,0) = (e^{-x} I_0(x))^d with x = rate t / d."""
    x = np.asarray(t, dtype=np.float64) * rate / dimension
    return special.ive(0, x) ** dimension


def laplacian_tail(rate: float, dimension: int) -> TailCoefficients:
    """Local limit p_t ~ (d / (2 pi rate t))^{d/2}."""
    return TailCoefficients(
        c=(dimension / (2.0 * math.pi * rate)) ** (dimension / 2.0),
        alpha=dimension / 2.0,
        source=TailSource.ANALYTIC,
    )


def singular_order(kernel: Kernel) -> float:
    """
    Degree s of the singularity 1/(1 - a_hat) ~ |theta|^-s at the origin.

    Finite-variance walks have s = 2, Riemann walks with beta < 2 have
    s = beta. Drifted walks have a bounded real part, s = 0.
    """
    if kernel.has_drift:
        return 0.0
    if kernel.variant == KernelVariant.RIEMANN_WALK and kernel.beta is not None and kernel.beta < 2:
        return float(kernel.beta)
    return FINITE_VARIANCE_ORDER


class FourierQuadrature:
    """
    Adaptive Fourier quadrature over the torus.

    Characteristic-function grids are cached per (kernel, n), so evaluating a
    whole time grid costs one FFT per refinement level.

    Example:
        >>> from src.kernels import kernel_from_text
        >>> quad = FourierQuadrature()
        >>> k = kernel_from_text("finite:d=1,jumps=1@0.5|-1@0.5")
        >>> round(quad.return_probability(k, 1.0), 6)
        0.46576

    Attributes:
        settings: Tolerances and node limits.
        curves: Optional store that kernel profiles read sampled curves from.
    """

    def __init__(
        self,
        settings: Optional[QuadratureSettings] = None,
        curves: Optional[CurveStore] = None,
    ) -> None:
        self.settings = settings or QuadratureSettings()
        self.curves = curves
        self._grids: Dict[Tuple[str, float, int], np.ndarray] = {}

    def __repr__(self) -> str:
        return f"FourierQuadrature(cached_grids={len(self._grids)})"

    # -------------------------------------------------------------------------
    # Grids
    # -------------------------------------------------------------------------

    def _max_nodes(self, dimension: int) -> int:
        return int(math.floor(self.settings.max_total_nodes ** (1.0 / dimension) + 1e-9))

    def _levels(self, kernel: Kernel, cap: Optional[int] = None) -> list[int]:
        limit = self._max_nodes(kernel.dimension)
        if cap is not None:
            limit = min(limit, cap)
        levels = []
        n = self.settings.initial_nodes
        while n <= limit:
            levels.append(n)
            n *= 2
        return levels

    def characteristic(self, kernel: Kernel, n: int) -> np.ndarray:
        """
        a_hat on the grid theta_k = 2 pi k / n, k in {0..n-1}^d.

        Real for symmetric kernels, complex otherwise.
        """
        key = (kernel.label(), kernel.total_rate, n)
        cached = self._grids.get(key)
        if cached is not None:
            return cached

        shape = (n,) * kernel.dimension
        table = np.zeros(shape, dtype=np.complex128)
        index = tuple((kernel.offset_array % n).T)
        np.add.at(table, index, kernel.rate_array)
        phi = np.fft.ifftn(table) * float(n**kernel.dimension)
        if kernel.symmetric:
            phi = np.ascontiguousarray(phi.real)
        phi.setflags(write=False)

        self._grids[key] = phi
        return phi

    def clear(self) -> None:
        """Drop cached grids."""
        self._grids.clear()

    # -------------------------------------------------------------------------
    # Return probabilities
    # -------------------------------------------------------------------------

    def return_probability(
        self, kernel: Kernel, t: float, total_rate: Optional[float] = None
    ) -> float:
        """
        p_t(0,0) of the walk jumping at ``total_rate``.

        Args:
            kernel: Jump kernel.
            t: Time, >= 0.
            total_rate: Jump rate (default: the kernel's own rate).

        Returns:
            float: Return probability in (0, 1].

        Raises:
            ValueError: If t < 0.
            QuadratureNotConverged: If the node budget is exhausted.
        """
        if t < 0:
            raise ValueError(f"time must be >= 0, got {t}")
        rate = kernel.total_rate if total_rate is None else total_rate
        if t == 0:
            return 1.0
        if is_separable(kernel):
            return float(laplacian_return(t, rate, kernel.dimension))

        tol = self.settings.tolerance_for(kernel.dimension)
        previous: Optional[float] = None
        error = math.inf
        levels = self._levels(kernel)
        for n in levels:
            phi = self.characteristic(kernel, n)
            value = float(np.mean(np.exp(t * rate * (phi - 1.0))).real)
            if previous is not None:
                error = abs(value - previous)
                if error < tol:
                    logger.debug("return_probability_converged", t=t, nodes=n, error=error)
                    return min(max(value, 0.0), 1.0)
            previous = value
        raise QuadratureNotConverged(
            f"p_t(0,0) at t={t} for {kernel.label()}",
            achieved_error=error,
            tolerance=tol,
            nodes=levels[-1] if levels else None,
        )

    def return_probabilities(
        self, kernel: Kernel, times: np.ndarray, total_rate: Optional[float] = None
    ) -> np.ndarray:
        """Vectorized return_probability over a time grid."""
        times = np.asarray(times, dtype=np.float64)
        rate = kernel.total_rate if total_rate is None else total_rate
        if is_separable(kernel):
            if np.any(times < 0):
                raise ValueError("times must be >= 0")
            return laplacian_return(times, rate, kernel.dimension)
        return np.array([self.return_probability(kernel, float(t), rate) for t in times])

    # -------------------------------------------------------------------------
    # Laplace transform
    # -------------------------------------------------------------------------

    def laplace(self, kernel: Kernel, lam: float, total_rate: Optional[float] = None) -> float:
        """
        f_hat(lam) = int_0^inf e^{-lam t} p_t(0,0) dt.

        lam = 0 returns G (possibly inf).

        Raises:
            ValueError: If lam < 0.
            QuadratureNotConverged: If the node budget is exhausted.
        """
        if lam < 0:
            raise ValueError(f"Laplace variable must be >= 0, got {lam}")
        rate = kernel.total_rate if total_rate is None else total_rate
        if lam == 0:
            return self.green_values(kernel, rate).green
        if is_separable(kernel):
            return laplace_integral(
                lambda t: laplacian_return(t, rate, kernel.dimension),
                lam,
                rel_tol=self.settings.time_rel_tol,
            )

        tol = self.settings.tolerance_for(kernel.dimension)
        previous: Optional[float] = None
        error = math.inf
        levels = self._levels(kernel)
        for n in levels:
            phi = self.characteristic(kernel, n)
            value = float(np.mean(1.0 / (lam + rate * (1.0 - phi))).real)
            if previous is not None:
                error = abs(value - previous)
                if error < tol * max(1.0, abs(value)):
                    return value
            previous = value
        raise QuadratureNotConverged(
            f"f_hat({lam}) for {kernel.label()}",
            achieved_error=error,
            tolerance=tol,
            nodes=levels[-1] if levels else None,
        )

    # -------------------------------------------------------------------------
    # Green values
    # -------------------------------------------------------------------------

    def _punctured_mean(self, kernel: Kernel, n: int, rate: float, power: int) -> float:
        phi = self.characteristic(kernel, n)
        gap = rate * (1.0 - phi)
        singular = np.abs(gap) < 1e-13 * rate
        safe = np.where(singular, 1.0, gap)
        values = np.where(singular, 0.0, (1.0 / safe) ** power)
        return float(np.mean(values).real)

    def _singular_integral(self, kernel: Kernel, rate: float, power: int) -> float:
        order = singular_order(kernel) * power
        exponent = kernel.dimension - order
        if exponent <= 0:
            return math.inf

        cap = kernel.radius if kernel.variant == KernelVariant.RIEMANN_WALK else None
        levels = self._levels(kernel, cap=cap)
        tol = self.settings.green_rel_tol
        # Richardson table in h; column j removes the h^(exponent + 2j) term.
        table: list[list[float]] = []
        error = math.inf
        best = math.nan
        for n in levels:
            row = [self._punctured_mean(kernel, n, rate, power)]
            growth = row[0] / table[-1][0] if table and table[-1][0] > 0 else 0.0
            if growth > self.settings.divergence_factor:
                logger.info("green_integral_diverges", kernel=kernel.label(), nodes=n)
                return math.inf
            for j, previous in enumerate(table[-1] if table else []):
                factor = 2.0 ** (exponent + 2 * j)
                row.append((factor * row[j] - previous) / (factor - 1.0))
            if table:
                error = abs(row[-1] - table[-1][-1])
                best = row[-1]
                if len(row) >= 3 and error <= tol * abs(best):
                    logger.debug(
                        "green_integral_converged",
                        kernel=kernel.label(),
                        power=power,
                        nodes=n,
                        relative_error=error / abs(best),
                    )
                    return best
            table.append(row)
        raise QuadratureNotConverged(
            f"singular Green integral (power {power}) for {kernel.label()}",
            achieved_error=error / abs(best) if math.isfinite(best) and best else math.inf,
            tolerance=tol,
            nodes=levels[-1] if levels else None,
        )

    def green_values(self, kernel: Kernel, total_rate: Optional[float] = None) -> GreenValues:
        """
        G = int p_t dt and H = int t p_t dt.

        Args:
            kernel: Jump kernel.
            total_rate: Jump rate (default: the kernel's own rate).

        Returns:
            GreenValues: inf entries flag recurrence (G) or alpha <= 2 (H).

        Raises:
            QuadratureNotConverged: If the singular integral does not settle.
        """
        rate = kernel.total_rate if total_rate is None else total_rate

        if is_separable(kernel):
            tail = laplacian_tail(rate, kernel.dimension)

            def p(t: np.ndarray) -> np.ndarray:
                return laplacian_return(t, rate, kernel.dimension)

            green = laplace_integral(p, 0.0, 0, tail, rel_tol=self.settings.time_rel_tol)
            moment = laplace_integral(p, 0.0, 1, tail, rel_tol=self.settings.time_rel_tol)
        elif kernel.has_drift:
            green = self._singular_integral(kernel, rate, power=1)
            moment, _ = integrate.quad(
                lambda t: t * self.return_probability(kernel, t, rate),
                0.0,
                math.inf,
                limit=200,
            )
        else:
            green = self._singular_integral(kernel, rate, power=1)
            moment = (
                math.inf if math.isinf(green) else self._singular_integral(kernel, rate, power=2)
            )

        logger.debug("green_values", kernel=kernel.label(), rate=rate, green=green, moment=moment)
        return GreenValues(green=green, green_moment=moment, total_rate=rate)


# =============================================================================
# MODULE-LEVEL ENTRY POINTS
# =============================================================================

_default_quadrature = FourierQuadrature()


def default_quadrature() -> FourierQuadrature:
    """Process-wide engine used when callers do not pass their own."""
    return _default_quadrature


def return_probability(
    kernel: Kernel,
    t: float,
    total_rate: Optional[float] = None,
    quadrature: Optional[FourierQuadrature] = None,
) -> float:
    """p_t(0,0); see FourierQuadrature.return_probability."""
    return (quadrature or _default_quadrature).return_probability(kernel, t, total_rate)


def green_values(
    kernel: Kernel,
    total_rate: Optional[float] = None,
    quadrature: Optional[FourierQuadrature] = None,
) -> GreenValues:
    """G and H; see FourierQuadrature.green_values."""
    return (quadrature or _default_quadrature).green_values(kernel, total_rate)
