"""
ReturnProfile implementations.

Profiles:
    KernelProfile: p_t(0,0) of a random walk (exact for the Laplacian,
        interpolated Fourier curve otherwise)
    ExponentialProfile: f(t) = e^{-bt}; b = 0 is the single-state chain
    CurveProfile: A sampled ReturnCurve with its power tail
    FunctionProfile: Any vectorized callable

ChainProfile (finite Markov chains) lives in src.localtime.chain next to the
matrix-exponential oracle.
"""

import math
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from src.interfaces.return_profile import ReturnProfile
from src.kernels.builder import symmetrize
from src.kernels.curves import default_grid, kernel_tail, return_curve
from src.kernels.fourier import FourierQuadrature, is_separable, laplacian_return
from src.kernels.timedomain import laplace_integral
from src.models.kernel import GreenValues, Kernel, ReturnCurve, TailCoefficients

DEFAULT_TAIL_HORIZON = 1e3


class KernelProfile(ReturnProfile):
    """
    Return probability of a kernel's walk.

    Laplacian kernels are evaluated exactly at every time. Other kernels are
    sampled once on a grid covering the largest requested time and
    interpolated with a monotone cubic (PCHIP), which keeps the Fourier cost
    independent of the Volterra step.

    Attributes:
        kernel: The walk's kernel.
        total_rate: Jump rate of the walk.
        quadrature: Shared quadrature engine.
    """

    def __init__(
        self,
        kernel: Kernel,
        quadrature: Optional[FourierQuadrature] = None,
        total_rate: Optional[float] = None,
        tail_horizon: float = DEFAULT_TAIL_HORIZON,
    ):
        self.kernel = kernel
        self.quadrature = quadrature or FourierQuadrature()
        self.total_rate = kernel.total_rate if total_rate is None else total_rate
        self.tail_horizon = tail_horizon
        self._curve: Optional[ReturnCurve] = None
        self._interpolant: Optional[PchipInterpolator] = None
        self._green: Optional[GreenValues] = None

    @property
    def label(self) -> str:
        return self.kernel.label()

    def curve(self, horizon: float) -> ReturnCurve:
        """
        Sampled curve covering [0, horizon], rebuilt only if it is too short.

        Read through the quadrature's curve store when it has one.
        """
        if self._curve is None or self._curve.times[-1] < horizon:
            grid = default_grid(horizon)
            store = self.quadrature.curves
            if store is None:
                self._curve = return_curve(self.kernel, grid, self.quadrature, self.total_rate)
            else:
                self._curve = store.get_or_compute(
                    self.kernel, grid, self.quadrature, self.total_rate
                )
            self._interpolant = PchipInterpolator(self._curve.times, self._curve.values)
        return self._curve

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if is_separable(self.kernel):
            return laplacian_return(t, self.total_rate, self.kernel.dimension)
        if t.size == 0:
            return np.zeros_like(t)
        self.curve(float(t.max()))
        assert self._interpolant is not None
        return np.clip(self._interpolant(t), 0.0, 1.0)

    def laplace(self, lam: float) -> float:
        return self.quadrature.laplace(self.kernel, lam, self.total_rate)

    def green_values(self) -> GreenValues:
        """G and H of the walk, computed once."""
        if self._green is None:
            self._green = self.quadrature.green_values(self.kernel, self.total_rate)
        return self._green

    def green(self) -> float:
        return self.green_values().green

    def green_moment(self) -> float:
        return self.green_values().green_moment

    def tail(self) -> Optional[TailCoefficients]:
        if is_separable(self.kernel):
            return kernel_tail(self.kernel, np.zeros(2), np.ones(2), self.total_rate)
        curve = self.curve(max(self.tail_horizon, self._curve.times[-1] if self._curve else 0.0))
        return curve.tail


class ExponentialProfile(ReturnProfile):
    """
    f(t) = e^{-bt}.

    b = 0 is the single-state chain (f = 1, local time L_t = t); b > 0 is
    the return probability of a two-state chain started in a state it leaves
    at rate b and never re-enters.
    """

    def __init__(self, b: float = 0.0):
        if b < 0:
            raise ValueError(f"decay rate must be >= 0, got {b}")
        self.b = float(b)

    @property
    def label(self) -> str:
        return f"exp:b={self.b!r}"

    def values(self, t: np.ndarray) -> np.ndarray:
        return np.exp(-self.b * np.asarray(t, dtype=np.float64))

    def laplace(self, lam: float) -> float:
        if lam < 0:
            raise ValueError(f"Laplace variable must be >= 0, got {lam}")
        total = lam + self.b
        return math.inf if total == 0 else 1.0 / total

    def green(self) -> float:
        return math.inf if self.b == 0 else 1.0 / self.b

    def green_moment(self) -> float:
        return math.inf if self.b == 0 else 1.0 / self.b**2


class CurveProfile(ReturnProfile):
    """
    Sampled ReturnCurve interpolated by PCHIP and extended by its tail.

    Raises:
        ValueError: On evaluation beyond the grid, or on Laplace/Green
            queries that need the tail, when the curve has none.
    """

    def __init__(self, curve: ReturnCurve, rel_tol: float = 1e-10):
        self.curve = curve
        self.rel_tol = rel_tol
        self._interpolant = PchipInterpolator(curve.times, curve.values)

    @property
    def label(self) -> str:
        return f"curve:{self.curve.kernel_label}"

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        horizon = float(self.curve.times[-1])
        inside = t <= horizon
        if np.all(inside):
            return np.clip(self._interpolant(t), 0.0, 1.0)
        tail = self.curve.tail
        if tail is None:
            raise ValueError(f"t={float(t.max())} beyond curve horizon {horizon} and no tail")
        out = np.empty_like(t)
        out[inside] = np.clip(self._interpolant(t[inside]), 0.0, 1.0)
        out[~inside] = np.minimum(tail.evaluate(t[~inside]), float(self.curve.values[-1]))
        return out

    def laplace(self, lam: float) -> float:
        tail = self.curve.tail
        if tail is None and lam == 0:
            raise ValueError("Green values of a sampled curve need its tail")
        split = min(50.0, float(self.curve.times[-1]))
        return laplace_integral(self.values, lam, 0, tail, split=split, rel_tol=self.rel_tol)

    def green(self) -> float:
        return self.laplace(0.0)

    def green_moment(self) -> float:
        if self.curve.tail is None:
            raise ValueError("Green values of a sampled curve need its tail")
        split = min(50.0, float(self.curve.times[-1]))
        return laplace_integral(
            self.values, 0.0, 1, self.curve.tail, split=split, rel_tol=self.rel_tol
        )

    def tail(self) -> Optional[TailCoefficients]:
        return self.curve.tail


class FunctionProfile(ReturnProfile):
    """
    Vectorized callable f with an optional known tail.

    Example:
        >>> f = FunctionProfile(lambda t: (1 + np.exp(-2 * t)) / 2, "two-state")
        >>> round(f(0.0), 12)
        1.0
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        label: str = "function",
        tail: Optional[TailCoefficients] = None,
        rel_tol: float = 1e-10,
    ):
        self.func = func
        self._label = label
        self._tail = tail
        self.rel_tol = rel_tol

    @property
    def label(self) -> str:
        return self._label

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return np.broadcast_to(np.asarray(self.func(t), dtype=np.float64), t.shape).copy()

    def laplace(self, lam: float) -> float:
        if lam == 0 and self._tail is None:
            raise ValueError(f"Green value of '{self._label}' needs a tail")
        return laplace_integral(self.values, lam, 0, self._tail, rel_tol=self.rel_tol)

    def green(self) -> float:
        return self.laplace(0.0)

    def green_moment(self) -> float:
        if self._tail is None:
            raise ValueError(f"Green values of '{self._label}' need a tail")
        return laplace_integral(self.values, 0.0, 1, self._tail, rel_tol=self.rel_tol)

    def tail(self) -> Optional[TailCoefficients]:
        return self._tail


ProfileSource = ReturnProfile | Kernel | ReturnCurve | Callable[[np.ndarray], np.ndarray]


def as_profile(
    source: ProfileSource, quadrature: Optional[FourierQuadrature] = None
) -> ReturnProfile:
    """
    Wrap any supported return source into a ReturnProfile.

    Args:
        source: Profile, Kernel, ReturnCurve or vectorized callable.
        quadrature: Engine used for kernel sources.

    Returns:
        ReturnProfile: ``source`` itself if it already is one.

    Raises:
        TypeError: If the source type is not supported.
    """
    if isinstance(source, ReturnProfile):
        return source
    if isinstance(source, Kernel):
        return KernelProfile(source, quadrature)
    if isinstance(source, ReturnCurve):
        return CurveProfile(source)
    if callable(source):
        return FunctionProfile(source, getattr(source, "__name__", "function"))
    raise TypeError(f"unsupported return source: {type(source).__name__}")


def symmetrized_profile(
    kernel: Kernel, quadrature: Optional[FourierQuadrature] = None
) -> KernelProfile:
    """
    Profile of p_bar_t(0,0), the return probability of the difference walk.

    Already symmetrized kernels are used as they are.
    """
    target = kernel if kernel.symmetrized else symmetrize(kernel)
    return KernelProfile(target, quadrature)
