"""
Abstract base class for return-probability sources.

Every analysis built on the renewal equation g(t) = 1 + kappa int f(r) g(t-r) dr
needs the same handful of facts about f(t) = p_t(i,i): its values on a grid,
its Laplace transform, its integrals G and H and, where known, its power
tail. ReturnProfile is that contract. Kernel-backed walks, the exponential
and single-state test sources, finite Markov chains and sampled curves all
implement it, so the solver, the Lyapunov inversion and the aging integrals
never care where f comes from.

Example:
    >>> class UnitProfile(ReturnProfile):
    ...     @property
    ...     def label(self) -> str:
    ...         return "unit"
    ...
    ...     def values(self, t: np.ndarray) -> np.ndarray:
    ...         return np.ones_like(t, dtype=float)
    ...     # ... implement laplace, green and green_moment
"""

from abc import ABC, abstractmethod
import math
from typing import Optional

import numpy as np

from src.models.kernel import TailCoefficients


class ReturnProfile(ABC):
    """
    Abstract source of a return probability f(t) = p_t(i,i).

    Implementations must guarantee f(0) = 1, 0 <= f <= 1 and f nonincreasing
    in t. Values are evaluated vectorized.

    Attributes:
        label: Short identifier used in logs, curve provenance and cache keys.
    """

    @property
    @abstractmethod
    def label(self) -> str:
        """
        Return a short identifier of the source.

        Returns:
            str: e.g. ``laplacian:d=3,sym=1`` or ``exp:b=1.0``.
        """
        pass

    @abstractmethod
    def values(self, t: np.ndarray) -> np.ndarray:
        """
        Evaluate f on an array of nonnegative times.

        Args:
            t: Times, any shape.

        Returns:
            np.ndarray: f(t) with the shape of ``t``.
        """
        pass

    @abstractmethod
    def laplace(self, lam: float) -> float:
        """
        Laplace transform f_hat(lam) = int_0^inf e^{-lam t} f(t) dt.

        Args:
            lam: Laplace variable, >= 0. lam = 0 returns G.

        Returns:
            float: f_hat(lam), possibly inf at lam = 0.
        """
        pass

    @abstractmethod
    def green(self) -> float:
        """
        Return G = int_0^inf f(t) dt (inf if the source is recurrent).
        """
        pass

    @abstractmethod
    def green_moment(self) -> float:
        """
        Return H = int_0^inf t f(t) dt (inf unless the tail decays faster than t^-2).
        """
        pass

    def tail(self) -> Optional[TailCoefficients]:
        """Power tail f(t) ~ c t^-alpha, None if f does not decay like a power."""
        return None

    @property
    def critical_rate(self) -> float:
        """kappa_cr = 1/G, 0 for recurrent sources."""
        green = self.green()
        return 0.0 if math.isinf(green) else 1.0 / green

    def __call__(self, t: np.ndarray | float) -> np.ndarray | float:
        """Evaluate f; scalars in, scalars out."""
        if np.ndim(t) == 0:
            return float(self.values(np.array([float(t)]))[0])
        return self.values(np.asarray(t, dtype=np.float64))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label!r})"
