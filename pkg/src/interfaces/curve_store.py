"""
Abstract base class for stores of sampled return curves.

A FourierQuadrature may carry a CurveStore; kernel profiles then obtain their
sampled curves through it instead of re-running the quadrature. The on-disk
implementation is src.storage.curve_cache.CurveCache.
"""

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Optional

import numpy as np

from src.models.kernel import Kernel, ReturnCurve

if TYPE_CHECKING:
    from src.kernels.fourier import FourierQuadrature


class CurveStore(ABC):
    """Source of ReturnCurves keyed by (kernel, grid, tolerance, rate)."""

    @abstractmethod
    def get_or_compute(
        self,
        kernel: Kernel,
        grid: np.ndarray,
        quadrature: Optional["FourierQuadrature"] = None,
        total_rate: Optional[float] = None,
    ) -> ReturnCurve:
        """
        Return the curve of ``kernel`` on ``grid``, computing it on a miss.

        Args:
            kernel: Walk whose p_t(0,0) is sampled.
            grid: Increasing time grid starting at 0.
            quadrature: Engine used on a miss.
            total_rate: Jump rate (default: the kernel's).

        Returns:
            ReturnCurve: Equal to return_curve(kernel, grid, quadrature, total_rate).
        """
