"""
Exception hierarchy for the symbiotic branching lab.

All errors raised by the numerical modules derive from SymbranchError so the
command-line front end can map them to a single exit code. Errors caused by
invalid input values additionally subclass ValueError.
"""

from typing import Optional


class SymbranchError(Exception):
    """Base exception for all lab errors."""

    pass


# =============================================================================
# KERNEL ERRORS
# =============================================================================


class KernelError(SymbranchError, ValueError):
    """Raised when a kernel description is invalid."""

    pass


class NegativeRate(KernelError):
    """Raised when a jump rate is negative."""

    pass


class EmptySupport(KernelError):
    """Raised when a kernel has no positive rate."""

    pass


class NonNormalizable(KernelError):
    """Raised when rates cannot be normalized to a finite positive total."""

    pass


class AsymmetricKernel(KernelError):
    """Raised when an operation requires a symmetric kernel."""

    pass


# =============================================================================
# NUMERICAL ERRORS
# =============================================================================


class QuadratureNotConverged(SymbranchError):
    """
    Raised when a quadrature cannot reach its tolerance within the node budget.

    Attributes:
        achieved_error: Last difference between successive refinements.
        tolerance: Requested tolerance.
        nodes: Nodes per dimension at the last level.
    """

    def __init__(
        self,
        message: str,
        achieved_error: float,
        tolerance: float,
        nodes: Optional[int] = None,
    ):
        self.achieved_error = achieved_error
        self.tolerance = tolerance
        self.nodes = nodes
        super().__init__(
            f"{message} (achieved error {achieved_error:.3e}, tolerance {tolerance:.3e})"
        )


class StepTooLarge(SymbranchError, ValueError):
    """Raised when the implicit Volterra diagonal term degenerates."""

    pass


class InvalidGenerator(SymbranchError, ValueError):
    """Raised when a Markov generator table is malformed."""

    pass


class RegimeMismatch(SymbranchError, ValueError):
    """Raised when parameters fall outside an asymptotic formula's regime."""

    pass


class UnstableStep(SymbranchError):
    """
    Raised when a simulated field explodes.

    Attributes:
        time: Simulation time at which the explosion was detected.
        magnitude: Largest absolute field value observed.
    """

    def __init__(self, message: str, time: float, magnitude: float):
        self.time = time
        self.magnitude = magnitude
        super().__init__(message)


class InvalidConfig(SymbranchError, ValueError):
    """Raised when a run or simulation configuration is invalid."""

    pass
