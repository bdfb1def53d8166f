"""
Aging of interacting diffusions.

Two-time correlations cor[u(t,k), u(t+s,k)] under homogeneous initial
conditions reduce to integrals of return probabilities against a moment
function m(t). This package builds m for each diffusion class, evaluates
the correlations, their closed-form limits and scaling sweeps.

Example:
    >>> from src.aging import aging_limit
    >>> aging_limit("zero", 1.0, 0.3)
    0.7

Modules:
    diffusions: moment_function and MomentFunction
    correlation: correlation, correlation_integrals
    limits: aging_limit
    sweep: aging_sweep
"""

from src.aging.correlation import CorrelationIntegrals, correlation, correlation_integrals
from src.aging.diffusions import MomentFunction, moment_function
from src.aging.limits import aging_limit
from src.aging.sweep import aging_sweep, default_scaling

__all__: list[str] = [
    # Moment functions
    "moment_function",
    "MomentFunction",
    # Correlations
    "correlation",
    "correlation_integrals",
    "CorrelationIntegrals",
    # Limits and sweeps
    "aging_limit",
    "aging_sweep",
    "default_scaling",
]
