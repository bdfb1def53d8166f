"""
Second moments of the symbiotic branching model.

Duality turns E[uv] and E[u^2] into exponential moments of the collision
local time of two walks, i.e. the local time at 0 of the symmetrized walk.
This package maps local-time results onto second moments, classifies
intermittency, samples gamma_2 and evaluates the critical moment exponent.

Example:
    >>> from src.kernels import kernel_from_text
    >>> from src.models import ModelParams
    >>> from src.moments import classify_intermittency
    >>> params = ModelParams(kernel=kernel_from_text("laplacian:d=1"), kappa=1.0, rho=-0.5)
    >>> classify_intermittency(params).verdict.value
    'non_intermittent'

Modules:
    duality: second_moments, expected_local_time
    intermittency: classify_intermittency, gamma2_curve
    asymptotics: second_moment_asymptote
    critical: critical_moment
"""

from src.moments.asymptotics import second_moment_asymptote
from src.moments.critical import critical_moment
from src.moments.duality import expected_local_time, second_moments
from src.moments.intermittency import classify_intermittency, gamma2_curve

__all__: list[str] = [
    "second_moments",
    "expected_local_time",
    "classify_intermittency",
    "gamma2_curve",
    "second_moment_asymptote",
    "critical_moment",
]
