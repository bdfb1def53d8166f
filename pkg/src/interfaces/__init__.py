"""
Abstract interfaces for the symbiotic branching lab.

The key interface is ReturnProfile: the contract for anything that supplies
a return probability f(t) = p_t(i,i) together with its Laplace transform,
its Green values and its tail. The renewal solver, the Lyapunov inversion and
the aging integrals depend only on this interface.

Example:
    >>> from src.interfaces import ReturnProfile
    >>> from src.kernels import ExponentialProfile
    >>> isinstance(ExponentialProfile(1.0), ReturnProfile)
    True

Modules:
    return_profile: ReturnProfile ABC for return-probability sources
    curve_store: CurveStore ABC for cached sampled curves
"""

from src.interfaces.curve_store import CurveStore
from src.interfaces.return_profile import ReturnProfile

__all__: list[str] = [
    "CurveStore",
    "ReturnProfile",
]
