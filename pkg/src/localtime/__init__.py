"""
Exponential moments of local times.

The local time L_t of a walk at its starting point has exponential moments
g(t) = E[exp(kappa L_t)] that solve a renewal equation driven by the return
probability f(t) = p_t(0,0). This package solves that equation, inverts the
Laplace transform of f for growth rates and collects the closed-form
asymptotics used to check both.

Example:
    >>> from src.kernels import ExponentialProfile
    >>> from src.localtime import lyapunov_rate
    >>> round(lyapunov_rate(ExponentialProfile(1.0), 3.0), 8)
    2.0

Modules:
    volterra: volterra_solve
    chain: exact_chain_moment and ChainProfile for finite chains
    lyapunov: laplace_f, lyapunov_rate, lyapunov_report
    asymptotics: rate_asymptotics, subexp_asymptotics
"""

from src.localtime.asymptotics import (
    SubexpRegime,
    classify_rate,
    rate_asymptotics,
    subexp_asymptotics,
)
from src.localtime.chain import ChainProfile, exact_chain_moment, validate_generator
from src.localtime.lyapunov import laplace_f, lyapunov_rate, lyapunov_report, rate_property_checks
from src.localtime.volterra import default_step, volterra_solve

__all__: list[str] = [
    # Solver
    "volterra_solve",
    "default_step",
    # Chains
    "exact_chain_moment",
    "validate_generator",
    "ChainProfile",
    # Rates
    "laplace_f",
    "lyapunov_rate",
    "lyapunov_report",
    "rate_property_checks",
    # Asymptotics
    "SubexpRegime",
    "classify_rate",
    "rate_asymptotics",
    "subexp_asymptotics",
]
