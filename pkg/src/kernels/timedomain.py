"""
Time-domain Laplace integrals of return probabilities.

Computes int_0^inf t^m e^{-lambda t} p(t) dt for a vectorized p. The
integral is split at ``split``: scipy quad on [0, split], quad in the
log-time variable u = log t on [split, horizon], and for lambda = 0 the
remainder beyond the horizon from the power tail c t^-alpha.
"""

import math
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from src.exceptions import QuadratureNotConverged
from src.models.kernel import TailCoefficients

DEFAULT_SPLIT = 50.0
ZERO_RATE_HORIZON = 1e12
DECAY_CUTOFF = 60.0


def laplace_integral(
    p: Callable[[np.ndarray], np.ndarray],
    lam: float,
    moment: int = 0,
    tail: Optional[TailCoefficients] = None,
    split: float = DEFAULT_SPLIT,
    rel_tol: float = 1e-10,
) -> float:
    """
    Integrate t^moment e^{-lam t} p(t) over [0, inf).

    Args:
        p: Vectorized nonnegative function of time.
        lam: Laplace variable, >= 0.
        moment: Power of t in the integrand.
        tail: Power tail of p, required for lam = 0.
        split: End of the linear-time segment.
        rel_tol: Relative tolerance passed to scipy quad.

    Returns:
        float: The integral, inf when lam = 0 and alpha <= moment + 1.

    Raises:
        ValueError: If lam < 0, or lam = 0 without a tail.
    """
    if lam < 0:
        raise ValueError(f"Laplace variable must be >= 0, got {lam}")
    if lam == 0.0:
        if tail is None:
            raise ValueError("an integral with lam = 0 needs the power tail of p")
        if tail.alpha <= moment + 1:
            return math.inf

    def linear(t: float) -> float:
        return float(t**moment * math.exp(-lam * t) * p(np.array([t]))[0])

    def logarithmic(u: float) -> float:
        t = math.exp(u)
        return float(t ** (moment + 1) * math.exp(-lam * t) * p(np.array([t]))[0])

    head, head_err = integrate.quad(linear, 0.0, split, epsabs=0.0, epsrel=rel_tol, limit=200)

    horizon = ZERO_RATE_HORIZON if lam == 0.0 else max(split, DECAY_CUTOFF / lam)
    body, body_err = (0.0, 0.0)
    if horizon > split:
        body, body_err = integrate.quad(
            logarithmic,
            math.log(split),
            math.log(horizon),
            epsabs=0.0,
            epsrel=rel_tol,
            limit=400,
        )

    remainder = 0.0
    if lam == 0.0 and tail is not None:
        exponent = tail.alpha - moment - 1
        remainder = tail.c * horizon ** (-exponent) / exponent

    total = head + body + remainder
    error = head_err + body_err
    if total > 0 and error > 1e3 * rel_tol * total:
        raise QuadratureNotConverged(
            "time-domain Laplace integral did not converge",
            achieved_error=error / total,
            tolerance=rel_tol,
        )
    return total
