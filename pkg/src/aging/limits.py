"""
Closed-form aging limits.

lim cor[u(t,k), u(t+s,k)] as t -> infinity for return probabilities with
tail p_t ~ c t^-alpha:

    rho > 0:              0 for every alpha
    rho <= 0, alpha > 1:  0
    rho <= 0, alpha = 1:  (1 - a)_+            with log s / log t = a
    rho = 0,  alpha < 1:  ((1+a/2)^(1-alpha) - (a/2)^(1-alpha)) / (1+a)^((1-alpha)/2)
    rho < 0,  alpha < 1:  int_0^1 (2r+a)^-alpha (1-r)^(alpha-1) dr
                          / (2^-alpha Gamma(alpha) Gamma(1-alpha))   with s = a t
"""

import math
from typing import Optional

from scipy import integrate, special

from src.exceptions import RegimeMismatch
from src.models.aging import NoiseRegime, ScalingKind

ALPHA_TOLERANCE = 1e-12


def _negative_limit(alpha: float, a: float) -> float:
    """
    Negative-correlation limit for alpha < 1.

    r = 1 - z^(1/alpha) removes the (1-r)^(alpha-1) endpoint singularity:
    the integral becomes (1/alpha) int_0^1 (2(1 - z^(1/alpha)) + a)^-alpha dz.
    """
    if a == 0:
        return 1.0

    def integrand(z: float) -> float:
        return float((2.0 * (1.0 - z ** (1.0 / alpha)) + a) ** (-alpha))

    value, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    norm = 2.0 ** (-alpha) * special.gamma(alpha) * special.gamma(1.0 - alpha)
    return value / alpha / norm


def _zero_limit(alpha: float, a: float) -> float:
    exponent = 1.0 - alpha
    return ((1.0 + a / 2.0) ** exponent - (a / 2.0) ** exponent) / (1.0 + a) ** (exponent / 2.0)


def aging_limit(
    regime: NoiseRegime | str,
    alpha: float,
    a: float,
    scaling: Optional[ScalingKind | str] = None,
) -> float:
    """
    Limit of the two-time correlation along a lag scaling.

    Args:
        regime: Sign class of rho (positive, zero, negative).
        alpha: Tail exponent of the return probability, > 0.
        a: Scaling parameter, >= 0.
        scaling: s = a t (linear) or log s / log t = a (log). Inferred from
            alpha when omitted; only alpha > 1 and rho > 0 accept either.

    Returns:
        float: Limit in [0, 1].

    Raises:
        RegimeMismatch: If alpha <= 0, a < 0, or the scaling does not match alpha.

    Example:
        >>> aging_limit("zero", 1.0, 0.3)
        0.7
    """
    regime = NoiseRegime(regime)
    if alpha <= 0 or not math.isfinite(alpha):
        raise RegimeMismatch(f"tail exponent must be > 0, got {alpha}")
    if a < 0:
        raise RegimeMismatch(f"scaling parameter must be >= 0, got {a}")
    kind = ScalingKind(scaling) if scaling is not None else None
    critical = math.isclose(alpha, 1.0, rel_tol=0.0, abs_tol=ALPHA_TOLERANCE)

    if regime == NoiseRegime.POSITIVE or (alpha > 1 and not critical):
        return 0.0

    if critical:
        if kind not in (None, ScalingKind.LOGARITHMIC):
            raise RegimeMismatch("alpha = 1 ages on the log s / log t = a scale")
        return max(1.0 - a, 0.0)

    if kind not in (None, ScalingKind.LINEAR):
        raise RegimeMismatch(f"alpha = {alpha} < 1 ages on the s = a t scale")
    if regime == NoiseRegime.ZERO:
        return _zero_limit(alpha, a)
    return min(max(_negative_limit(alpha, a), 0.0), 1.0)
