"""Critical moment exponent of the symbiotic branching model."""

import math


def critical_moment(rho: float) -> float:
    """
    p(rho) = pi / (pi/2 + arctan(rho / sqrt(1 - rho^2))).

    Moments of order p < p(rho) stay bounded in t. arctan(rho/sqrt(1-rho^2))
    equals arcsin(rho), which extends continuously to the endpoints:
    p(1) = 1 and p(-1) = inf.

    Args:
        rho: Noise correlation in [-1, 1].

    Returns:
        float: Critical exponent, strictly decreasing in rho.

    Raises:
        ValueError: If rho lies outside [-1, 1].

    Example:
        >>> critical_moment(0.0)
        2.0
    """
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [-1, 1], got {rho}")
    denominator = math.pi / 2.0 + math.asin(rho)
    if denominator <= 0.0:
        return math.inf
    return math.pi / denominator
