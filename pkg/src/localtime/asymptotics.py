"""
Closed-form asymptotics of local-time moments.

rate_asymptotics predicts the exponential growth rate r(kappa) near the
critical rate from the tail p_t ~ c t^-alpha and the Green values G, H.
subexp_asymptotics gives the large-t behaviour of g(t) = E[exp(kappa L_t)]
when g does not grow exponentially: the subcritical limit, the critical
power growth and the decay for negative kappa.
"""

from enum import Enum
import math
from typing import Optional

from scipy import special

from src.exceptions import RegimeMismatch
from src.models.curves import AsymptoticRate, GrowthAsymptote, LyapunovRegime

ALPHA_TOLERANCE = 1e-12
CRITICAL_TOLERANCE = 1e-6


class SubexpRegime(str, Enum):
    """Regimes with subexponential growth of g."""

    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    NEGATIVE = "negative"


def _is(alpha: float, value: float) -> bool:
    return math.isclose(alpha, value, rel_tol=0.0, abs_tol=ALPHA_TOLERANCE)


def _finite(value: Optional[float]) -> bool:
    return value is not None and math.isfinite(value)


def classify_rate(kappa: float, kappa_cr: float, rel_tol: float = 1e-9) -> LyapunovRegime:
    """Position of kappa relative to kappa_cr with a relative boundary band."""
    if kappa_cr > 0 and abs(kappa - kappa_cr) <= rel_tol * kappa_cr:
        return LyapunovRegime.CRITICAL
    if kappa > kappa_cr:
        return LyapunovRegime.SUPERCRITICAL
    return LyapunovRegime.SUBCRITICAL


def rate_asymptotics(
    c: float,
    alpha: float,
    kappa: float,
    green: Optional[float] = None,
    green_moment: Optional[float] = None,
) -> AsymptoticRate:
    """
    Predicted r(kappa) for kappa near kappa_cr.

    Five regimes:
        alpha < 1:      (c kappa Gamma(1-alpha))^(1/(1-alpha))          kappa -> 0
        alpha = 1:      exp(-1/(c kappa)), exponent only                kappa -> 0
        1 < alpha < 2:  ((kappa-kappa_cr) G^2 (alpha-1) / (c Gamma(2-alpha)))^(1/(alpha-1))
        alpha = 2:      (G^2/c) (kappa-kappa_cr) / log(1/(kappa-kappa_cr))
        alpha > 2:      (G^2/H) (kappa-kappa_cr)

    Args:
        c: Tail prefactor.
        alpha: Tail exponent.
        kappa: Rate parameter, > 0.
        green: G (needed for alpha > 1).
        green_moment: H (needed for alpha > 2).

    Returns:
        AsymptoticRate: The prediction.

    Raises:
        RegimeMismatch: If kappa <= 0, a needed Green value is missing or
            infinite, or kappa does not exceed kappa_cr.
    """
    if kappa <= 0:
        raise RegimeMismatch(f"rate asymptotics need kappa > 0, got {kappa}")
    if c <= 0 or alpha <= 0:
        raise RegimeMismatch(f"tail needs c > 0 and alpha > 0, got c={c}, alpha={alpha}")

    if alpha < 1 and not _is(alpha, 1.0):
        value = (c * kappa * special.gamma(1.0 - alpha)) ** (1.0 / (1.0 - alpha))
        return AsymptoticRate(regime="alpha<1", value=value)
    if _is(alpha, 1.0):
        exponent = -1.0 / (c * kappa)
        return AsymptoticRate(
            regime="alpha=1", value=math.exp(exponent), log_exponent=exponent, exponent_only=True
        )

    if not _finite(green):
        raise RegimeMismatch(f"alpha={alpha} > 1 needs a finite G")
    assert green is not None
    excess = kappa - 1.0 / green
    if excess <= 0:
        raise RegimeMismatch(f"kappa={kappa} does not exceed kappa_cr={1.0 / green}")

    if alpha < 2 and not _is(alpha, 2.0):
        base = excess * green**2 * (alpha - 1.0) / (c * special.gamma(2.0 - alpha))
        return AsymptoticRate(regime="1<alpha<2", value=base ** (1.0 / (alpha - 1.0)))
    if _is(alpha, 2.0):
        if excess >= 1:
            raise RegimeMismatch(f"alpha=2 formula needs kappa - kappa_cr < 1, got {excess}")
        value = (green**2 / c) * excess / math.log(1.0 / excess)
        return AsymptoticRate(regime="alpha=2", value=value)

    if not _finite(green_moment):
        raise RegimeMismatch(f"alpha={alpha} > 2 needs a finite H")
    assert green_moment is not None
    return AsymptoticRate(regime="alpha>2", value=(green**2 / green_moment) * excess)


def subexp_asymptotics(
    c: Optional[float],
    alpha: Optional[float],
    kappa: float,
    green: Optional[float],
    green_moment: Optional[float],
    regime: SubexpRegime | str,
) -> GrowthAsymptote:
    """
    Large-t asymptote of g(t) = E[exp(kappa L_t)] without exponential growth.

    Regimes:
        subcritical (0 < kappa < 1/G):  1 / (1 - kappa G)
        critical (kappa = 1/G):
            1 < alpha < 2   t^(alpha-1) (alpha-1) / (kappa c Gamma(2-alpha) Gamma(alpha))
            alpha = 2       (t / log t) / (kappa c)
            alpha > 2       t / (kappa H)
        negative (kappa < 0):
            alpha < 1       t^(alpha-1) / (-kappa c Gamma(1-alpha) Gamma(alpha))
            alpha = 1       1 / (-kappa c log t)
            alpha > 1       1 / (1 - kappa G)

    Raises:
        RegimeMismatch: If (kappa, alpha, G, H) are inconsistent with the regime.
    """
    regime = SubexpRegime(regime)

    if regime == SubexpRegime.SUBCRITICAL:
        if kappa <= 0 or not _finite(green):
            raise RegimeMismatch("subcritical regime needs kappa > 0 and a finite G")
        assert green is not None
        if kappa * green >= 1:
            raise RegimeMismatch(f"kappa G = {kappa * green} is not below 1")
        limit = 1.0 / (1.0 - kappa * green)
        return GrowthAsymptote(regime=regime.value, prefactor=limit, formula="1/(1-kappa*G)")

    if regime == SubexpRegime.CRITICAL:
        if kappa <= 0 or not _finite(green) or c is None or alpha is None:
            raise RegimeMismatch("critical regime needs kappa > 0, a finite G and a tail")
        assert green is not None
        if abs(kappa * green - 1.0) > CRITICAL_TOLERANCE:
            raise RegimeMismatch(f"kappa G = {kappa * green} is not 1")
        if alpha <= 1:
            raise RegimeMismatch(f"alpha={alpha} <= 1 has no critical rate")
        if alpha < 2 and not _is(alpha, 2.0):
            prefactor = (alpha - 1.0) / (
                kappa * c * special.gamma(2.0 - alpha) * special.gamma(alpha)
            )
            return GrowthAsymptote(
                regime=regime.value,
                prefactor=prefactor,
                power=alpha - 1.0,
                formula="(alpha-1)/(kappa*c*Gamma(2-alpha)*Gamma(alpha)) * t^(alpha-1)",
            )
        if _is(alpha, 2.0):
            return GrowthAsymptote(
                regime=regime.value,
                prefactor=1.0 / (kappa * c),
                power=1.0,
                log_power=-1.0,
                formula="t/(kappa*c*log t)",
            )
        if not _finite(green_moment):
            raise RegimeMismatch(f"alpha={alpha} > 2 needs a finite H")
        assert green_moment is not None
        return GrowthAsymptote(
            regime=regime.value,
            prefactor=1.0 / (kappa * green_moment),
            power=1.0,
            formula="t/(kappa*H)",
        )

    if kappa >= 0:
        raise RegimeMismatch(f"negative regime needs kappa < 0, got {kappa}")
    transient = alpha is None or (alpha > 1 and not _is(alpha, 1.0))
    if transient:
        if not _finite(green):
            raise RegimeMismatch("negative regime with alpha > 1 needs a finite G")
        assert green is not None
        return GrowthAsymptote(
            regime=regime.value, prefactor=1.0 / (1.0 - kappa * green), formula="1/(1-kappa*G)"
        )
    assert alpha is not None
    if c is None:
        raise RegimeMismatch("negative regime with alpha <= 1 needs the tail prefactor c")
    if _is(alpha, 1.0):
        return GrowthAsymptote(
            regime=regime.value,
            prefactor=1.0 / (-kappa * c),
            log_power=-1.0,
            formula="1/(-kappa*c*log t)",
        )
    prefactor = 1.0 / (-kappa * c * special.gamma(1.0 - alpha) * special.gamma(alpha))
    return GrowthAsymptote(
        regime=regime.value,
        prefactor=prefactor,
        power=alpha - 1.0,
        formula="t^(alpha-1)/(-kappa*c*Gamma(1-alpha)*Gamma(alpha))",
    )
