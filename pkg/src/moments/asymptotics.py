"""
Subexponential asymptotics of E[u(t,k)^2].

Second moments follow from the local time of the symmetrized walk through
an affine map:

    rho != 0:  E[u^2] = 1 - 1/rho + (1/rho) g_{kappa rho}(t)
    rho  = 0:  E[u^2] = 1 + kappa E[L_t]

so every non-intermittent case is a local-time asymptote pushed through
that map. The positive subcritical limit is therefore
1 - 1/rho + 1/(rho (1 - kappa rho G_bar)).
"""

import math
from typing import Optional

import structlog

from src.config.models import LyapunovSettings
from src.exceptions import RegimeMismatch
from src.kernels.fourier import FourierQuadrature
from src.kernels.profiles import KernelProfile, symmetrized_profile
from src.localtime.asymptotics import SubexpRegime, classify_rate, subexp_asymptotics
from src.localtime.lyapunov import lyapunov_rate
from src.models.curves import GrowthAsymptote, LyapunovRegime
from src.models.moments import ModelParams

logger = structlog.get_logger(__name__)


def _zero_correlation(
    kappa: float, c: Optional[float], alpha: Optional[float], green: float
) -> GrowthAsymptote:
    if math.isfinite(green):
        return GrowthAsymptote(
            regime="rho=0,transient", offset=1.0, prefactor=kappa * green, formula="1+kappa*G"
        )
    if c is None or alpha is None:
        raise RegimeMismatch("rho = 0 on a recurrent walk needs the tail (c, alpha)")
    if math.isclose(alpha, 1.0, abs_tol=1e-12):
        return GrowthAsymptote(
            regime="rho=0,alpha=1",
            offset=1.0,
            prefactor=kappa * c,
            log_power=1.0,
            formula="1+kappa*c*log t",
        )
    if alpha > 1:
        raise RegimeMismatch(f"alpha={alpha} > 1 with an infinite G is inconsistent")
    return GrowthAsymptote(
        regime="rho=0,alpha<1",
        offset=1.0,
        prefactor=kappa * c / (1.0 - alpha),
        power=1.0 - alpha,
        formula="1+kappa*c/(1-alpha)*t^(1-alpha)",
    )


def second_moment_asymptote(
    params: ModelParams,
    settings: Optional[LyapunovSettings] = None,
    quadrature: Optional[FourierQuadrature] = None,
    profile: Optional[KernelProfile] = None,
) -> GrowthAsymptote:
    """
    Large-t asymptote of E[u(t,k)^2] outside the intermittent regime.

    Cases:
        rho > 0, kappa rho < 1/G_bar:  1 - 1/rho + 1/(rho (1 - kappa rho G_bar))
        rho > 0, kappa rho = 1/G_bar:  (1/rho) x critical growth of g
        rho = 0:                       1 + kappa G_bar (alpha > 1),
                                       1 + kappa c log t (alpha = 1),
                                       1 + kappa c t^(1-alpha) / (1-alpha) (alpha < 1)
        rho < 0:                       1 - 1/rho (alpha <= 1),
                                       1 - 1/rho + 1/(rho (1 - rho kappa G_bar)) (alpha > 1)

    Args:
        params: Kernel, kappa and rho.
        settings: Settings for the boundary band.
        quadrature: Quadrature engine.
        profile: Precomputed symmetrized profile.

    Returns:
        GrowthAsymptote: Asymptote with evaluator.

    Raises:
        RegimeMismatch: In the intermittent regime (E[u^2] grows like
            exp(gamma_2 t)) or when the tail needed by the case is unknown.
    """
    settings = settings or LyapunovSettings()
    profile = profile or symmetrized_profile(params.kernel, quadrature)
    tail = profile.tail()
    c = tail.c if tail else None
    alpha = tail.alpha if tail else None
    green = profile.green()
    rho, kappa = params.rho, params.kappa
    rate = kappa * rho

    if rho == 0:
        return _zero_correlation(kappa, c, alpha, green)

    if rho > 0:
        regime = classify_rate(rate, profile.critical_rate, settings.boundary_rel_tol)
        if regime == LyapunovRegime.SUPERCRITICAL:
            gamma2 = lyapunov_rate(profile, rate, settings=settings)
            raise RegimeMismatch(
                f"kappa rho = {rate} exceeds 1/G_bar = {profile.critical_rate}: "
                f"second moments grow exponentially with gamma_2 = {gamma2:.6g}"
            )
        if regime == LyapunovRegime.CRITICAL:
            # Snap to the exact critical rate so the asymptote formula accepts it.
            base = subexp_asymptotics(
                c, alpha, 1.0 / green, green, profile.green_moment(), SubexpRegime.CRITICAL
            )
        else:
            base = subexp_asymptotics(
                c, alpha, rate, green, profile.green_moment(), SubexpRegime.SUBCRITICAL
            )
    else:
        moment = profile.green_moment() if math.isfinite(green) else math.inf
        base = subexp_asymptotics(c, alpha, rate, green, moment, SubexpRegime.NEGATIVE)

    asymptote = base.scaled(1.0 / rho, 1.0 - 1.0 / rho)
    logger.debug(
        "second_moment_asymptote",
        kernel=params.kernel.label(),
        kappa=kappa,
        rho=rho,
        regime=asymptote.regime,
        limit=asymptote.limit,
    )
    return asymptote
