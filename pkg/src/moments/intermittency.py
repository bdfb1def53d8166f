"""
Intermittency classification and second-moment Lyapunov exponents.

Second moments grow exponentially exactly when kappa rho exceeds the
critical rate 1/G_bar of the symmetrized walk; the growth rate is
gamma_2 = r_bar(kappa rho), the Lyapunov rate of the difference walk. For
rho <= 0 there is never intermittency.
"""

import math
from typing import Iterable, List, Optional

import numpy as np
import structlog

from src.config.models import LyapunovSettings
from src.exceptions import RegimeMismatch
from src.kernels.fourier import FourierQuadrature
from src.kernels.profiles import KernelProfile, symmetrized_profile
from src.localtime.asymptotics import classify_rate, rate_asymptotics
from src.localtime.lyapunov import lyapunov_rate, rate_property_checks
from src.models.curves import (
    AsymptoticRate,
    LyapunovPoint,
    LyapunovRegime,
    LyapunovReport,
    PropertyCheck,
)
from src.models.kernel import Kernel
from src.models.moments import IntermittencyResult, IntermittencyVerdict, ModelParams

logger = structlog.get_logger(__name__)


def classify_intermittency(
    params: ModelParams,
    settings: Optional[LyapunovSettings] = None,
    quadrature: Optional[FourierQuadrature] = None,
    profile: Optional[KernelProfile] = None,
) -> IntermittencyResult:
    """
    Decide whether E[uv] grows exponentially and return gamma_2.

    Args:
        params: Kernel, kappa and rho.
        settings: Root-finding settings (boundary band width).
        quadrature: Quadrature engine.
        profile: Precomputed symmetrized profile of ``params.kernel``.

    Returns:
        IntermittencyResult: ``boundary`` when kappa rho equals 1/G_bar
            within the relative band; gamma_2 is 0 unless intermittent.
    """
    settings = settings or LyapunovSettings()
    profile = profile or symmetrized_profile(params.kernel, quadrature)
    kappa_cr = profile.critical_rate
    rate = params.effective_rate

    gamma2 = 0.0
    if rate <= 0:
        verdict = IntermittencyVerdict.NON_INTERMITTENT
    else:
        regime = classify_rate(rate, kappa_cr, settings.boundary_rel_tol)
        if regime == LyapunovRegime.CRITICAL:
            verdict = IntermittencyVerdict.BOUNDARY
        elif regime == LyapunovRegime.SUPERCRITICAL:
            verdict = IntermittencyVerdict.INTERMITTENT
            gamma2 = lyapunov_rate(profile, rate, settings=settings)
        else:
            verdict = IntermittencyVerdict.NON_INTERMITTENT

    logger.debug(
        "intermittency_classified",
        kernel=params.kernel.label(),
        kappa=params.kappa,
        rho=params.rho,
        kappa_cr=kappa_cr,
        verdict=verdict.value,
    )
    return IntermittencyResult(
        kappa=params.kappa, rho=params.rho, kappa_cr=kappa_cr, gamma2=gamma2, verdict=verdict
    )


def _deviation(measured: float, prediction: AsymptoticRate) -> float:
    if prediction.exponent_only:
        assert prediction.log_exponent is not None
        if measured <= 0:
            return math.inf
        return abs(math.log(measured) - prediction.log_exponent) / abs(prediction.log_exponent)
    return abs(measured / prediction.value - 1.0) if prediction.value > 0 else math.inf


def gamma2_curve(
    kernel: Kernel,
    rho: float,
    kappas: Iterable[float],
    settings: Optional[LyapunovSettings] = None,
    quadrature: Optional[FourierQuadrature] = None,
) -> LyapunovReport:
    """
    gamma_2(kappa, rho) over a kappa grid with the structural checks.

    Checks:
        zero_below_critical, rate_bound (gamma_2 <= kappa rho),
        strictly_increasing, strictly_convex: as for r(kappa).
        ratio_to_bound: gamma_2 / (kappa rho) increases along the grid
            towards 1; measured is the value at the largest kappa.
        asymptotic_agreement: relative deviation from the closed-form
            prediction shrinks towards the critical end of the grid
            (kappa -> 0 for recurrent walks, kappa -> kappa_cr otherwise);
            measured is the deviation at the critical end.

    Args:
        kernel: Base kernel (symmetrized internally).
        rho: Noise correlation, > 0.
        kappas: Branching rates.
        settings: Root-finding settings.
        quadrature: Quadrature engine.

    Returns:
        LyapunovReport: kappa_cr is 1/(rho G_bar) on the kappa scale.

    Raises:
        ValueError: If rho <= 0.
    """
    if rho <= 0:
        raise ValueError(f"gamma_2 curves need rho > 0, got {rho}")
    settings = settings or LyapunovSettings()
    profile = symmetrized_profile(kernel, quadrature)
    rate_cr = profile.critical_rate
    tail = profile.tail()

    points: List[LyapunovPoint] = []
    predictions: List[Optional[AsymptoticRate]] = []
    for kappa in sorted(kappas):
        rate = kappa * rho
        regime = classify_rate(rate, rate_cr, settings.boundary_rel_tol)
        gamma2 = 0.0
        if regime == LyapunovRegime.SUPERCRITICAL:
            gamma2 = lyapunov_rate(profile, rate, settings=settings)
        prediction: Optional[AsymptoticRate] = None
        if tail is not None and regime == LyapunovRegime.SUPERCRITICAL:
            try:
                prediction = rate_asymptotics(
                    tail.c, tail.alpha, rate, profile.green(), profile.green_moment()
                )
            except RegimeMismatch:
                prediction = None
        predictions.append(prediction)
        points.append(
            LyapunovPoint(
                kappa=kappa,
                rate=gamma2,
                regime=regime,
                prediction=prediction.value if prediction else None,
            )
        )

    checks = rate_property_checks(points, scale=rho)
    above = [
        (p, pr)
        for p, pr in zip(points, predictions)
        if p.regime == LyapunovRegime.SUPERCRITICAL
    ]

    if above:
        ratios = np.array([p.rate / (p.kappa * rho) for p, _ in above])
        checks.append(
            PropertyCheck(
                name="ratio_to_bound",
                passed=bool(np.all(np.diff(ratios) >= -1e-9) and np.all(ratios <= 1.0 + 1e-9)),
                measured=float(ratios[-1]),
                expected=1.0,
                detail="gamma_2 / (kappa rho) at the largest kappa",
            )
        )

    compared = [(p, _deviation(p.rate, pr)) for p, pr in above if pr is not None]
    if compared:
        first, last = compared[0][1], compared[-1][1]
        checks.append(
            PropertyCheck(
                name="asymptotic_agreement",
                passed=first <= last if len(compared) > 1 else first < 0.1,
                measured=first,
                expected=0.0,
                detail="relative deviation from the closed form at the critical end",
            )
        )

    report = LyapunovReport(kappa_cr=rate_cr / rho, rho=rho, points=points, checks=checks)
    logger.info(
        "gamma2_curve",
        kernel=kernel.label(),
        rho=rho,
        kappa_cr=report.kappa_cr,
        points=len(points),
        passed=report.all_passed,
    )
    return report
