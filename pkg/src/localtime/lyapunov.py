"""
Laplace transforms of return probabilities and Lyapunov exponents.

The exponential growth rate of g(t) = E[exp(kappa L_t)] is
r(kappa) = f_hat^-1(1/kappa): zero when kappa G <= 1, otherwise the unique
root of f_hat(lambda) = 1/kappa. Since 0 < r(kappa) <= kappa the root is
bracketed in (0, kappa]; the lower end is pushed towards 0 until f_hat
exceeds 1/kappa and the root is polished with scipy's brentq.
"""

import math
from typing import Iterable, List, Optional

import numpy as np
from scipy import optimize
import structlog

from src.config.models import LyapunovSettings
from src.exceptions import QuadratureNotConverged, RegimeMismatch
from src.interfaces.return_profile import ReturnProfile
from src.kernels.fourier import FourierQuadrature
from src.kernels.profiles import KernelProfile, ProfileSource, as_profile
from src.localtime.asymptotics import classify_rate, rate_asymptotics
from src.models.curves import LyapunovPoint, LyapunovRegime, LyapunovReport, PropertyCheck
from src.models.kernel import Kernel

logger = structlog.get_logger(__name__)

BRACKET_SHRINK = 4.0
LINEARITY_TOLERANCE = 1e-9


def _profile(
    source: ProfileSource,
    total_rate: Optional[float],
    quadrature: Optional[FourierQuadrature],
) -> ReturnProfile:
    if isinstance(source, Kernel):
        return KernelProfile(source, quadrature, total_rate)
    return as_profile(source, quadrature)


def laplace_f(
    source: ProfileSource,
    lam: float,
    total_rate: Optional[float] = None,
    quadrature: Optional[FourierQuadrature] = None,
) -> float:
    """
    f_hat(lam) = int_0^inf e^{-lam t} f(t) dt.

    Args:
        source: Kernel or any return source.
        lam: Laplace variable, >= 0 (lam = 0 returns G, possibly inf).
        total_rate: Jump rate for kernel sources.
        quadrature: Quadrature engine for kernel sources.

    Returns:
        float: The transform.

    Example:
        >>> from src.kernels import ExponentialProfile
        >>> laplace_f(ExponentialProfile(0.0), 4.0)
        0.25
    """
    if lam < 0:
        raise ValueError(f"Laplace variable must be >= 0, got {lam}")
    return _profile(source, total_rate, quadrature).laplace(lam)


def lyapunov_rate(
    source: ProfileSource,
    kappa: float,
    total_rate: Optional[float] = None,
    settings: Optional[LyapunovSettings] = None,
    quadrature: Optional[FourierQuadrature] = None,
) -> float:
    """
    r(kappa) = f_hat^-1(1/kappa), or 0 if kappa <= kappa_cr = 1/G.

    Args:
        source: Kernel or any return source.
        kappa: Rate parameter, > 0.
        total_rate: Jump rate for kernel sources.
        settings: Root-finding settings.
        quadrature: Quadrature engine for kernel sources.

    Returns:
        float: The rate, 0 <= r <= kappa.

    Raises:
        ValueError: If kappa <= 0.
        QuadratureNotConverged: Propagated from the Laplace transform, or when
            kappa G > 1 but the root lies below settings.bracket_floor.
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    settings = settings or LyapunovSettings()
    profile = _profile(source, total_rate, quadrature)

    green = profile.green()
    if math.isfinite(green) and kappa * green <= 1.0:
        return 0.0

    target = 1.0 / kappa

    def excess(lam: float) -> float:
        return profile.laplace(lam) - target

    hi = kappa
    if excess(hi) >= 0:
        return kappa

    lo = kappa / 2.0
    while excess(lo) <= 0:
        hi = lo
        lo /= BRACKET_SHRINK
        if lo < settings.bracket_floor:
            logger.error(
                "lyapunov_rate_below_floor",
                source=profile.label,
                kappa=kappa,
                floor=settings.bracket_floor,
            )
            raise QuadratureNotConverged(
                f"r({kappa}) of {profile.label} lies below the bracket floor",
                achieved_error=lo,
                tolerance=settings.bracket_floor,
            )

    rtol = max(settings.rel_tol, 4.0 * np.finfo(float).eps)
    root = optimize.brentq(excess, lo, hi, xtol=lo * rtol, rtol=rtol)
    logger.debug("lyapunov_rate", source=profile.label, kappa=kappa, rate=root)
    return float(root)


# =============================================================================
# REPORTS
# =============================================================================


def _divided_second_differences(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    slopes = np.diff(y) / np.diff(x)
    return np.diff(slopes) / (x[2:] - x[:-2])


def rate_property_checks(points: List[LyapunovPoint], scale: float = 1.0) -> List[PropertyCheck]:
    """
    Structural checks on r(kappa) samples.

    ``scale`` multiplies kappa before comparing with the rate, so samples of
    gamma_2(kappa) = r(kappa rho) can be checked with scale = rho.
    """
    checks: List[PropertyCheck] = []
    below = [p for p in points if p.regime != LyapunovRegime.SUPERCRITICAL]
    checks.append(
        PropertyCheck(
            name="zero_below_critical",
            passed=all(p.rate == 0.0 for p in below),
            measured=max((p.rate for p in below), default=0.0),
            expected=0.0,
        )
    )

    worst = max((p.rate / (scale * p.kappa) for p in points if p.kappa > 0), default=0.0)
    checks.append(
        PropertyCheck(
            name="rate_bound",
            passed=worst <= 1.0 + 1e-9,
            measured=worst,
            expected=1.0,
            detail="max r / (scale kappa)",
        )
    )

    above = sorted(
        (p for p in points if p.regime == LyapunovRegime.SUPERCRITICAL), key=lambda p: p.kappa
    )
    if len(above) >= 2:
        rates = np.array([p.rate for p in above])
        checks.append(
            PropertyCheck(
                name="strictly_increasing",
                passed=bool(np.all(np.diff(rates) > 0)),
                measured=float(np.min(np.diff(rates))),
            )
        )
    if len(above) >= 3:
        kappas = np.array([p.kappa for p in above])
        rates = np.array([p.rate for p in above])
        second = _divided_second_differences(kappas, rates)
        bound = LINEARITY_TOLERANCE * max(1.0, float(np.abs(rates).max()))
        linear = bool(np.all(np.abs(second) <= bound))
        checks.append(
            PropertyCheck(
                name="strictly_convex",
                passed=bool(np.all(second > 0)) and not linear,
                measured=float(second.min()),
                boundary_case=linear,
                detail="linear rate: convexity holds only weakly" if linear else "",
            )
        )
    return checks


def lyapunov_report(
    source: ProfileSource,
    kappas: Iterable[float],
    total_rate: Optional[float] = None,
    settings: Optional[LyapunovSettings] = None,
    quadrature: Optional[FourierQuadrature] = None,
) -> LyapunovReport:
    """
    r(kappa) over a grid with regimes, predictions and property checks.

    Args:
        source: Kernel or any return source.
        kappas: Positive rate parameters.
        total_rate: Jump rate for kernel sources.
        settings: Root-finding settings.
        quadrature: Quadrature engine for kernel sources.

    Returns:
        LyapunovReport: kappa_cr, one point per kappa and the checks.
    """
    settings = settings or LyapunovSettings()
    profile = _profile(source, total_rate, quadrature)
    kappa_cr = profile.critical_rate
    tail = profile.tail()

    points: List[LyapunovPoint] = []
    for kappa in kappas:
        regime = classify_rate(kappa, kappa_cr, settings.boundary_rel_tol)
        rate = 0.0
        if regime == LyapunovRegime.SUPERCRITICAL:
            rate = lyapunov_rate(profile, kappa, settings=settings)
        prediction = None
        if tail is not None and regime == LyapunovRegime.SUPERCRITICAL:
            try:
                prediction = rate_asymptotics(
                    tail.c, tail.alpha, kappa, profile.green(), profile.green_moment()
                ).value
            except RegimeMismatch:
                prediction = None
        points.append(LyapunovPoint(kappa=kappa, rate=rate, regime=regime, prediction=prediction))

    report = LyapunovReport(kappa_cr=kappa_cr, points=points, checks=rate_property_checks(points))
    logger.info(
        "lyapunov_report",
        source=profile.label,
        kappa_cr=kappa_cr,
        points=len(points),
        passed=report.all_passed,
    )
    return report
