"""
Two-time correlations cor[u(t,k), u(t+s,k)].

For homogeneous initial conditions and a symmetric kernel,

    cov[u(t,k), u(t+s,k)] = kappa int_0^t p_{2r+s}(k,k) m(t-r) dr

with p the base walk's return probability and m(t) = E[f(u(t,k))] the
moment function of the diffusion class. The variances are the same integral
with s = 0 at times t and t+s.

The integrals are computed by composite Gauss-Legendre quadrature on panels
that grow geometrically away from both ends of [0, T]. m enters through
log m relative to its value at the upper limit, so constant prefactors of
m cancel exactly and exponentially growing moments do not overflow.
"""

from dataclasses import dataclass
import math
from typing import Callable, Optional, Tuple

import numpy as np
import structlog

from src.config.models import AgingSettings
from src.exceptions import AsymmetricKernel, RegimeMismatch
from src.interfaces.return_profile import ReturnProfile
from src.kernels.fourier import FourierQuadrature
from src.kernels.profiles import symmetrized_profile
from src.aging.diffusions import MomentFunction, moment_function
from src.models.aging import AgingQuery, EvaluationPath

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class CorrelationIntegrals:
    """
    The three covariance integrals of one query and their ratio.

    Attributes:
        numerator: cov[u(t), u(t+s)].
        variance_t: var[u(t)].
        variance_ts: var[u(t+s)].
        value: numerator / sqrt(variance_t * variance_ts), clipped to [0, 1].
        path: Exact or asymptotic return probabilities.
    """

    numerator: float
    variance_t: float
    variance_ts: float
    value: float
    path: EvaluationPath


def panel_breakpoints(upper: float, ratio: float) -> np.ndarray:
    """Breakpoints of [0, upper] refined geometrically towards both ends."""
    if upper <= 0:
        raise ValueError(f"upper limit must be > 0, got {upper}")
    count = int(math.floor(math.log(max(upper, 1.0)) / math.log(ratio))) + 1
    powers = ratio ** np.arange(count)
    powers = powers[powers < upper]
    points = np.concatenate([[0.0, upper], powers, upper - powers])
    points = np.unique(points[(points >= 0.0) & (points <= upper)])
    return points


def _nodes(upper: float, settings: AgingSettings) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(settings.gauss_order)
    edges = panel_breakpoints(upper, settings.panel_ratio)
    a, b = edges[:-1, None], edges[1:, None]
    half = (b - a) / 2.0
    nodes = (half * x + (a + b) / 2.0).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _kernel_function(
    profile: ReturnProfile,
    path: EvaluationPath,
) -> Callable[[np.ndarray], np.ndarray]:
    """Base-walk return probability as a function of base-walk time u."""
    if path == EvaluationPath.EXACT:
        return lambda u: profile.values(u / 2.0)
    tail = profile.tail()
    if tail is None:
        raise RegimeMismatch(f"asymptotic path needs the tail of {profile.label}")
    base_c = tail.c * 2.0**tail.alpha
    return lambda u: base_c * np.power(u + 1.0, -tail.alpha)


def _check_crossover(profile: ReturnProfile, settings: AgingSettings) -> float:
    tail = profile.tail()
    if tail is None:
        return math.nan
    u = settings.exact_crossover
    exact = float(profile.values(np.array([u / 2.0]))[0])
    approx = tail.c * 2.0**tail.alpha * (u + 1.0) ** (-tail.alpha)
    disagreement = abs(approx / exact - 1.0) if exact > 0 else math.inf
    if disagreement > settings.crossover_agreement:
        logger.warning(
            "aging_crossover_disagreement",
            source=profile.label,
            crossover=u,
            disagreement=disagreement,
        )
    return disagreement


def _integral(
    kernel: Callable[[np.ndarray], np.ndarray],
    moment: MomentFunction,
    upper: float,
    shift: float,
    reference: float,
    settings: AgingSettings,
) -> float:
    """int_0^upper K(2r + shift) m(upper - r) / exp(reference) dr, prefactor dropped."""
    r, w = _nodes(upper, settings)
    weights = np.exp(moment.log_g(upper - r) - reference)
    return float(np.sum(w * kernel(2.0 * r + shift) * weights))


def correlation_integrals(
    query: AgingQuery,
    settings: Optional[AgingSettings] = None,
    quadrature: Optional[FourierQuadrature] = None,
    moment: Optional[MomentFunction] = None,
    profile: Optional[ReturnProfile] = None,
) -> CorrelationIntegrals:
    """
    Covariance integrals and correlation of one query.

    Args:
        query: Kernel, model parameters, t and s.
        settings: Aging settings (crossover, panels).
        quadrature: Quadrature engine.
        moment: Precomputed moment function covering [0, t+s].
        profile: Return source of the symmetrized walk (p_bar_r = p_{2r}).

    Returns:
        CorrelationIntegrals: Integrals at their true scale and the ratio.

    Raises:
        AsymmetricKernel: If the kernel is not symmetric.
    """
    if not query.kernel.symmetric:
        raise AsymmetricKernel(f"aging requires a symmetric kernel, got {query.kernel.label()}")
    settings = settings or AgingSettings()
    profile = profile or symmetrized_profile(query.kernel, quadrature)
    t, s = query.t, query.s
    if moment is None:
        moment = moment_function(
            query.model,
            query.kernel,
            query.kappa,
            query.rho,
            horizon=t + s,
            w=query.w,
            lower=query.lower,
            upper=query.upper,
            aging=settings,
            profile=profile,
        )

    path = EvaluationPath.EXACT if t + s <= settings.exact_crossover else EvaluationPath.ASYMPTOTIC
    if path == EvaluationPath.ASYMPTOTIC:
        _check_crossover(profile, settings)
    kernel = _kernel_function(profile, path)

    log_t = float(moment.log_g(np.array([t]))[0])
    log_ts = float(moment.log_g(np.array([t + s]))[0])
    first = _integral(kernel, moment, t, 0.0, log_t, settings)
    numerator = first if s == 0 else _integral(kernel, moment, t, s, log_t, settings)
    second = first if s == 0 else _integral(kernel, moment, t + s, 0.0, log_ts, settings)

    if first <= 0 or second <= 0:
        value = 0.0
    else:
        value = numerator / math.sqrt(first * second) * math.exp((log_t - log_ts) / 2.0)
    value = min(max(value, 0.0), 1.0)

    scale = query.kappa * moment.prefactor
    return CorrelationIntegrals(
        numerator=scale * math.exp(log_t) * numerator,
        variance_t=scale * math.exp(log_t) * first,
        variance_ts=scale * math.exp(log_ts) * second,
        value=value,
        path=path,
    )


def correlation(
    query: AgingQuery,
    settings: Optional[AgingSettings] = None,
    quadrature: Optional[FourierQuadrature] = None,
    moment: Optional[MomentFunction] = None,
    profile: Optional[ReturnProfile] = None,
) -> float:
    """
    cor[u(t,k), u(t+s,k)] in [0, 1]; exactly 1 for s = 0.

    See correlation_integrals for arguments and errors.
    """
    result = correlation_integrals(query, settings, quadrature, moment, profile)
    logger.debug(
        "correlation",
        model=query.model.value,
        t=query.t,
        s=query.s,
        value=result.value,
        path=result.path.value,
    )
    return result.value
