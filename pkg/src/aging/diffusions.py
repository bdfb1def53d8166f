"""
Moment functions m(t) = E[f(u(t,k))] of interacting diffusions.

Two-time correlations of u only depend on m through ratios, so every class
reduces to a local-time moment up to a constant factor:

    symbiotic      m = g_{kappa rho}       (E[uv] by duality)
    anderson       m = g_{kappa}           (rho = 1)
    superrw        m = 1                   (E[u] is a martingale mean)
    bounded        m = 1, with the envelope [alpha_1, alpha_2] reported separately
    steppingstone  m = (w - w^2) g_{-kappa}

where g_k(t) = E[exp(k L_t)] for the local time of the symmetrized walk.
The renewal equation is solved up to a finite horizon; beyond it the
proven asymptote of g (or exp(gamma t) growth) takes over and the splice
point is recorded.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
import structlog

from src.config.models import AgingSettings, LyapunovSettings, VolterraSettings
from src.kernels.fourier import FourierQuadrature
from src.interfaces.return_profile import ReturnProfile
from src.kernels.profiles import symmetrized_profile
from src.localtime.asymptotics import SubexpRegime, classify_rate, subexp_asymptotics
from src.localtime.lyapunov import lyapunov_rate
from src.localtime.volterra import volterra_solve
from src.models.aging import DiffusionModel
from src.models.curves import LyapunovRegime, MomentCurve
from src.models.kernel import Kernel

logger = structlog.get_logger(__name__)

# Keeps exp(gamma T) well inside double range.
MAX_LOG_GROWTH = 500.0


@dataclass
class MomentFunction:
    """
    m(t) = prefactor * g(t), evaluated through log g.

    Attributes:
        model: Diffusion class.
        prefactor: Constant factor (w - w^2 for the stepping stone model).
        rate: Exponent k of g_k = E[exp(k L_t)], 0 when m is constant.
        curve: Solved part of g, None when m is constant.
        splice_point: Time beyond which ``extension`` replaces the curve.
        extension: log g(t) for t beyond the splice point.
        lower: Envelope lower bound (bounded class).
        upper: Envelope upper bound (bounded class).
    """

    model: DiffusionModel
    prefactor: float = 1.0
    rate: float = 0.0
    curve: Optional[MomentCurve] = None
    splice_point: Optional[float] = None
    extension: Optional[Callable[[np.ndarray], np.ndarray]] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    _spline: Optional[CubicSpline] = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.curve is not None:
            self._spline = CubicSpline(self.curve.times, np.log(self.curve.values))

    @property
    def is_constant(self) -> bool:
        """True if m does not depend on t."""
        return self.curve is None

    def log_g(self, t: np.ndarray | float) -> np.ndarray:
        """log g(t); zero for constant moment functions."""
        t = np.asarray(t, dtype=np.float64)
        if self.curve is None or self._spline is None:
            return np.zeros_like(t)
        horizon = self.curve.horizon
        inside = t <= horizon
        out = np.empty_like(t)
        out[inside] = self._spline(t[inside])
        if np.any(~inside):
            if self.extension is None:
                raise ValueError(f"t={float(t.max())} beyond solved horizon {horizon}")
            out[~inside] = self.extension(t[~inside])
        return out

    def values(self, t: np.ndarray | float) -> np.ndarray:
        """m(t) = prefactor * g(t)."""
        return self.prefactor * np.exp(self.log_g(t))

    def __call__(self, t: float) -> float:
        return float(self.values(np.array([t]))[0])

    def scaled(self, factor: float) -> "MomentFunction":
        """Same function multiplied by a positive constant."""
        if factor <= 0:
            raise ValueError(f"factor must be > 0, got {factor}")
        return MomentFunction(
            model=self.model,
            prefactor=self.prefactor * factor,
            rate=self.rate,
            curve=self.curve,
            splice_point=self.splice_point,
            extension=self.extension,
            lower=self.lower,
            upper=self.upper,
        )


def _exponent(model: DiffusionModel, kappa: float, rho: float) -> float:
    if model == DiffusionModel.ANDERSON:
        return kappa
    if model == DiffusionModel.STEPPING_STONE:
        return -kappa
    if model == DiffusionModel.SYMBIOTIC:
        return kappa * rho
    return 0.0


def _extension(
    profile: ReturnProfile,
    rate: float,
    curve: MomentCurve,
    settings: LyapunovSettings,
) -> Callable[[np.ndarray], np.ndarray]:
    """log g beyond the solved horizon: exponential growth or the subexponential asymptote."""
    tail = profile.tail()
    c = tail.c if tail else None
    alpha = tail.alpha if tail else None
    green = profile.green()
    regime = None
    if rate > 0:
        regime = classify_rate(rate, profile.critical_rate, settings.boundary_rel_tol)

    if regime == LyapunovRegime.SUPERCRITICAL:
        gamma = lyapunov_rate(profile, rate, settings=settings)
        anchor_t, anchor = curve.horizon, math.log(curve.values[-1])
        return lambda t: anchor + gamma * (t - anchor_t)

    if rate < 0:
        moment = profile.green_moment() if math.isfinite(green) else math.inf
        asymptote = subexp_asymptotics(c, alpha, rate, green, moment, SubexpRegime.NEGATIVE)
    elif regime == LyapunovRegime.CRITICAL:
        asymptote = subexp_asymptotics(
            c, alpha, 1.0 / green, green, profile.green_moment(), SubexpRegime.CRITICAL
        )
    else:
        asymptote = subexp_asymptotics(c, alpha, rate, green, None, SubexpRegime.SUBCRITICAL)

    jump = float(asymptote.evaluate(curve.horizon)) / float(curve.values[-1]) - 1.0
    logger.debug("moment_function_spliced", formula=asymptote.formula, relative_jump=jump)
    return lambda t: np.log(asymptote.evaluate(t))


def moment_function(
    model: DiffusionModel | str,
    kernel: Kernel,
    kappa: float,
    rho: float = 0.0,
    horizon: float = 1.0,
    step: Optional[float] = None,
    w: Optional[float] = None,
    lower: Optional[float] = None,
    upper: Optional[float] = None,
    aging: Optional[AgingSettings] = None,
    volterra: Optional[VolterraSettings] = None,
    lyapunov: Optional[LyapunovSettings] = None,
    quadrature: Optional[FourierQuadrature] = None,
    profile: Optional[ReturnProfile] = None,
) -> MomentFunction:
    """
    Build m(t) for a diffusion class on [0, horizon].

    The renewal equation is solved up to min(horizon, solve_horizon) and,
    when needed, continued by the proven asymptote of g.

    Args:
        model: Diffusion class.
        kernel: Base kernel (symmetrized internally).
        kappa: Branching rate.
        rho: Noise correlation (symbiotic class).
        horizon: Largest time m is needed at.
        step: Volterra step size.
        w: Initial frequency of the stepping stone model.
        lower: alpha_1 of the bounded class.
        upper: alpha_2 of the bounded class.
        aging: Aging settings (solve horizon).
        volterra: Solver settings.
        lyapunov: Root-finding settings.
        quadrature: Quadrature engine.
        profile: Return source of the symmetrized walk; overrides ``kernel``.

    Returns:
        MomentFunction: Evaluable m.

    Raises:
        ValueError: If model parameters are missing or out of range.
        RegimeMismatch: If the asymptote needed beyond the solve horizon is
            unavailable.

    Example:
        >>> from src.kernels import kernel_from_text
        >>> m = moment_function("steppingstone", kernel_from_text("laplacian:d=1"), 1.0, w=0.5)
        >>> m(0.0)
        0.25
    """
    model = DiffusionModel(model)
    aging = aging or AgingSettings()
    lyapunov = lyapunov or LyapunovSettings()

    if model == DiffusionModel.STEPPING_STONE:
        if w is None or not 0 < w < 1:
            raise ValueError(f"stepping stone model needs w in (0, 1), got {w}")
        prefactor = w - w * w
    else:
        prefactor = 1.0
    if model == DiffusionModel.BOUNDED:
        if lower is None or upper is None or not 0 < lower <= upper:
            raise ValueError(f"bounded model needs 0 < lower <= upper, got {lower}, {upper}")

    rate = _exponent(model, kappa, rho)
    if rate == 0.0:
        logger.debug("moment_function_constant", model=model.value)
        return MomentFunction(model=model, prefactor=prefactor, lower=lower, upper=upper)

    profile = profile or symmetrized_profile(kernel, quadrature)
    solve_to = min(horizon, aging.solve_horizon)
    if rate > 0:
        solve_to = min(solve_to, MAX_LOG_GROWTH / rate)
    curve = volterra_solve(profile, rate, solve_to, step, volterra)

    extension = None
    splice = None
    if horizon > curve.horizon:
        extension = _extension(profile, rate, curve, lyapunov)
        splice = curve.horizon

    function = MomentFunction(
        model=model,
        prefactor=prefactor,
        rate=rate,
        curve=curve,
        splice_point=splice,
        extension=extension,
        lower=lower,
        upper=upper,
    )
    logger.info(
        "moment_function_built",
        model=model.value,
        rate=rate,
        solved_to=curve.horizon,
        splice_point=splice,
    )
    return function
