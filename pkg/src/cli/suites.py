"""
Cross-oracle validation suites for ``symbranch validate``.

Every check compares one computation against an independent reference
(closed form, matrix exponential, known constant, or a second estimator)
and yields a PropertyCheck. The quick suite runs in seconds; the full
suite adds long-horizon solves and small Monte Carlo runs.
"""

import math
from typing import Callable, List, Literal

import numpy as np
import structlog

from src.aging.correlation import correlation
from src.aging.diffusions import MomentFunction
from src.aging.limits import aging_limit
from src.config.models import LabSettings
from src.kernels.builder import kernel_from_text, symmetrize
from src.kernels.fourier import FourierQuadrature
from src.kernels.profiles import ExponentialProfile
from src.localtime.chain import ChainProfile, exact_chain_moment
from src.localtime.lyapunov import lyapunov_rate
from src.localtime.volterra import volterra_solve
from src.models.aging import AgingQuery, DiffusionModel, ScalingKind
from src.models.curves import PropertyCheck
from src.models.moments import ModelParams
from src.models.simulation import Observable, SimConfig, StartType
from src.moments.critical import critical_moment
from src.moments.intermittency import classify_intermittency
from src.montecarlo.dual import simulate_coalescing_dual, simulate_dual_pair
from src.montecarlo.lattice import simulate_lattice
from src.montecarlo.seeding import derive_replica_seed

logger = structlog.get_logger(__name__)

Check = Callable[[LabSettings, FourierQuadrature], PropertyCheck]

CHAIN_GENERATOR = [[-2.0, 1.0, 1.0], [1.0, -3.0, 2.0], [0.5, 0.5, -1.0]]
WATSON_INTEGRAL = 1.516386059
CRITICAL_RATE_D3 = 1.3189


def _relative(measured: float, expected: float) -> float:
    return abs(measured - expected) / max(abs(expected), 1e-300)


def _within(name: str, measured: float, expected: float, tol: float, detail: str) -> PropertyCheck:
    return PropertyCheck(
        name=name,
        passed=_relative(measured, expected) <= tol,
        measured=measured,
        expected=expected,
        detail=f"{detail} (rel tol {tol:g})",
    )


# =============================================================================
# QUICK CHECKS
# =============================================================================


def check_constant_return(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """f = 1: g(t) = e^{kappa t}."""
    curve = volterra_solve(ExponentialProfile(0.0), 1.0, 1.0, settings=settings.volterra)
    return _within("volterra_constant_return", curve.at(1.0), math.e, 1e-8, "g(1) = e")


def check_exponential_return(
    settings: LabSettings, quadrature: FourierQuadrature
) -> PropertyCheck:
    """f = e^{-t}, kappa = 2: g(t) = 2e^t - 1."""
    curve = volterra_solve(ExponentialProfile(1.0), 2.0, 1.0, settings=settings.volterra)
    return _within("volterra_exponential_return", curve.at(1.0), 2 * math.e - 1, 1e-8, "2e - 1")


def check_chain_oracle(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """Renewal solution against the matrix exponential of Q + kappa e_0 e_0^T."""
    kappa, horizon = 0.8, 3.0
    curve = volterra_solve(
        ChainProfile(CHAIN_GENERATOR, 0), kappa, horizon, settings=settings.volterra
    )
    exact = exact_chain_moment(CHAIN_GENERATOR, 0, kappa, horizon)
    return _within("chain_oracle", curve.at(horizon), exact, 1e-6, "3-state chain, kappa=0.8")


def check_single_state_rate(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """f = 1: r(kappa) = kappa."""
    rate = lyapunov_rate(ExponentialProfile(0.0), 1.7, settings=settings.lyapunov)
    return _within("lyapunov_single_state", rate, 1.7, 1e-10, "r(1.7) = 1.7")


def check_exponential_rate(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """f = e^{-t}: r(kappa) = kappa - 1."""
    rate = lyapunov_rate(ExponentialProfile(1.0), 3.0, settings=settings.lyapunov)
    return _within("lyapunov_exponential", rate, 2.0, 1e-8, "r(3) = 2")


def check_symmetrized_return(
    settings: LabSettings, quadrature: FourierQuadrature
) -> PropertyCheck:
    """p_bar_t = p_{2t} for a symmetric kernel."""
    kernel = kernel_from_text("laplacian:d=1")
    measured = quadrature.return_probability(symmetrize(kernel), 1.0)
    expected = quadrature.return_probability(kernel, 2.0)
    return _within("symmetrized_return", measured, expected, 1e-10, "d=1 at t=1")


def check_watson(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """G of the symmetrized d=3 walk is half of Watson's integral."""
    green = quadrature.green_values(symmetrize(kernel_from_text("laplacian:d=3"))).green
    return _within("green_d3", green, WATSON_INTEGRAL / 2.0, 1e-3, "W/2")


def check_critical_moment(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """p(0) = 2 exactly."""
    value = critical_moment(0.0)
    return PropertyCheck(
        name="critical_moment_rho0", passed=value == 2.0, measured=value, expected=2.0
    )


def check_aging_log_limit(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """alpha = 1 gives (1 - a)_+."""
    value = aging_limit("zero", 1.0, 0.3, ScalingKind.LOGARITHMIC)
    return _within("aging_limit_alpha1", value, 0.7, 1e-12, "a = 0.3")


def check_aging_linear_limit(
    settings: LabSettings, quadrature: FourierQuadrature
) -> PropertyCheck:
    """alpha = 1/2, a = 1: (1.5^0.5 - 0.5^0.5) / 2^0.25."""
    value = aging_limit("zero", 0.5, 1.0, ScalingKind.LINEAR)
    expected = (1.5**0.5 - 0.5**0.5) / 2**0.25
    return _within("aging_limit_alpha_half", value, expected, 1e-12, "a = 1")


def check_single_state_correlation(
    settings: LabSettings, quadrature: FourierQuadrature
) -> PropertyCheck:
    """f = 1 with constant m: cor = sqrt(t / (t + s))."""
    query = AgingQuery(
        kernel=kernel_from_text("laplacian:d=1"),
        model=DiffusionModel.SUPER_RW,
        t=3.0,
        s=1.0,
    )
    value = correlation(
        query,
        settings.aging,
        moment=MomentFunction(model=DiffusionModel.SUPER_RW),
        profile=ExponentialProfile(0.0),
    )
    return _within("aging_single_state", value, math.sqrt(0.75), 1e-8, "t=3, s=1")


def check_seed_derivation(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """Replica seeds are deterministic and distinct."""
    seeds = [derive_replica_seed(7, i) for i in range(10_000)]
    again = [derive_replica_seed(7, i) for i in range(10_000)]
    distinct = len(set(seeds))
    return PropertyCheck(
        name="replica_seeds",
        passed=seeds == again and distinct == len(seeds),
        measured=float(distinct),
        expected=float(len(seeds)),
        detail="10000 replicas of master seed 7",
    )


def check_dual_pair_rho0(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """rho = 0, different starts: the weight is identically 1."""
    result = simulate_dual_pair(
        kernel_from_text("laplacian:d=1"),
        kappa=1.0,
        rho=0.0,
        t=2.0,
        start=StartType.DIFFERENT,
        replicas=200,
        seed=3,
        settings=settings.montecarlo,
    )
    estimate = result.estimates[0]
    return PropertyCheck(
        name="dual_pair_rho0",
        passed=estimate.estimate == 1.0 and estimate.stderr == 0.0,
        measured=estimate.estimate,
        expected=1.0,
        detail=f"stderr {estimate.stderr:g}",
    )


def check_coalescing_at_zero(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """E[u(0)^2] = w^2."""
    result = simulate_coalescing_dual(
        kernel_from_text("laplacian:d=1"), 1.0, 0.3, 0.0, 50, 5, settings.montecarlo
    )
    return _within("coalescing_t0", result.estimates[0].estimate, 0.09, 1e-12, "w = 0.3")


QUICK_CHECKS: List[Check] = [
    check_constant_return,
    check_exponential_return,
    check_chain_oracle,
    check_single_state_rate,
    check_exponential_rate,
    check_symmetrized_return,
    check_watson,
    check_critical_moment,
    check_aging_log_limit,
    check_aging_linear_limit,
    check_single_state_correlation,
    check_seed_derivation,
    check_dual_pair_rho0,
    check_coalescing_at_zero,
]


# =============================================================================
# FULL CHECKS
# =============================================================================


def check_threshold_d3(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """kappa_cr of E[uv] in d=3 with rho=1."""
    params = ModelParams(kernel=kernel_from_text("laplacian:d=3"), kappa=2.0, rho=1.0)
    result = classify_intermittency(params, settings.lyapunov, quadrature)
    return _within("threshold_d3", result.kappa_cr, CRITICAL_RATE_D3, 2e-3, "1/G_bar")


def check_subcritical_limit(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """d=3, kappa=0.5: g(t) approaches 1/(1 - kappa G_bar)."""
    kernel = symmetrize(kernel_from_text("laplacian:d=3"))
    green = quadrature.green_values(kernel).green
    curve = volterra_solve(kernel, 0.5, 200.0, settings=settings.volterra, quadrature=quadrature)
    return _within("subcritical_limit_d3", curve.at(200.0), 1 / (1 - 0.5 * green), 2e-2, "t=200")


def check_negative_decay(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """d=1 symmetrized, kappa=-1: g(t) sqrt(t) tends to 2/sqrt(pi)."""
    kernel = symmetrize(kernel_from_text("laplacian:d=1"))
    curve = volterra_solve(kernel, -1.0, 1000.0, 0.05, settings.volterra, quadrature)
    measured = curve.at(1000.0) * math.sqrt(1000.0)
    return _within("negative_decay_d1", measured, 2 / math.sqrt(math.pi), 3e-2, "t=1000")


def check_log_aging(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """d=2, rho=0: cor at s = t^a - t approaches 1 - a."""
    query = AgingQuery(
        kernel=kernel_from_text("laplacian:d=2"),
        model=DiffusionModel.SUPER_RW,
        t=1e8,
        s=ScalingKind.LOGARITHMIC.lag(1e8, 0.5),
    )
    value = correlation(query, settings.aging, quadrature)
    return PropertyCheck(
        name="aging_log_d2",
        passed=abs(value - 0.5) <= 0.1,
        measured=value,
        expected=0.5,
        detail="a = 0.5, t = 1e8 (abs tol 0.1)",
    )


def check_lattice_martingale(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """rho = 0: E[uv] stays at 1 within three standard errors."""
    config = SimConfig(
        kernel=kernel_from_text("laplacian:d=1"),
        torus_size=16,
        dt=1e-2,
        horizon=0.5,
        kappa=1.0,
        rho=0.0,
        replicas=200,
        seed=11,
    )
    estimate = simulate_lattice(config, [Observable.MIXED_UV], settings.montecarlo).estimates[0]
    bias = 5 * config.dt * config.horizon * 2 * abs(estimate.estimate)
    return PropertyCheck(
        name="lattice_mixed_rho0",
        passed=estimate.agrees_with(1.0, 3.0, bias),
        measured=estimate.estimate,
        expected=1.0,
        detail=f"stderr {estimate.stderr:g}",
    )


def check_lattice_pathwise(settings: LabSettings, quadrature: FourierQuadrature) -> PropertyCheck:
    """rho = 1 from equal data: u = v pathwise, so E[u^2] = E[uv]."""
    config = SimConfig(
        kernel=kernel_from_text("laplacian:d=1"),
        torus_size=8,
        dt=1e-2,
        horizon=0.2,
        kappa=1.0,
        rho=1.0,
        replicas=20,
        seed=2,
    )
    result = simulate_lattice(
        config, [Observable.MIXED_UV, Observable.SECOND_U], settings.montecarlo
    )
    mixed = result.get(Observable.MIXED_UV).estimate
    second = result.get(Observable.SECOND_U).estimate
    return PropertyCheck(
        name="lattice_rho1_pathwise",
        passed=math.isclose(mixed, second, rel_tol=1e-12),
        measured=second,
        expected=mixed,
    )


FULL_CHECKS: List[Check] = QUICK_CHECKS + [
    check_threshold_d3,
    check_subcritical_limit,
    check_negative_decay,
    check_log_aging,
    check_lattice_martingale,
    check_lattice_pathwise,
]


def run_suite(
    suite: Literal["quick", "full"],
    settings: LabSettings | None = None,
    quadrature: FourierQuadrature | None = None,
) -> List[PropertyCheck]:
    """
    Run a suite; a check that raises is reported as failed.

    Args:
        suite: ``quick`` or ``full``.
        settings: Numerical settings (defaults when None).
        quadrature: Shared engine (built from the settings when None).

    Returns:
        One PropertyCheck per check, in suite order.
    """
    settings = settings or LabSettings()
    quadrature = quadrature or FourierQuadrature(settings.quadrature)
    checks = QUICK_CHECKS if suite == "quick" else FULL_CHECKS
    results: List[PropertyCheck] = []
    for check in checks:
        try:
            outcome = check(settings, quadrature)
        except Exception as e:
            name = check.__name__.removeprefix("check_")
            logger.error("validation_check_error", check=name, error=str(e))
            outcome = PropertyCheck(name=name, passed=False, detail=f"error: {e}")
        if not np.isfinite(outcome.measured if outcome.measured is not None else 0.0):
            outcome = outcome.model_copy(update={"passed": False})
        results.append(outcome)
        logger.info("validation_check", check=outcome.name, passed=outcome.passed)
    logger.info(
        "validation_complete",
        suite=suite,
        passed=sum(r.passed for r in results),
        total=len(results),
    )
    return results
