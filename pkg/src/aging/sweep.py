"""
Aging sweeps: numeric correlations against their limits on an (a, t) grid.
"""

from concurrent.futures import ThreadPoolExecutor
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from src.config.models import AgingSettings, LyapunovSettings, VolterraSettings
from src.exceptions import AsymmetricKernel, RegimeMismatch
from src.kernels.fourier import FourierQuadrature
from src.kernels.profiles import symmetrized_profile
from src.aging.correlation import correlation_integrals
from src.aging.diffusions import moment_function
from src.aging.limits import ALPHA_TOLERANCE, aging_limit
from src.models.aging import (
    AgingQuery,
    AgingReport,
    AgingRow,
    DiffusionModel,
    NoiseRegime,
    ScalingKind,
)
from src.models.kernel import Kernel

logger = structlog.get_logger(__name__)


def default_scaling(alpha: float) -> ScalingKind:
    """Lag scaling on which a tail exponent shows aging."""
    if math.isclose(alpha, 1.0, rel_tol=0.0, abs_tol=ALPHA_TOLERANCE):
        return ScalingKind.LOGARITHMIC
    return ScalingKind.LINEAR


def aging_sweep(
    kernel: Kernel,
    model: DiffusionModel | str,
    kappa: float,
    rho: float,
    a_values: Sequence[float],
    t_values: Sequence[float],
    scaling: Optional[ScalingKind | str] = None,
    w: Optional[float] = None,
    lower: Optional[float] = None,
    upper: Optional[float] = None,
    alpha: Optional[float] = None,
    settings: Optional[AgingSettings] = None,
    volterra: Optional[VolterraSettings] = None,
    lyapunov: Optional[LyapunovSettings] = None,
    quadrature: Optional[FourierQuadrature] = None,
    workers: int = 1,
) -> AgingReport:
    """
    Compare correlation(q) against aging_limit at every (a, t).

    m is built once up to the largest t + s and shared by all cells. Cells
    are independent and evaluated on ``workers`` threads; rows keep the
    (a, t) order of the inputs.

    Args:
        kernel: Symmetric base kernel.
        model: Diffusion class.
        kappa: Branching rate.
        rho: Noise correlation (symbiotic class).
        a_values: Scaling parameters.
        t_values: Base times.
        scaling: Lag scaling; inferred from alpha when omitted.
        w: Stepping stone frequency.
        lower: alpha_1 of the bounded class.
        upper: alpha_2 of the bounded class.
        alpha: Tail exponent override (defaults to the kernel's tail).
        settings: Aging settings.
        volterra: Solver settings for m.
        lyapunov: Root-finding settings for the extension of m.
        quadrature: Quadrature engine.
        workers: Threads evaluating cells.

    Returns:
        AgingReport: Rows with numeric value, limit, deviation and path.

    Raises:
        AsymmetricKernel: If the kernel is not symmetric.
        RegimeMismatch: If the tail is unknown or the scaling does not fit alpha.
    """
    if not kernel.symmetric:
        raise AsymmetricKernel(f"aging requires a symmetric kernel, got {kernel.label()}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    model = DiffusionModel(model)
    settings = settings or AgingSettings()
    profile = symmetrized_profile(kernel, quadrature)

    if alpha is None:
        tail = profile.tail()
        if tail is None:
            raise RegimeMismatch(f"aging sweep needs the tail of {kernel.label()}")
        alpha = tail.alpha
    kind = ScalingKind(scaling) if scaling is not None else default_scaling(alpha)

    cells: List[Tuple[float, AgingQuery]] = [
        (
            a,
            AgingQuery(
                kernel=kernel,
                kappa=kappa,
                rho=rho,
                model=model,
                w=w,
                lower=lower,
                upper=upper,
                t=t,
                s=kind.lag(t, a),
            ),
        )
        for a in a_values
        for t in t_values
    ]
    if not cells:
        raise ValueError("aging sweep needs at least one a and one t")
    effective_rho = cells[0][1].effective_rho
    regime = NoiseRegime.of(effective_rho)

    moment = moment_function(
        model,
        kernel,
        kappa,
        rho,
        horizon=max(q.t + q.s for _, q in cells),
        w=w,
        lower=lower,
        upper=upper,
        aging=settings,
        volterra=volterra,
        lyapunov=lyapunov,
        quadrature=quadrature,
        profile=profile,
    )

    # Build the lazily sampled return curve before cells share the profile.
    exact_reach = [q.t + q.s for _, q in cells if q.t + q.s <= settings.exact_crossover]
    profile.values(np.array([max(exact_reach, default=settings.exact_crossover)]))

    def evaluate(cell: Tuple[float, AgingQuery]) -> AgingRow:
        a, query = cell
        result = correlation_integrals(query, settings, quadrature, moment, profile)
        numeric = result.value
        if model == DiffusionModel.BOUNDED:
            assert lower is not None and upper is not None
            limit = None
            deviation = None
            envelope_low: Optional[float] = lower / upper * numeric
            envelope_high: Optional[float] = min(1.0, upper / lower * numeric)
        else:
            limit = aging_limit(regime, alpha, a, kind)
            deviation = abs(numeric - limit)
            envelope_low = envelope_high = None
        logger.debug("aging_cell", a=a, t=query.t, s=query.s, numeric=numeric, limit=limit)
        return AgingRow(
            t=query.t,
            s=query.s,
            a=a,
            numeric=numeric,
            limit=limit,
            deviation=deviation,
            path=result.path,
            lower=envelope_low,
            upper=envelope_high,
        )

    if workers == 1:
        rows = [evaluate(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, cells))

    report = AgingReport(
        model=model,
        rho=effective_rho,
        alpha=alpha,
        scaling=kind,
        rows=rows,
        splice_point=moment.splice_point,
    )
    logger.info(
        "aging_sweep_complete",
        model=model.value,
        alpha=alpha,
        scaling=kind.value,
        cells=len(rows),
        trend=report.deviation_trend(),
    )
    return report
