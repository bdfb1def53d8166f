"""
Euler-Maruyama simulation of the symbiotic branching system on a torus.

    du(i) = sum_j a(i,j) (u(j) - u(i)) dt + sqrt(kappa u v) dW1(i)
    dv(i) = sum_j a(i,j) (v(j) - v(i)) dt + sqrt(kappa u v) dW2(i)

with dW2 = rho dW1 + sqrt(1 - rho^2) dW_perp per site. Replicas are advanced
in batches; each replica draws its noise from its own seeded Generator in
blocks of steps, so a replica's path does not depend on the batch it ran in.
"""

from concurrent.futures import ProcessPoolExecutor
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from src.config.models import MonteCarloSettings
from src.exceptions import InvalidConfig, UnstableStep
from src.montecarlo.accumulator import (
    ReplicaAccumulator,
    replica_batches,
    summarize,
    summarize_correlation,
)
from src.montecarlo.seeding import replica_generator
from src.models.simulation import EstimateFlag, Observable, ObservableEstimate, SimConfig, SimResult

logger = structlog.get_logger(__name__)

DEFAULT_OBSERVABLES = (Observable.MEAN_U, Observable.MIXED_UV)

# Channels recorded per replica at the origin.
CHANNELS = ("u", "v", "u_lag")


def torus_window(cfg: SimConfig) -> float:
    """
    Largest time for which the torus stands in for Z^d.

    The walk's spread sqrt(t * sum_j a(0,j) |j|^2) must stay below a third
    of the half side.
    """
    offsets = cfg.kernel.offset_array.astype(np.float64)
    spread = cfg.kernel.total_rate * float(cfg.kernel.rate_array @ np.sum(offsets**2, axis=1))
    return (cfg.torus_size / 6.0) ** 2 / spread


def _shifts(cfg: SimConfig) -> List[Tuple[Tuple[int, ...], float]]:
    return [
        (tuple(-int(x) for x in offset), cfg.kernel.total_rate * rate)
        for offset, rate in zip(cfg.kernel.offsets, cfg.kernel.rates)
        if rate > 0
    ]


def _drift(
    field: np.ndarray,
    shifts: List[Tuple[Tuple[int, ...], float]],
    axes: Tuple[int, ...],
    total: float,
) -> np.ndarray:
    """sum_j a(0,j) field(i + j) - total * field(i) on the periodic lattice."""
    out = -total * field
    for shift, rate in shifts:
        out += rate * np.roll(field, shift, axis=axes)
    return out


def _simulate_batch(
    cfg: SimConfig,
    batch_index: int,
    replicas: Sequence[int],
    settings: MonteCarloSettings,
) -> Tuple[int, Dict[str, np.ndarray]]:
    """
    Advance one batch of replicas and return origin values.

    Returns:
        (batch_index, {"u": u(T,0), "v": v(T,0), "u_lag": u(T+s,0)})
    """
    d = cfg.kernel.dimension
    shape = (len(replicas),) + (cfg.torus_size,) * d
    axes = tuple(range(1, d + 1))
    origin = (slice(None),) + (0,) * d
    shifts = _shifts(cfg)
    total = sum(rate for _, rate in shifts)
    generators = [replica_generator(cfg.seed, index) for index in replicas]

    u = np.full(shape, cfg.initial_u, dtype=np.float64)
    v = np.full(shape, cfg.initial_v, dtype=np.float64)
    sqrt_dt = math.sqrt(cfg.dt)
    perp = math.sqrt(max(1.0 - cfg.rho * cfg.rho, 0.0))
    steps, lag_steps = cfg.steps, cfg.lag_steps
    block = settings.noise_block

    at_horizon: Optional[Tuple[np.ndarray, np.ndarray]] = None
    if steps == 0:
        at_horizon = (u[origin].copy(), v[origin].copy())
    noise = np.empty((0,))
    for step in range(steps + lag_steps):
        offset = step % block
        if offset == 0:
            length = min(block, steps + lag_steps - step)
            noise = np.stack(
                [g.standard_normal((length, 2) + shape[1:]) for g in generators], axis=1
            )
        z1 = noise[offset, :, 0]
        dw1 = sqrt_dt * z1
        if cfg.rho == 1.0:
            dw2 = dw1
        elif cfg.rho == -1.0:
            dw2 = -dw1
        else:
            dw2 = cfg.rho * dw1 + perp * sqrt_dt * noise[offset, :, 1]

        product = u * v
        if cfg.clamp:
            product = np.maximum(product, 0.0)
        elif np.any(product < 0):
            time = (step + 1) * cfg.dt
            raise UnstableStep(
                f"negative u*v at t={time:.6g} with clamping disabled",
                time=time,
                magnitude=float(-product.min()),
            )
        sigma = np.sqrt(cfg.kappa * product)
        u, v = (
            u + _drift(u, shifts, axes, total) * cfg.dt + sigma * dw1,
            v + _drift(v, shifts, axes, total) * cfg.dt + sigma * dw2,
        )

        magnitude = float(max(np.max(np.abs(u)), np.max(np.abs(v))))
        if not math.isfinite(magnitude) or magnitude > settings.explosion_threshold:
            time = (step + 1) * cfg.dt
            raise UnstableStep(
                f"field exploded at t={time:.6g} (|u| = {magnitude:.3e})",
                time=time,
                magnitude=magnitude,
            )
        if step + 1 == steps:
            at_horizon = (u[origin].copy(), v[origin].copy())

    assert at_horizon is not None
    return batch_index, {"u": at_horizon[0], "v": at_horizon[1], "u_lag": u[origin].copy()}


def _estimates(
    accumulator: ReplicaAccumulator,
    observables: Sequence[Observable],
    settings: MonteCarloSettings,
    flags: List[EstimateFlag],
) -> List[ObservableEstimate]:
    u, v, u_lag = (accumulator.channel(name) for name in CHANNELS)
    estimates = []
    for observable in observables:
        if observable == Observable.MEAN_U:
            estimates.append(summarize(observable.value, u, settings, flags))
        elif observable == Observable.SECOND_U:
            estimates.append(summarize(observable.value, u * u, settings, flags))
        elif observable == Observable.MIXED_UV:
            estimates.append(summarize(observable.value, u * v, settings, flags))
        else:
            estimates.append(summarize_correlation(observable.value, u, u_lag, flags))
    return estimates


def simulate_lattice(
    cfg: SimConfig,
    observables: Optional[Sequence[Observable | str]] = None,
    settings: Optional[MonteCarloSettings] = None,
) -> SimResult:
    """
    Estimate origin observables of the symbiotic branching system.

    Args:
        cfg: Simulation configuration.
        observables: Observables to estimate (default mean_u and mixed_uv).
        settings: Batch size, worker processes and reliability thresholds.

    Returns:
        SimResult: One estimate per observable. Identical configurations give
        identical results for any batch size or worker count.

    Raises:
        UnstableStep: If a field exceeds the explosion threshold.
        InvalidConfig: If the observables are unknown or the correlation
            observable is requested without a lag.
    """
    settings = settings or MonteCarloSettings()
    try:
        requested = [Observable(o) for o in (observables or DEFAULT_OBSERVABLES)]
    except ValueError as e:
        raise InvalidConfig(str(e)) from e
    if Observable.CORRELATION in requested and (cfg.lag_steps == 0 or cfg.replicas < 2):
        raise InvalidConfig("correlation needs a lag of at least one step and two replicas")

    flags: List[EstimateFlag] = []
    window = torus_window(cfg)
    if cfg.horizon + cfg.lag > window:
        flags.append(EstimateFlag.TORUS_WINDOW)
        logger.warning(
            "torus_window_exceeded",
            time=cfg.horizon + cfg.lag,
            window=window,
            torus_size=cfg.torus_size,
        )

    batches = replica_batches(cfg.replicas, settings.batch_size)
    accumulator = ReplicaAccumulator(CHANNELS)
    logger.info(
        "lattice_simulation_started",
        kernel=cfg.kernel.label(),
        replicas=cfg.replicas,
        steps=cfg.steps + cfg.lag_steps,
        batches=len(batches),
        workers=settings.workers,
    )
    if settings.workers == 1 or len(batches) == 1:
        for index, batch in enumerate(batches):
            accumulator.commit(*_simulate_batch(cfg, index, batch, settings))
    else:
        with ProcessPoolExecutor(max_workers=settings.workers) as pool:
            futures = [
                pool.submit(_simulate_batch, cfg, index, batch, settings)
                for index, batch in enumerate(batches)
            ]
            for future in futures:
                accumulator.commit(*future.result())

    result = SimResult(
        estimates=_estimates(accumulator, requested, settings, flags),
        replicas=cfg.replicas,
        seed=cfg.seed,
        method="lattice",
        time=cfg.horizon,
    )
    logger.info(
        "lattice_simulation_complete",
        estimates={e.observable: e.estimate for e in result.estimates},
    )
    return result
