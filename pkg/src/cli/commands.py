"""
Subcommand implementations.

Each command takes the validated RunConfig and LabSettings, writes its
artifacts into the output directory and returns a CommandOutcome whose
table is printed on stdout.
"""

from dataclasses import dataclass, field
import math
from pathlib import Path
from typing import Callable, Dict

import pandas as pd
import structlog

from src.aging.sweep import aging_sweep
from src.cli.config import Command, RunConfig, SimulationMethod
from src.cli.suites import run_suite
from src.config.models import LabSettings
from src.exceptions import InvalidConfig
from src.kernels.builder import kernel_from_text
from src.kernels.curves import default_grid, return_curve
from src.kernels.fourier import FourierQuadrature
from src.localtime.lyapunov import lyapunov_report
from src.localtime.volterra import volterra_solve
from src.moments.duality import second_moments
from src.moments.intermittency import gamma2_curve
from src.montecarlo.dual import simulate_coalescing_dual, simulate_dual_pair
from src.montecarlo.lattice import simulate_lattice
from src.models.aging import DiffusionModel
from src.models.curves import LyapunovReport
from src.models.moments import ModelParams
from src.models.simulation import SimConfig, SimResult
from src.storage.artifacts import write_csv, write_json
from src.storage.curve_cache import CurveCache

logger = structlog.get_logger(__name__)


@dataclass
class CommandOutcome:
    """
    Result of one subcommand.

    Attributes:
        table: Summary printed on stdout.
        outputs: Artifact name to written path.
        passed: False if a validation check failed.
    """

    table: pd.DataFrame
    outputs: Dict[str, Path] = field(default_factory=dict)
    passed: bool = True


def _quadrature(config: RunConfig, settings: LabSettings) -> FourierQuadrature:
    """Quadrature engine reading sampled curves through the cache unless --no-cache."""
    curves = None if config.no_cache else CurveCache(settings=settings.cache)
    return FourierQuadrature(settings.quadrature, curves)


# =============================================================================
# ANALYTIC COMMANDS
# =============================================================================


def run_kernel(config: RunConfig, settings: LabSettings) -> CommandOutcome:
    """Return curve, Green values and tail of a kernel."""
    kernel = kernel_from_text(config.kernel)
    quadrature = _quadrature(config, settings)
    grid = default_grid(config.horizon)
    if quadrature.curves is None:
        curve = return_curve(kernel, grid, quadrature)
    else:
        curve = quadrature.curves.get_or_compute(kernel, grid, quadrature)
    green = quadrature.green_values(kernel)

    out = config.output_dir
    curve_path = write_csv(
        out / "return_curve.csv",
        pd.DataFrame({"t": curve.times, "p": curve.values}),
        comments={"kernel": kernel.label(), "provenance": curve.provenance.value},
    )
    summary = {
        "kernel": kernel.describe(),
        "green": green.green,
        "green_moment": green.green_moment,
        "critical_rate": green.critical_rate,
        "tail": curve.tail.model_dump(mode="json") if curve.tail else None,
    }
    summary_path = write_json(out / "kernel.json", summary)
    table = pd.DataFrame(
        [
            {
                "kernel": kernel.label(),
                "G": green.green,
                "H": green.green_moment,
                "kappa_cr": green.critical_rate,
                "c": curve.tail.c if curve.tail else None,
                "alpha": curve.tail.alpha if curve.tail else None,
            }
        ]
    )
    return CommandOutcome(table, {"return_curve": curve_path, "kernel": summary_path})


def run_volterra(config: RunConfig, settings: LabSettings) -> CommandOutcome:
    """g(t) = E[exp(kappa L_t)] for the walk of the kernel."""
    kernel = kernel_from_text(config.kernel)
    quadrature = _quadrature(config, settings)
    curve = volterra_solve(
        kernel, config.kappa, config.horizon, config.step, settings.volterra, quadrature
    )
    frame = pd.DataFrame(
        {
            "t": curve.times,
            "g": curve.values,
            "error": curve.error_estimate if curve.error_estimate is not None else math.nan,
            "residual": curve.residual,
        }
    )
    path = write_csv(
        config.output_dir / "volterra.csv",
        frame,
        comments={"kernel": kernel.label(), "kappa": config.kappa, "step": curve.step},
    )
    table = pd.DataFrame(
        [
            {
                "T": curve.horizon,
                "g(T)": float(curve.values[-1]),
                "step": curve.step,
                "max_residual": curve.max_residual,
            }
        ]
    )
    return CommandOutcome(table, {"volterra": path})


def _lyapunov_frame(report: LyapunovReport) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "kappa": [p.kappa for p in report.points],
            "r": [p.rate for p in report.points],
            "regime": [p.regime.value for p in report.points],
            "prediction": [p.prediction for p in report.points],
        }
    )


def run_lyapunov(config: RunConfig, settings: LabSettings) -> CommandOutcome:
    """r(kappa) of the kernel, or gamma_2(kappa, rho) when rho is given."""
    kernel = kernel_from_text(config.kernel)
    quadrature = _quadrature(config, settings)
    if config.rho is None:
        report = lyapunov_report(
            kernel, config.kappas, settings=settings.lyapunov, quadrature=quadrature
        )
    else:
        report = gamma2_curve(kernel, config.rho, config.kappas, settings.lyapunov, quadrature)
    frame = _lyapunov_frame(report)
    out = config.output_dir
    csv_path = write_csv(
        out / "lyapunov.csv",
        frame,
        comments={"kernel": kernel.label(), "rho": config.rho, "kappa_cr": report.kappa_cr},
    )
    json_path = write_json(
        out / "lyapunov.json",
        {
            "kappa_cr": report.kappa_cr,
            "rho": report.rho,
            "checks": [check.model_dump(mode="json") for check in report.checks],
        },
    )
    return CommandOutcome(frame, {"lyapunov": csv_path, "checks": json_path})


def run_moments(config: RunConfig, settings: LabSettings) -> CommandOutcome:
    """E[uv] and E[u^2] with the intermittency verdict."""
    params = ModelParams(
        kernel=kernel_from_text(config.kernel),
        kappa=config.kappa,
        rho=0.0 if config.rho is None else config.rho,
    )
    report = second_moments(
        params,
        config.horizon,
        config.step,
        settings.volterra,
        settings.lyapunov,
        _quadrature(config, settings),
    )
    frame = pd.DataFrame({"t": report.times, "mixed_uv": report.mixed, "second_u": report.second})
    out = config.output_dir
    csv_path = write_csv(
        out / "moments.csv",
        frame,
        comments={"kernel": params.kernel.label(), "kappa": params.kappa, "rho": params.rho},
    )
    verdict = {
        **report.result.model_dump(mode="json"),
        "growth_rate_mixed": report.growth_rate_mixed,
        "growth_rate_second": report.growth_rate_second,
        "asymptote": report.asymptote.model_dump(mode="json") if report.asymptote else None,
    }
    json_path = write_json(out / "intermittency.json", verdict)
    table = pd.DataFrame(
        [
            {
                "kappa": params.kappa,
                "rho": params.rho,
                "kappa_cr": report.result.kappa_cr,
                "gamma2": report.result.gamma2,
                "verdict": report.result.verdict.value,
                "E[uv](T)": float(report.mixed[-1]),
                "E[u^2](T)": float(report.second[-1]),
            }
        ]
    )
    return CommandOutcome(table, {"moments": csv_path, "intermittency": json_path})


def run_aging(config: RunConfig, settings: LabSettings) -> CommandOutcome:
    """Aging sweep over the (a, t) grid."""
    kernel = kernel_from_text(config.kernel)
    report = aging_sweep(
        kernel,
        config.model,
        config.kappa,
        0.0 if config.rho is None else config.rho,
        config.a_values,
        config.t_values,
        scaling=config.scaling,
        w=config.w,
        lower=config.lower,
        upper=config.upper,
        settings=settings.aging,
        volterra=settings.volterra,
        lyapunov=settings.lyapunov,
        quadrature=_quadrature(config, settings),
        workers=config.workers,
    )
    columns = ["t", "s", "a", "numeric", "limit", "deviation", "path"]
    if report.model == DiffusionModel.BOUNDED:
        columns += ["lower", "upper"]
    frame = pd.DataFrame([row.model_dump(mode="json") for row in report.rows])[columns]
    out = config.output_dir
    csv_path = write_csv(
        out / "aging.csv",
        frame,
        comments={
            "kernel": kernel.label(),
            "model": report.model.value,
            "alpha": report.alpha,
            "scaling": report.scaling.value,
        },
    )
    json_path = write_json(
        out / "aging.json",
        {
            "model": report.model.value,
            "rho": report.rho,
            "alpha": report.alpha,
            "scaling": report.scaling.value,
            "splice_point": report.splice_point,
            "deviation_trend": {str(a): ok for a, ok in report.deviation_trend().items()},
        },
    )
    return CommandOutcome(frame, {"aging": csv_path, "summary": json_path})


# =============================================================================
# MONTE CARLO AND VALIDATION
# =============================================================================


def _simulate(config: RunConfig, settings: LabSettings) -> SimResult:
    kernel = kernel_from_text(config.kernel)
    mc = settings.montecarlo.model_copy(update={"workers": config.workers})
    rho = 0.0 if config.rho is None else config.rho
    if config.method == SimulationMethod.LATTICE:
        initial = {} if config.w is None else {"initial_u": config.w, "initial_v": 1.0 - config.w}
        sim = SimConfig(
            kernel=kernel,
            torus_size=config.torus_size,
            dt=config.dt,
            horizon=config.horizon,
            kappa=config.kappa,
            rho=rho,
            replicas=config.replicas,
            seed=config.seed,
            lag=config.lag,
            **initial,
        )
        return simulate_lattice(sim, config.observables, mc)
    if config.method == SimulationMethod.DUAL_PAIR:
        return simulate_dual_pair(
            kernel,
            config.kappa,
            rho,
            config.horizon,
            config.start,
            config.replicas,
            config.seed,
            mc,
        )
    if config.w is None:
        raise InvalidConfig("coalescing_dual needs --w")
    return simulate_coalescing_dual(
        kernel, config.kappa, config.w, config.horizon, config.replicas, config.seed, mc
    )


def run_simulate(config: RunConfig, settings: LabSettings) -> CommandOutcome:
    """Monte Carlo estimates with standard errors."""
    result = _simulate(config, settings)
    records = result.records()
    out = config.output_dir
    json_path = write_json(
        out / "simulation.json",
        {"method": result.method, "time": result.time, "seed_scheme": result.seed_scheme,
         "estimates": records},
    )
    frame = pd.DataFrame(records)
    frame["flags"] = frame["flags"].map(";".join)
    csv_path = write_csv(out / "simulation.csv", frame, comments={"method": result.method})
    return CommandOutcome(frame, {"simulation": json_path, "estimates": csv_path})


def run_validate(config: RunConfig, settings: LabSettings) -> CommandOutcome:
    """Cross-oracle validation suite."""
    checks = run_suite(config.suite, settings, _quadrature(config, settings))
    frame = pd.DataFrame(
        [
            {
                "check": c.name,
                "passed": c.passed,
                "measured": c.measured,
                "expected": c.expected,
                "detail": c.detail,
            }
            for c in checks
        ]
    )
    path = write_csv(config.output_dir / "validation.csv", frame, comments={"suite": config.suite})
    return CommandOutcome(frame, {"validation": path}, passed=all(c.passed for c in checks))


COMMANDS: Dict[Command, Callable[[RunConfig, LabSettings], CommandOutcome]] = {
    Command.KERNEL: run_kernel,
    Command.VOLTERRA: run_volterra,
    Command.LYAPUNOV: run_lyapunov,
    Command.MOMENTS: run_moments,
    Command.AGING: run_aging,
    Command.SIMULATE: run_simulate,
    Command.VALIDATE: run_validate,
}
