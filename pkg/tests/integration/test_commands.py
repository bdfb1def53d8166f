"""
End-to-end tests of the ``symbranch`` subcommands.

Tests cover:
- Every subcommand writes its artifacts and a provenance file
- Provenance configuration parses back into the run configuration
- Table bodies are identical across repeated runs
- Exit codes of the validation suite
- Monte Carlo estimators against the deterministic solvers (slow)
"""

import math
from pathlib import Path

import numpy as np
import orjson
import pytest

from src.cli import suites
from src.cli.config import RunConfig, load_run_config
from src.cli.main import EXIT_ERROR, EXIT_OK
from src.kernels.builder import kernel_from_text, symmetrize
from src.localtime.volterra import volterra_solve
from src.models.curves import PropertyCheck
from src.models.moments import ModelParams
from src.models.simulation import Observable, SimConfig
from src.moments.duality import second_moments
from src.montecarlo.dual import simulate_coalescing_dual, simulate_dual_pair
from src.montecarlo.lattice import simulate_lattice
from src.storage.artifacts import csv_body, read_csv, read_json

pytestmark = pytest.mark.integration


# =============================================================================
# ANALYTIC COMMANDS
# =============================================================================


class TestAnalyticCommands:
    """Kernel, Volterra, Lyapunov, moments and aging runs."""

    def test_kernel(self, cli, output_dir: Path):
        """The 1-d walk is recurrent with an analytic t^-1/2 tail."""
        assert cli("kernel", "--kernel", "laplacian:d=1", "-T", "20") == EXIT_OK
        curve = read_csv(output_dir / "return_curve.csv")
        assert curve["p"].iloc[0] == 1.0
        assert np.all(np.diff(curve["p"]) <= 0)
        summary = read_json(output_dir / "kernel.json")
        assert summary["green"] == "inf"
        assert summary["tail"]["alpha"] == pytest.approx(0.5)
        assert summary["tail"]["source"] == "analytic"

    def test_volterra(self, cli, output_dir: Path):
        """The solution table starts at g(0) = 1 and grows for kappa > 0."""
        assert cli("volterra", "--kernel", "laplacian:d=1", "--kappa", "1", "-T", "2") == EXIT_OK
        table = read_csv(output_dir / "volterra.csv")
        assert list(table.columns) == ["t", "g", "error", "residual"]
        assert table["g"].iloc[0] == 1.0
        assert np.all(np.diff(table["g"]) > 0)

    def test_lyapunov(self, cli, output_dir: Path):
        """r(kappa) of the walk on Z solves r (r + 2) = kappa^2."""
        code = cli("lyapunov", "--kernel", "laplacian:d=1", "--kappa-grid", "0.5,1,2")
        assert code == EXIT_OK
        table = read_csv(output_dir / "lyapunov.csv")
        for kappa, rate in zip(table["kappa"], table["r"]):
            assert rate == pytest.approx(-1.0 + math.sqrt(1.0 + kappa**2), rel=1e-6)
        checks = read_json(output_dir / "lyapunov.json")
        assert checks["kappa_cr"] == 0.0

    def test_gamma2(self, cli, output_dir: Path):
        """With rho the table reports gamma_2 of the symmetrized walk."""
        code = cli("lyapunov", "--kernel", "laplacian:d=1", "--rho", "1", "--kappa-grid", "1")
        assert code == EXIT_OK
        table = read_csv(output_dir / "lyapunov.csv")
        assert table["r"].iloc[0] == pytest.approx(math.sqrt(5.0) - 2.0, rel=1e-6)

    def test_moments_without_correlation(self, cli, output_dir: Path):
        """rho = 0 keeps E[uv] at exactly 1."""
        argv = ("moments", "--kernel", "laplacian:d=1", "--rho", "0", "--kappa", "1")
        code = cli(*argv, "-T", "2")
        assert code == EXIT_OK
        table = read_csv(output_dir / "moments.csv")
        assert (table["mixed_uv"] == 1.0).all()
        assert table["second_u"].iloc[-1] > 1.0
        verdict = read_json(output_dir / "intermittency.json")
        assert verdict["verdict"] == "non_intermittent"

    def test_aging(self, cli, output_dir: Path):
        """The aging table has one row per (a, t) cell."""
        code = cli(
            "aging", "--kernel", "laplacian:d=1", "--model", "superrw", "--a", "0.5,1", "--t", "10"
        )
        assert code == EXIT_OK
        table = read_csv(output_dir / "aging.csv")
        assert list(table.columns) == ["t", "s", "a", "numeric", "limit", "deviation", "path"]
        assert table["a"].tolist() == [0.5, 1.0]
        summary = read_json(output_dir / "aging.json")
        assert summary["scaling"] == "linear"


# =============================================================================
# PROVENANCE AND DETERMINISM
# =============================================================================


class TestProvenance:
    """Provenance files and reproducible tables."""

    def test_provenance_round_trip(self, cli, output_dir: Path, tmp_path: Path):
        """The echoed configuration equals the configuration of the run."""
        config_path = tmp_path / "run.json"
        config_path.write_bytes(
            orjson.dumps(
                {
                    "command": "simulate",
                    "method": "dual_pair",
                    "kernel": "laplacian:d=1",
                    "rho": 0.0,
                    "horizon": 2.0,
                    "replicas": 40,
                    "seed": 7,
                }
            )
        )
        assert cli("simulate", "--config", str(config_path)) == EXIT_OK

        record = read_json(output_dir / "provenance.json")
        assert record["command"] == "simulate"
        assert set(record["outputs"]) == {"simulation", "estimates"}
        echoed = RunConfig.model_validate(record["config"])
        expected = load_run_config(
            config_path,
            {"command": "simulate", "output": str(output_dir), "log_level": "WARNING"},
        )
        assert echoed == expected

        estimates = read_json(output_dir / "simulation.json")["estimates"]
        assert estimates[0]["observable"] == "mixed_uv"
        assert estimates[0]["estimate"] == 1.0

    def test_identical_bodies(self, cli, tmp_path: Path):
        """Two runs differ only in their comment lines."""
        first, second = tmp_path / "first", tmp_path / "second"
        argv = ("kernel", "--kernel", "laplacian:d=2", "-T", "10")
        assert cli(*argv, output=first) == EXIT_OK
        assert cli(*argv, output=second) == EXIT_OK
        assert csv_body(first / "return_curve.csv") == csv_body(second / "return_curve.csv")

    def test_cache_does_not_change_output(self, cli, tmp_path: Path):
        """A cached curve gives the same table as a fresh evaluation."""
        cached, fresh = tmp_path / "cached", tmp_path / "fresh"
        argv = ("kernel", "--kernel", "laplacian:d=1", "-T", "10")
        assert cli(*argv, output=cached) == EXIT_OK
        assert cli(*argv, "--no-cache", output=fresh) == EXIT_OK
        assert csv_body(cached / "return_curve.csv") == csv_body(fresh / "return_curve.csv")

    def test_solvers_fill_the_cache(self, cli, tmp_path: Path):
        """Volterra runs on a sampled kernel store its curve unless --no-cache."""
        cache_dir = tmp_path / "cache"
        argv = ("volterra", "--kernel", "finite:d=1,jumps=1@0.7|-1@0.3", "--kappa", "1", "-T", "2")
        assert cli(*argv, "--no-cache", output=tmp_path / "fresh") == EXIT_OK
        assert not cache_dir.exists() or list(cache_dir.glob("*.csv")) == []
        assert cli(*argv, output=tmp_path / "cached") == EXIT_OK
        assert len(list(cache_dir.glob("*.csv"))) == 1
        assert csv_body(tmp_path / "fresh" / "volterra.csv") == csv_body(
            tmp_path / "cached" / "volterra.csv"
        )

    def test_lattice_reproducible(self, cli, tmp_path: Path):
        """The same seed reproduces lattice estimates exactly."""
        argv = (
            "simulate", "--kernel", "laplacian:d=1", "-N", "8", "--dt", "0.01", "-T", "0.1",
            "--replicas", "12", "--seed", "5", "--observables", "mean_u,second_u",
        )
        assert cli(*argv, output=tmp_path / "a") == EXIT_OK
        assert cli(*argv, "--workers", "1", output=tmp_path / "b") == EXIT_OK
        first = read_csv(tmp_path / "a" / "simulation.csv")
        second = read_csv(tmp_path / "b" / "simulation.csv")
        assert first["observable"].tolist() == ["mean_u", "second_u"]
        assert first["estimate"].tolist() == second["estimate"].tolist()


# =============================================================================
# VALIDATION SUITE
# =============================================================================


class TestValidateCommand:
    """Exit codes of ``symbranch validate``."""

    def test_quick_suite_passes(self, cli, output_dir: Path):
        """The quick suite exits with 0 and records every check."""
        assert cli("validate", "--suite", "quick") == EXIT_OK
        table = read_csv(output_dir / "validation.csv")
        assert len(table) >= 10
        assert table["passed"].all()

    def test_failed_check_exits_with_two(self, cli, mocker):
        """Failing checks give exit code 2."""

        def check_fails(settings, quadrature):
            return PropertyCheck(name="fails", passed=False)

        mocker.patch.object(suites, "QUICK_CHECKS", [check_fails])
        assert cli("validate") == 2

    def test_bad_arguments(self, cli):
        """Invalid values exit with 1."""
        assert cli("moments", "--rho", "3") == EXIT_ERROR


# =============================================================================
# MONTE CARLO AGAINST DETERMINISTIC SOLVERS
# =============================================================================


@pytest.mark.slow
class TestMonteCarloAgreement:
    """Estimators agree with the renewal-equation solutions."""

    def test_dual_pair_matches_volterra(self):
        """rho = 1: E[exp(kappa L_t)] from the dual matches E[u^2]."""
        kernel = kernel_from_text("laplacian:d=1")
        report = second_moments(ModelParams(kernel=kernel, kappa=0.5, rho=1.0), horizon=2.0)
        result = simulate_dual_pair(kernel, 0.5, 1.0, 2.0, "same", 20_000, seed=1)
        assert result.primary.agrees_with(float(report.second[-1]), sigmas=4.0)

    def test_coalescing_dual_matches_volterra(self):
        """E[u^2] = w - (w - w^2) E[exp(-kappa L_t)] for the stepping stone model."""
        kernel = kernel_from_text("laplacian:d=1")
        w, kappa, horizon = 0.3, 1.0, 2.0
        laplace = volterra_solve(symmetrize(kernel), -kappa, horizon).at(horizon)
        expected = w - (w - w * w) * laplace
        result = simulate_coalescing_dual(kernel, kappa, w, horizon, 20_000, seed=2)
        assert result.primary.agrees_with(expected, sigmas=4.0)

    def test_lattice_second_moment(self):
        """rho = 0: the lattice E[u^2] matches 1 + kappa E[L_t] up to the step bias."""
        kernel = kernel_from_text("laplacian:d=1")
        expected = second_moments(ModelParams(kernel=kernel, kappa=1.0, rho=0.0), horizon=1.0)
        cfg = SimConfig(
            kernel=kernel,
            torus_size=32,
            dt=0.01,
            horizon=1.0,
            kappa=1.0,
            rho=0.0,
            replicas=2000,
            seed=3,
        )
        estimate = simulate_lattice(cfg, [Observable.SECOND_U]).primary
        bias = 5 * cfg.dt * cfg.horizon * (1 + cfg.kappa) * abs(estimate.estimate)
        assert estimate.agrees_with(float(expected.second[-1]), sigmas=4.0, bias=bias)
