"""
Unit tests for local-time exponential moments.

Tests cover:
- The renewal-equation solver against closed forms, the chain oracle and
  the point-by-point recurrence
- Bounds, submultiplicativity and the Laplace identity of g
- Generator validation and the chain-backed profile
- Lyapunov exponents and their structural properties
- Closed-form rate and growth asymptotics
"""

import math

import numpy as np
from pydantic import ValidationError
import pytest
from scipy import integrate

from src.config.models import LyapunovSettings, VolterraSettings
from src.exceptions import (
    InvalidGenerator,
    QuadratureNotConverged,
    RegimeMismatch,
    StepTooLarge,
)
from src.kernels.builder import symmetrize
from src.kernels.profiles import ExponentialProfile, FunctionProfile
from src.localtime.asymptotics import (
    SubexpRegime,
    classify_rate,
    rate_asymptotics,
    subexp_asymptotics,
)
from src.localtime.chain import ChainProfile, exact_chain_moment, validate_generator
from src.localtime.lyapunov import (
    laplace_f,
    lyapunov_rate,
    lyapunov_report,
    rate_property_checks,
)
from src.localtime.volterra import MARCH_LEAF, _march, default_step, volterra_solve
from src.models.curves import LyapunovPoint, LyapunovRegime, MomentCurve


# =============================================================================
# VOLTERRA SOLVER
# =============================================================================


class TestVolterraSolve:
    """Tests for g(t) = 1 + kappa int f(r) g(t-r) dr."""

    def test_constant_return(self, single_state):
        """f = 1 gives g(t) = e^(kappa t)."""
        curve = volterra_solve(single_state, 1.0, 1.0, 1e-3)
        assert curve.values[0] == 1.0
        assert curve.values[-1] == pytest.approx(math.e, rel=1e-8)
        assert curve.extrapolated

    def test_exponential_return(self, exponential_return):
        """f = e^-t with kappa = 2 gives g = 2 e^t - 1."""
        curve = volterra_solve(exponential_return, 2.0, 1.0, 1e-3)
        assert curve.at(1.0) == pytest.approx(2 * math.e - 1, rel=1e-7)
        assert curve.at(0.5) == pytest.approx(2 * math.exp(0.5) - 1, rel=1e-7)

    def test_negative_kappa(self, single_state):
        """Negative kappa gives decay e^(kappa t) for f = 1."""
        curve = volterra_solve(single_state, -2.0, 1.0, 1e-3)
        assert curve.values[-1] == pytest.approx(math.exp(-2.0), rel=1e-7)

    def test_zero_kappa(self, exponential_return):
        """kappa = 0 gives g = 1."""
        curve = volterra_solve(exponential_return, 0.0, 2.0)
        np.testing.assert_allclose(curve.values, 1.0)

    def test_matches_chain_oracle(self, three_state_generator):
        """The solver agrees with the matrix-exponential oracle."""
        kappa, horizon = 0.8, 3.0
        curve = volterra_solve(ChainProfile(three_state_generator, 0), kappa, horizon, 1e-3)
        expected = exact_chain_moment(three_state_generator, 0, kappa, horizon)
        assert curve.values[-1] == pytest.approx(expected, rel=1e-6)

    def test_without_richardson(self, single_state):
        """Plain trapezoid marching is second order without an error estimate."""
        settings = VolterraSettings(richardson=False)
        curve = volterra_solve(single_state, 1.0, 1.0, 1e-3, settings=settings)
        assert curve.error_estimate is None
        assert not curve.extrapolated
        assert curve.values[-1] == pytest.approx(math.e, rel=1e-6)

    def test_residuals_are_small(self, exponential_return):
        """Residuals at the checkpoints vanish up to discretization error."""
        curve = volterra_solve(exponential_return, 1.0, 2.0, 1e-3)
        assert curve.max_residual < 1e-6
        assert np.isfinite(curve.residual[-1])

    def test_step_is_snapped(self, single_state):
        """Steps are adjusted so T/h is an integer."""
        curve = volterra_solve(single_state, 1.0, 1.0, 0.3)
        assert curve.step == pytest.approx(1.0 / 3.0)
        assert curve.times[-1] == pytest.approx(1.0)

    def test_default_step(self):
        """The default step keeps kappa h and h / T small."""
        assert default_step(1.0, 1.0) == pytest.approx(1e-3)
        assert default_step(100.0, 1000.0) == pytest.approx(1e-4)
        assert default_step(0.0, 10.0) == pytest.approx(1e-2)

    def test_step_too_large(self, single_state):
        """A step with 1 - kappa h / 2 <= 0 is rejected."""
        with pytest.raises(StepTooLarge):
            volterra_solve(single_state, 10.0, 1.0, 0.5)

    def test_invalid_arguments(self, single_state):
        """Horizon and step are validated."""
        with pytest.raises(ValueError, match="horizon"):
            volterra_solve(single_state, 1.0, 0.0)
        with pytest.raises(ValueError, match="step"):
            volterra_solve(single_state, 1.0, 1.0, 2.0)

    def test_rejects_source_not_starting_at_one(self):
        """f(0) must be 1."""
        half = FunctionProfile(lambda t: 0.5 * np.exp(-t), "half")
        with pytest.raises(ValueError, match="f\\(0\\) = 1"):
            volterra_solve(half, 1.0, 1.0, 0.01)

    def test_kernel_source(self, laplacian_1d):
        """Kernels are accepted directly and labelled."""
        curve = volterra_solve(laplacian_1d, 0.5, 1.0, 1e-2)
        assert curve.source == "laplacian:d=1"
        assert np.all(np.diff(curve.values) > 0)

    def test_growth_rate_for_constant_return(self, single_state):
        """log g grows with slope kappa when f = 1."""
        curve = volterra_solve(single_state, 0.5, 10.0, 1e-2)
        assert curve.growth_rate() == pytest.approx(0.5, rel=1e-5)

    def test_curve_rejects_wrong_initial_value(self):
        """MomentCurve enforces g(0) = 1."""
        with pytest.raises(ValidationError):
            MomentCurve(
                times=[0.0, 1.0],
                values=[2.0, 3.0],
                kappa=1.0,
                step=1.0,
                source="x",
                residual=[0.0, 0.0],
            )

    @pytest.mark.parametrize("kappa", [-1.5, 0.8])
    def test_split_history_matches_direct_march(self, kappa):
        """Grids spanning several leaf blocks reproduce the point-by-point recurrence."""
        step = 0.01
        nodes = np.arange(3 * MARCH_LEAF + 17)
        f = np.exp(-nodes * step) * (1.0 + 0.3 * np.cos(nodes))
        expected = np.empty(f.size)
        expected[0] = 1.0
        denominator = 1.0 - kappa * step * f[0] / 2.0
        for n in range(1, f.size):
            history = np.dot(f[1:n], expected[n - 1 : 0 : -1])
            expected[n] = (1.0 + kappa * step * (history + 0.5 * f[n])) / denominator
        np.testing.assert_allclose(_march(f, kappa, step), expected, rtol=1e-12, atol=1e-14)

    def test_at_outside_horizon(self, single_state):
        """Querying beyond the horizon raises."""
        curve = volterra_solve(single_state, 1.0, 1.0, 0.1)
        with pytest.raises(ValueError, match="outside"):
            curve.at(2.0)


class TestVolterraProperties:
    """Structural properties of g(t) = E[exp(kappa L_t)]."""

    @pytest.mark.parametrize("kappa", [-2.0, -0.5, 0.5, 2.0])
    def test_exponential_sandwich(self, laplacian_1d, kappa):
        """e^(min(kappa,0) t) <= g <= e^(max(kappa,0) t), monotone in the sign of kappa."""
        curve = volterra_solve(symmetrize(laplacian_1d), kappa, 5.0)
        slack = 1e-12
        lower = np.exp(min(kappa, 0.0) * curve.times) * (1 - slack)
        upper = np.exp(max(kappa, 0.0) * curve.times) * (1 + slack)
        assert np.all(curve.values >= lower)
        assert np.all(curve.values <= upper)
        steps = np.diff(curve.values)
        assert np.all(steps >= 0) if kappa > 0 else np.all(steps <= 0)

    @pytest.mark.parametrize("kappa", [0.5, 2.0])
    def test_submultiplicative(self, laplacian_1d, three_state_generator, kappa):
        """g(t + s) <= g(t) g(s) (1 + 5h) on grid points."""
        for source in (symmetrize(laplacian_1d), ChainProfile(three_state_generator, 0)):
            curve = volterra_solve(source, kappa, 5.0)
            index = np.arange(0, curve.values.size, 10)
            i, j = np.meshgrid(index, index)
            inside = i + j < curve.values.size
            joint = curve.values[(i + j)[inside]]
            product = curve.values[i[inside]] * curve.values[j[inside]]
            assert np.all(joint <= product * (1 + 5 * curve.step))

    def test_laplace_transform_identity(self, symmetrized_3d):
        """int e^(-lt) g dt = 1 / (l (1 - kappa f_hat(l))) for the d=3 difference walk."""
        kappa, lam, horizon = 0.5, 0.2, 100.0
        curve = volterra_solve(symmetrized_3d, kappa, horizon, 0.01)
        weights = np.exp(-lam * curve.times)
        body = integrate.simpson(weights * curve.values, x=curve.times)
        tail = curve.values[-1] * math.exp(-lam * horizon) / lam
        expected = 1.0 / (lam * (1.0 - kappa * laplace_f(symmetrized_3d, lam)))
        assert body + tail == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("horizon", [1.0, 5.0])
    @pytest.mark.parametrize("kappa", [-2.0, -0.5, 0.5, 2.0])
    def test_random_chains_match_oracle(self, kappa, horizon):
        """Ten random chains on at most five states agree with the matrix exponential."""
        rng = np.random.default_rng(17)
        for _ in range(10):
            size = int(rng.integers(2, 6))
            generator = rng.uniform(0.0, 1.0, (size, size))
            np.fill_diagonal(generator, 0.0)
            np.fill_diagonal(generator, -generator.sum(axis=1))
            curve = volterra_solve(ChainProfile(generator, 0), kappa, horizon)
            expected = exact_chain_moment(generator, 0, kappa, horizon)
            assert curve.values[-1] == pytest.approx(expected, rel=1e-6)


# =============================================================================
# FINITE CHAINS
# =============================================================================


class TestChain:
    """Tests for the matrix-exponential oracle and ChainProfile."""

    def test_two_state_value(self):
        """Documented two-state value."""
        value = exact_chain_moment([[-1, 1], [1, -1]], 0, 1.0, 1.0)
        assert value == pytest.approx(2.138292, abs=1e-6)

    def test_single_state_chain(self):
        """A one-state chain has L_t = t."""
        assert exact_chain_moment([[0.0]], 0, 1.5, 2.0) == pytest.approx(math.exp(3.0))

    def test_zero_time(self, three_state_generator):
        """E[exp(kappa L_0)] = 1."""
        assert exact_chain_moment(three_state_generator, 1, 3.0, 0.0) == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "table,message",
        [
            ([[-1, 1, 0]], "square"),
            ([[-1, 2], [1, -1]], "sum to 0"),
            ([[1, -1], [1, -1]], ">= 0"),
            ([[0.0] * 11 for _ in range(11)], "at most"),
        ],
    )
    def test_invalid_generators(self, table, message):
        """Malformed generators raise InvalidGenerator."""
        with pytest.raises(InvalidGenerator, match=message):
            validate_generator(table)

    def test_state_out_of_range(self, three_state_generator):
        """The distinguished state must exist."""
        with pytest.raises(ValueError, match="out of range"):
            exact_chain_moment(three_state_generator, 3, 1.0, 1.0)
        with pytest.raises(ValueError, match="out of range"):
            ChainProfile(three_state_generator, 5)

    def test_profile_uniform_grid_matches_pointwise(self, three_state_generator):
        """The repeated-multiplication path agrees with direct expm."""
        profile = ChainProfile(three_state_generator, 0)
        grid = np.linspace(0.0, 2.0, 21)
        pointwise = np.array([profile(float(t)) for t in grid])
        np.testing.assert_allclose(profile.values(grid), pointwise, rtol=1e-10)
        assert profile.values(grid)[0] == 1.0

    def test_recurrent_chain_green(self, three_state_generator):
        """Irreducible chains have infinite G."""
        profile = ChainProfile(three_state_generator, 0)
        assert math.isinf(profile.green())
        assert profile.critical_rate == 0.0

    def test_transient_state_green(self):
        """A state left forever at rate 2 has G = 1/2 and H = 1/4."""
        profile = ChainProfile([[-2.0, 2.0], [0.0, 0.0]], 0)
        assert profile.green() == pytest.approx(0.5)
        assert profile.green_moment() == pytest.approx(0.25)
        assert profile.laplace(1.0) == pytest.approx(1.0 / 3.0)

    def test_label(self, three_state_generator):
        """Labels record size and state."""
        assert ChainProfile(three_state_generator, 2).label == "chain:n=3,i=2"


# =============================================================================
# LYAPUNOV EXPONENTS
# =============================================================================


class TestLyapunovRate:
    """Tests for r(kappa) = f_hat^-1(1/kappa)."""

    def test_laplace_f(self, single_state):
        """f = 1 has f_hat(l) = 1/l."""
        assert laplace_f(single_state, 4.0) == 0.25
        with pytest.raises(ValueError):
            laplace_f(single_state, -1.0)

    def test_single_state_rate(self, single_state):
        """f = 1 gives r(kappa) = kappa."""
        assert lyapunov_rate(single_state, 1.7) == pytest.approx(1.7)

    def test_exponential_rate(self, exponential_return):
        """f = e^-t gives r(kappa) = kappa - 1 above kappa_cr = 1."""
        assert lyapunov_rate(exponential_return, 3.0) == pytest.approx(2.0, rel=1e-9)
        assert lyapunov_rate(exponential_return, 1.0) == 0.0
        assert lyapunov_rate(exponential_return, 0.5) == 0.0

    def test_recurrent_walk_has_positive_rate(self, laplacian_1d):
        """Recurrent walks grow for every kappa > 0."""
        rate = lyapunov_rate(laplacian_1d, 0.5)
        assert 0.0 < rate <= 0.5

    def test_one_dimensional_rate_closed_form(self, laplacian_1d):
        """For the 1-d walk f_hat(l) = 1/sqrt(l(l + 2)), so r solves r(r+2) = kappa^2."""
        kappa = 0.5
        expected = -1.0 + math.sqrt(1.0 + kappa**2)
        assert lyapunov_rate(laplacian_1d, kappa) == pytest.approx(expected, rel=1e-7)

    def test_subcritical_d3(self, symmetrized_3d):
        """Below kappa_cr the rate vanishes."""
        assert lyapunov_rate(symmetrized_3d, 1.0) == 0.0

    def test_rate_just_above_threshold(self, symmetrized_3d):
        """Slightly above kappa_cr the rate is small but positive."""
        rate = lyapunov_rate(symmetrized_3d, 1.33)
        assert 1e-5 < rate < 1e-3

    def test_unresolvable_rate_raises(self, symmetrized_3d):
        """A supercritical rate below the bracket floor is an error, never 0."""
        settings = LyapunovSettings(bracket_floor=1e-3)
        with pytest.raises(QuadratureNotConverged, match="bracket floor"):
            lyapunov_rate(symmetrized_3d, 1.33, settings=settings)

    def test_rejects_nonpositive_kappa(self, single_state):
        """kappa must be positive."""
        with pytest.raises(ValueError, match="kappa"):
            lyapunov_rate(single_state, 0.0)

    def test_chain_rate_matches_growth(self, three_state_generator):
        """r(kappa) is the growth rate of the oracle moment."""
        kappa = 1.0
        rate = lyapunov_rate(ChainProfile(three_state_generator, 0), kappa)
        t1, t2 = 20.0, 30.0
        g1 = exact_chain_moment(three_state_generator, 0, kappa, t1)
        g2 = exact_chain_moment(three_state_generator, 0, kappa, t2)
        assert rate == pytest.approx(math.log(g2 / g1) / (t2 - t1), rel=1e-6)


class TestLyapunovReport:
    """Tests for r(kappa) reports and property checks."""

    def test_exponential_report(self, exponential_return):
        """Linear rate r = kappa - 1 passes with a weak-convexity boundary case."""
        report = lyapunov_report(exponential_return, [0.5, 1.0, 2.0, 3.0, 4.0])
        assert report.kappa_cr == 1.0
        regimes = [p.regime for p in report.points]
        assert regimes[:2] == [LyapunovRegime.SUBCRITICAL, LyapunovRegime.CRITICAL]
        assert report.check("zero_below_critical").passed
        assert report.check("rate_bound").passed
        assert report.check("strictly_increasing").passed
        convex = report.check("strictly_convex")
        assert convex.boundary_case
        assert not convex.passed

    def test_recurrent_report(self, laplacian_1d):
        """r(kappa) of the 1-d walk is increasing and strictly convex."""
        report = lyapunov_report(laplacian_1d, [0.25, 0.5, 1.0, 2.0])
        assert report.kappa_cr == 0.0
        assert report.check("strictly_increasing").passed
        assert report.check("strictly_convex").passed
        assert all(p.prediction is not None for p in report.points)

    def test_property_checks_detect_violations(self):
        """A positive rate below kappa_cr and a rate above kappa fail."""
        points = [
            LyapunovPoint(kappa=0.5, rate=0.1, regime=LyapunovRegime.SUBCRITICAL),
            LyapunovPoint(kappa=2.0, rate=3.0, regime=LyapunovRegime.SUPERCRITICAL),
        ]
        checks = {c.name: c for c in rate_property_checks(points)}
        assert not checks["zero_below_critical"].passed
        assert not checks["rate_bound"].passed

    def test_report_check_lookup(self, exponential_return):
        """Unknown check names raise KeyError."""
        report = lyapunov_report(exponential_return, [2.0])
        with pytest.raises(KeyError):
            report.check("missing")


# =============================================================================
# ASYMPTOTICS
# =============================================================================


class TestRateAsymptotics:
    """Tests for closed-form predictions of r(kappa)."""

    def test_alpha_below_one(self):
        """alpha < 1 gives (c kappa Gamma(1 - alpha))^(1/(1 - alpha))."""
        c = 1.0 / math.sqrt(2 * math.pi)
        prediction = rate_asymptotics(c, 0.5, 0.1)
        expected = (c * 0.1 * math.gamma(0.5)) ** 2
        assert prediction.regime == "alpha<1"
        assert prediction.value == pytest.approx(expected)

    def test_alpha_one_exponent_only(self):
        """alpha = 1 only asserts the logarithmic exponent."""
        prediction = rate_asymptotics(0.5, 1.0, 0.2)
        assert prediction.exponent_only
        assert prediction.log_exponent == pytest.approx(-10.0)

    def test_alpha_above_two(self):
        """alpha > 2 gives (G^2/H)(kappa - kappa_cr)."""
        prediction = rate_asymptotics(1.0, 2.5, 1.1, green=1.0, green_moment=4.0)
        assert prediction.regime == "alpha>2"
        assert prediction.value == pytest.approx(0.025)

    def test_between_one_and_two(self):
        """1 < alpha < 2 uses G^2 (alpha - 1)/(c Gamma(2 - alpha))."""
        prediction = rate_asymptotics(1.0, 1.5, 1.1, green=1.0)
        base = 0.1 * 0.5 / math.gamma(0.5)
        assert prediction.value == pytest.approx(base**2)

    def test_alpha_two(self):
        """alpha = 2 carries the logarithmic correction."""
        prediction = rate_asymptotics(2.0, 2.0, 1.1, green=1.0)
        assert prediction.value == pytest.approx(0.5 * 0.1 / math.log(10.0))

    def test_mismatches(self):
        """Missing Green values or kappa below kappa_cr raise."""
        with pytest.raises(RegimeMismatch):
            rate_asymptotics(1.0, 1.5, 1.0)
        with pytest.raises(RegimeMismatch):
            rate_asymptotics(1.0, 1.5, 0.5, green=1.0)
        with pytest.raises(RegimeMismatch):
            rate_asymptotics(1.0, 2.5, 2.0, green=1.0, green_moment=math.inf)
        with pytest.raises(RegimeMismatch):
            rate_asymptotics(1.0, 0.5, -1.0)

    def test_classify_rate(self):
        """The boundary band is relative to kappa_cr."""
        assert classify_rate(1.0, 1.0) == LyapunovRegime.CRITICAL
        assert classify_rate(1.1, 1.0) == LyapunovRegime.SUPERCRITICAL
        assert classify_rate(0.9, 1.0) == LyapunovRegime.SUBCRITICAL
        assert classify_rate(0.1, 0.0) == LyapunovRegime.SUPERCRITICAL


class TestSubexpAsymptotics:
    """Tests for non-exponential growth of g."""

    def test_subcritical_limit(self):
        """0 < kappa < 1/G gives 1/(1 - kappa G)."""
        asym = subexp_asymptotics(None, None, 0.5, 1.0, None, SubexpRegime.SUBCRITICAL)
        assert asym.limit == pytest.approx(2.0)
        assert asym.is_constant

    def test_negative_transient(self):
        """kappa < 0 with alpha > 1 converges to 1/(1 - kappa G)."""
        asym = subexp_asymptotics(1.0, 1.5, -1.0, 2.0, None, "negative")
        assert asym.limit == pytest.approx(1.0 / 3.0)

    def test_negative_recurrent_power(self):
        """kappa < 0 with alpha < 1 decays like t^(alpha - 1)."""
        c = 1.0 / math.sqrt(2 * math.pi)
        asym = subexp_asymptotics(c, 0.5, -1.0, math.inf, math.inf, "negative")
        assert asym.power == -0.5
        expected = 1.0 / (c * math.gamma(0.5) ** 2)
        assert asym.prefactor == pytest.approx(expected)
        assert asym.limit == 0.0

    def test_negative_alpha_one(self):
        """alpha = 1 decays like 1/log t."""
        asym = subexp_asymptotics(0.5, 1.0, -2.0, math.inf, math.inf, "negative")
        assert asym.log_power == -1.0
        assert asym.evaluate(math.e) == pytest.approx(1.0)

    def test_critical_alpha_above_two(self):
        """At kappa_cr with alpha > 2, g grows like t/(kappa H)."""
        asym = subexp_asymptotics(1.0, 2.5, 0.5, 2.0, 4.0, "critical")
        assert asym.power == 1.0
        assert asym.evaluate(10.0) == pytest.approx(5.0)
        assert asym.limit is None

    def test_critical_between_one_and_two(self):
        """At kappa_cr with 1 < alpha < 2, g grows like t^(alpha - 1)."""
        asym = subexp_asymptotics(1.0, 1.5, 1.0, 1.0, math.inf, "critical")
        expected = 0.5 / (math.gamma(0.5) * math.gamma(1.5))
        assert asym.power == pytest.approx(0.5)
        assert asym.prefactor == pytest.approx(expected)

    def test_regime_mismatches(self):
        """Inconsistent parameters raise RegimeMismatch."""
        with pytest.raises(RegimeMismatch):
            subexp_asymptotics(None, None, 2.0, 1.0, None, "subcritical")
        with pytest.raises(RegimeMismatch):
            subexp_asymptotics(1.0, 1.5, 0.9, 1.0, None, "critical")
        with pytest.raises(RegimeMismatch):
            subexp_asymptotics(1.0, 1.5, 1.0, 1.0, None, "negative")
        with pytest.raises(RegimeMismatch):
            subexp_asymptotics(None, 0.5, -1.0, math.inf, None, "negative")

    def test_scaled(self):
        """Affine images keep the power and shift the limit."""
        asym = subexp_asymptotics(None, None, 0.5, 1.0, None, "subcritical")
        shifted = asym.scaled(-0.5, 1.5)
        assert shifted.limit == pytest.approx(0.5)
