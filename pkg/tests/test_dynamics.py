"""Unit tests for the density-matrix dynamics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.bath import AtomBathParams, kossakowski
from src.dynamics import (
    BlochVector,
    DensityMatrix,
    Trajectory,
    bloch_roundtrip,
    closed_form_trajectory,
    from_bloch,
    integrate_lindblad,
    lindblad_generator,
    lindblad_rhs,
    liouvillian,
    rho_closed_form,
    stationary_state,
    to_bloch,
    trajectory_rows,
)
from src.errors import ParameterError, PositivityError

TWO_PI = 2.0 * math.pi


def _coeffs(gamma_ratio=1e-6, abar=4.0, theta=1.0):
    return kossakowski(AtomBathParams(gamma_ratio, abar, theta))


class TestDensityMatrix:
    """Test the state containers."""

    def test_pure_state(self):
        """Test the initial state at theta = pi/2."""
        state = DensityMatrix.pure(math.pi / 2)
        assert state.rho_ee == pytest.approx(0.5)
        assert state.coh == pytest.approx(0.5)
        assert state.purity == pytest.approx(1.0)

    def test_excited_and_ground(self):
        """Test the poles of the Bloch sphere."""
        assert DensityMatrix.pure(0.0).rho_ee == 1.0
        assert DensityMatrix.pure(math.pi).rho_ee == pytest.approx(0.0, abs=1e-30)

    def test_matrix_is_hermitian_with_unit_trace(self):
        """Test the full 2x2 matrix."""
        matrix = DensityMatrix(0.3, 0.1 - 0.2j).matrix()
        assert np.allclose(matrix, matrix.conj().T)
        assert np.trace(matrix).real == pytest.approx(1.0)
        assert DensityMatrix.from_matrix(matrix) == DensityMatrix(0.3, 0.1 - 0.2j)

    def test_positivity(self):
        """Test the positivity margin and slack."""
        assert DensityMatrix(0.5, 0.5).is_positive(slack=1e-12)
        assert not DensityMatrix(0.5, 0.6).is_positive()
        assert DensityMatrix(0.5, 0.0).positivity_margin() == pytest.approx(0.25)

    def test_bloch_conventions(self):
        """Test r = (2 Re coh, -2 Im coh, 2 rho_ee - 1)."""
        vector = to_bloch(DensityMatrix(0.75, 0.1 + 0.2j))
        assert vector.r1 == pytest.approx(0.2)
        assert vector.r2 == pytest.approx(-0.4)
        assert vector.r3 == pytest.approx(0.5)
        assert from_bloch(BlochVector(0.0, 0.0, -1.0)).rho_ee == 0.0

    @given(
        r1=st.floats(min_value=-0.5, max_value=0.5),
        r2=st.floats(min_value=-0.5, max_value=0.5),
        r3=st.floats(min_value=-0.5, max_value=0.5),
    )
    def test_bloch_roundtrip(self, r1, r2, r3):
        """Test that density -> Bloch -> density preserves the state."""
        state = BlochVector(r1, r2, r3).to_density()
        vector, back = bloch_roundtrip(state)
        assert vector.length <= 1.0
        assert back.rho_ee == pytest.approx(state.rho_ee, abs=1e-15)
        assert back.coh == pytest.approx(state.coh, abs=1e-15)


class TestClosedForm:
    """Test the exact solution."""

    @pytest.mark.parametrize("theta", [0.0, 0.8, math.pi / 2, 2.2, math.pi])
    def test_initial_condition(self, theta):
        """Test that tau = 0 returns the pure state."""
        state = rho_closed_form(0.0, theta, _coeffs())
        pure = DensityMatrix.pure(theta)
        assert state.rho_ee == pytest.approx(pure.rho_ee, abs=1e-16)
        assert state.coh == pytest.approx(pure.coh, abs=1e-16)

    def test_negative_time_rejected(self):
        """Test the tau >= 0 precondition."""
        with pytest.raises(ParameterError):
            rho_closed_form(-1.0, 1.0, _coeffs())

    def test_unitary_precession(self):
        """Test free precession when the coupling is zero."""
        coeffs = _coeffs(gamma_ratio=0.0)
        state = rho_closed_form(1.3, math.pi / 2, coeffs)
        assert state.rho_ee == pytest.approx(0.5)
        assert state.coh == pytest.approx(0.5 * complex(math.cos(1.3), -math.sin(1.3)))
        assert state.purity == pytest.approx(1.0)

    def test_approaches_stationary_state(self):
        """Test relaxation to r3 = -R with no coherence."""
        coeffs = _coeffs(gamma_ratio=1e-2, abar=2.0)
        late = rho_closed_form(5000.0, 0.7, coeffs)
        fixed = stationary_state(coeffs)
        assert late.rho_ee == pytest.approx(fixed.rho_ee, abs=1e-12)
        assert abs(late.coh) < 1e-12
        assert fixed.bloch().r3 == pytest.approx(-coeffs.R)

    def test_unitary_has_no_stationary_state(self):
        """Test that the unitary branch is rejected."""
        with pytest.raises(ParameterError):
            stationary_state(_coeffs(gamma_ratio=0.0))

    def test_headline_excitation_shift(self):
        """Test the population after one cycle at theta = pi/2, abar = 4."""
        coeffs = _coeffs()
        state = rho_closed_form(TWO_PI, math.pi / 2, coeffs)
        decay = math.exp(-4.0 * coeffs.A * TWO_PI)
        expected = 0.5 * decay + 0.5 * (coeffs.R - 1.0) * (decay - 1.0)
        assert state.rho_ee == pytest.approx(expected, rel=1e-12)

    @given(
        tau_bar=st.floats(min_value=0.0, max_value=1e4),
        theta=st.floats(min_value=0.0, max_value=math.pi),
        abar=st.floats(min_value=0.0, max_value=20.0),
        gamma_ratio=st.floats(min_value=0.0, max_value=1e-2),
    )
    @settings(max_examples=200, deadline=None)
    def test_state_stays_physical(self, tau_bar, theta, abar, gamma_ratio):
        """Test trace, Hermiticity and positivity for all parameters."""
        coeffs = kossakowski(AtomBathParams(gamma_ratio, abar, theta))
        state = rho_closed_form(tau_bar, theta, coeffs)
        assert state.is_positive(slack=1e-12)
        assert state.purity <= 1.0 + 1e-12

    @pytest.mark.parametrize("abar", [0.0, 2.0, 10.0])
    def test_coherence_decays_monotonically(self, abar):
        """Test that |coh| never grows along a trajectory."""
        coeffs = _coeffs(gamma_ratio=1e-2, abar=abar)
        trajectory = closed_form_trajectory(1.0, coeffs, 3 * TWO_PI, 3000)
        magnitudes = np.abs(trajectory.coh)
        assert np.all(np.diff(magnitudes) <= 1e-15)
        assert magnitudes[-1] < magnitudes[0]

    def test_inertial_excited_state_decays(self):
        """Test rho_ee = exp(-gamma0 tau / omega0) from |+> at abar = 0."""
        gamma_ratio = 1e-2
        coeffs = _coeffs(gamma_ratio=gamma_ratio, abar=0.0)
        for tau_bar in (0.0, 3.0, 50.0):
            state = rho_closed_form(tau_bar, 0.0, coeffs)
            assert state.rho_ee == pytest.approx(math.exp(-gamma_ratio * tau_bar), rel=1e-12)
            assert state.coh == 0

    def test_trajectory_sampling(self):
        """Test the vectorized sampler against pointwise evaluation."""
        coeffs = _coeffs(gamma_ratio=1e-3)
        trajectory = closed_form_trajectory(0.8, coeffs, TWO_PI, 100)
        assert len(trajectory) == 101
        assert trajectory.tau_end == pytest.approx(TWO_PI)
        tau, state = trajectory.samples[37]
        expected = rho_closed_form(tau, 0.8, coeffs)
        assert state.rho_ee == pytest.approx(expected.rho_ee, abs=1e-15)
        assert state.coh == pytest.approx(expected.coh, abs=1e-15)

    def test_trajectory_needs_positive_horizon(self):
        """Test the sampler preconditions."""
        with pytest.raises(ParameterError):
            closed_form_trajectory(0.8, _coeffs(), 0.0, 10)


class TestGenerator:
    """Test the master-equation generator."""

    def test_trace_preserving_and_hermitian(self):
        """Test that the generator output is traceless and Hermitian."""
        coeffs = _coeffs(gamma_ratio=1e-2, abar=3.0)
        matrix = DensityMatrix(0.6, 0.2 + 0.3j).matrix()
        derivative = lindblad_generator(matrix, coeffs)
        assert abs(np.trace(derivative)) < 1e-15
        assert np.allclose(derivative, derivative.conj().T, atol=1e-15)

    def test_matches_closed_form_rates(self):
        """Test dr3/dt = -4A r3 - 4B and dcoh/dt = (-2(2A+C) - i Omega) coh."""
        coeffs = _coeffs(gamma_ratio=1e-2, abar=3.0)
        state = DensityMatrix(0.6, 0.2 + 0.3j)
        rhs = lindblad_rhs(state, coeffs)
        r3 = state.bloch().r3
        assert 2.0 * rhs.d_rho_ee == pytest.approx(-4.0 * coeffs.A * r3 - 4.0 * coeffs.B, rel=1e-12)
        expected_coh = (-2.0 * (2.0 * coeffs.A + coeffs.C) - 1j * coeffs.Omega) * state.coh
        assert rhs.d_coh == pytest.approx(expected_coh, rel=1e-12)

    @pytest.mark.parametrize("tau_bar", [0.3, 2.0, 7.5])
    @pytest.mark.parametrize("abar", [0.0, 4.0])
    def test_closed_form_solves_master_equation(self, tau_bar, abar):
        """Test that a central difference of the closed form matches the generator."""
        coeffs = _coeffs(gamma_ratio=1e-2, abar=abar)
        step = 1e-4
        later = rho_closed_form(tau_bar + step, 0.8, coeffs)
        earlier = rho_closed_form(tau_bar - step, 0.8, coeffs)
        rhs = lindblad_rhs(rho_closed_form(tau_bar, 0.8, coeffs), coeffs)
        assert (later.rho_ee - earlier.rho_ee) / (2 * step) == pytest.approx(rhs.d_rho_ee, abs=1e-8)
        assert (later.coh - earlier.coh) / (2 * step) == pytest.approx(rhs.d_coh, abs=1e-8)

    def test_inertial_excited_decay_rate(self):
        """Test d rho_ee / d tau = -(gamma0/omega0) rho_ee for the excited state at rest."""
        gamma_ratio = 1e-2
        coeffs = _coeffs(gamma_ratio=gamma_ratio, abar=0.0)
        excited = DensityMatrix.pure(0.0)
        rhs = lindblad_rhs(excited, coeffs)
        assert rhs.d_rho_ee == pytest.approx(-gamma_ratio * excited.rho_ee, rel=1e-12)
        assert rhs.d_coh == 0

    def test_liouvillian_matches_generator(self):
        """Test the superoperator against direct application."""
        coeffs = _coeffs(gamma_ratio=1e-2, abar=1.0)
        matrix = DensityMatrix(0.3, -0.1 + 0.25j).matrix()
        direct = lindblad_generator(matrix, coeffs).reshape(4)
        assert np.allclose(liouvillian(coeffs) @ matrix.reshape(4), direct, atol=1e-16)


class TestRungeKutta:
    """Test the RK4 oracle."""

    @pytest.mark.parametrize("theta,abar", [(0.2, 0.0), (math.pi / 2, 4.0), (2.9, 10.0)])
    def test_matches_closed_form(self, theta, abar):
        """Test the endpoint after one cycle at 10^4 steps."""
        coeffs = _coeffs(abar=abar, theta=theta)
        trajectory = integrate_lindblad(theta, coeffs, TWO_PI, 10_000)
        endpoint = trajectory.state(len(trajectory) - 1)
        expected = rho_closed_form(TWO_PI, theta, coeffs)
        assert abs(endpoint.rho_ee - expected.rho_ee) < 1e-10
        assert abs(endpoint.coh - expected.coh) < 1e-10

    @pytest.mark.slow
    @pytest.mark.parametrize("theta", [0.2, 0.8, math.pi / 2, 2.2, 2.9])
    @pytest.mark.parametrize("abar", [0.0, 0.5, 1.0, 4.0, 10.0])
    def test_matches_closed_form_full_grid(self, theta, abar):
        """Test the endpoint on the whole (theta, abar) grid."""
        coeffs = _coeffs(abar=abar, theta=theta)
        trajectory = integrate_lindblad(theta, coeffs, TWO_PI, 10_000)
        closed = closed_form_trajectory(theta, coeffs, TWO_PI, 10_000)
        assert trajectory.max_deviation(closed) < 1e-10

    def test_fourth_order_convergence(self):
        """Test that halving the step cuts the error by about 16."""
        coeffs = _coeffs(gamma_ratio=1e-2, abar=1.0)
        expected = rho_closed_form(TWO_PI, 0.8, coeffs)

        def endpoint_error(steps):
            state = integrate_lindblad(0.8, coeffs, TWO_PI, steps).state(steps)
            return max(abs(state.rho_ee - expected.rho_ee), abs(state.coh - expected.coh))

        ratio = endpoint_error(100) / endpoint_error(200)
        assert 12.0 < ratio < 20.0

    def test_long_time_cross_check(self):
        """Test agreement well into the relaxation regime."""
        coeffs = _coeffs(gamma_ratio=1e-2, abar=2.0)
        tau_end = 400.0
        trajectory = integrate_lindblad(1.1, coeffs, tau_end, 80_000)
        closed = closed_form_trajectory(1.1, coeffs, tau_end, 80_000)
        assert trajectory.max_deviation(closed) < 1e-9

    def test_too_few_steps_rejected(self):
        """Test the minimum step count."""
        with pytest.raises(ParameterError):
            integrate_lindblad(1.0, _coeffs(), TWO_PI, 50)

    def test_positivity_violation_beyond_slack_raises(self):
        """Test that a margin below -slack is reported with its time."""
        with pytest.raises(PositivityError) as exc_info:
            integrate_lindblad(0.0, _coeffs(), TWO_PI, 100, slack=-1.0)
        # the excited state sits exactly on the boundary at tau = 0
        assert exc_info.value.tau_bar == 0.0
        assert exc_info.value.violation == 0.0

    def test_coarse_step_warns(self, caplog):
        """Test the step-size warning."""
        integrate_lindblad(1.0, _coeffs(), 100.0, 200)
        assert "exceeds" in caplog.text


class TestTrajectory:
    """Test the Trajectory container and CSV rows."""

    def test_rejects_non_uniform_samples(self):
        """Test uniform spacing is enforced."""
        tau = np.array([0.0, 1.0, 3.0])
        with pytest.raises(ParameterError):
            Trajectory(tau, np.ones(3), np.zeros(3, dtype=complex), 1.0, 0.0, _coeffs())

    def test_rejects_single_sample(self):
        """Test that at least two samples are needed."""
        with pytest.raises(ParameterError):
            Trajectory(np.array([0.0]), np.ones(1), np.zeros(1, dtype=complex), 1.0, 0.0, _coeffs())

    def test_rows_without_oracle(self):
        """Test the CSV columns for the closed form alone."""
        trajectory = closed_form_trajectory(math.pi / 2, _coeffs(abar=0.0), TWO_PI, 1000)
        header, rows = trajectory_rows(trajectory)
        assert header == ["tau_bar", "rho_ee", "re_coh", "im_coh", "r1", "r2", "r3"]
        assert len(rows) == 1001
        assert rows[0][1] == pytest.approx(0.5)

    def test_rows_with_oracle(self):
        """Test that RK4 columns are appended."""
        coeffs = _coeffs()
        trajectory = closed_form_trajectory(1.0, coeffs, TWO_PI, 1000)
        oracle = integrate_lindblad(1.0, coeffs, TWO_PI, 1000)
        header, rows = trajectory_rows(trajectory, oracle)
        assert header[-3:] == ["rk4_rho_ee", "rk4_re_coh", "rk4_im_coh"]
        assert all(len(row) == 10 for row in rows)
        assert trajectory.max_deviation(oracle) < 1e-10
