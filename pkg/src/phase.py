"""Mixed-state geometric phase of the accelerated atom.

Four routes to the same number:
  - quadrature of -Omega * cos^2(theta_tau/2) over whole quasi-cycles,
  - the closed-form antiderivative F(phi),
  - the first-order expansion in gamma0/omega0,
  - the kinematic formula applied to any sampled Trajectory.

The + eigenvector is written sin(theta_tau/2)|+> + cos(theta_tau/2) e^{i Omega tau}|->,
so theta_tau starts at pi - theta and cos^2(theta_tau/2) = (1 - rho3/eta)/2.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import integrate

from src.bath import AtomBathParams, KossakowskiCoeffs, kossakowski, thermal_occupation
from src.dynamics import Trajectory
from src.errors import (
    ClosedFormDomainError,
    DegeneracyError,
    ParameterError,
    QuadratureError,
    UndersamplingError,
)

logger = logging.getLogger(__name__)

DEGENERACY_THRESHOLD = 1e-9
Q_MIN = 1e-8
QUADRATURE_TOLERANCE = 1e-12
LARGE_EXPONENT = 300.0
MIN_OVERLAP = 0.5
MIN_SAMPLES_PER_PERIOD = 200
MIN_REFERENCE_WEIGHT = 1e-3
FIRST_ORDER_WARN_RATIO = 1e-2
# Bound on the neglected second-order terms of the expansion, in units of A^2.
SECOND_ORDER_FACTOR = 2000.0


class PhaseMethod(str, Enum):
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed_form"
    FIRST_ORDER = "first_order"
    KINEMATIC = "kinematic"


@dataclass(frozen=True)
class PhaseResult:
    """Accumulated (unwrapped) geometric phase in radians."""

    gamma: float
    method: PhaseMethod
    horizon: float
    params: Optional[AtomBathParams] = None
    fallback: bool = False
    error_estimate: Optional[float] = None


@dataclass(frozen=True)
class EigenFrame:
    lambda_plus: float
    lambda_minus: float
    theta_tau: float

    @property
    def eta(self) -> float:
        return self.lambda_plus - self.lambda_minus

    @property
    def cos_sq_half(self) -> float:
        return math.cos(0.5 * self.theta_tau) ** 2


@dataclass(frozen=True)
class PhaseDifference:
    """delta_a = gamma_a - gamma_I over one quasi-cycle."""

    first_order: float
    exact: float
    params: AtomBathParams


def _sin_sq(theta: float) -> float:
    """sin^2(theta), exactly zero at theta = 0 and theta = pi."""
    c = math.cos(theta)
    return (1.0 - c) * (1.0 + c)


def cycle_horizon(coeffs: KossakowskiCoeffs, periods: int = 1) -> float:
    """T = 2 pi periods / Omega; makes the endpoint overlap real and positive."""
    return 2.0 * math.pi * periods / coeffs.Omega


def unitary_phase(theta: float, periods: int = 1) -> float:
    """Isolated-atom phase -pi (1 - cos theta) per cycle."""
    return -math.pi * (1.0 - math.cos(theta)) * periods


def wrapped_difference(first: float, second: float) -> float:
    """first - second reduced to [-pi, pi)."""
    return (first - second + math.pi) % (2.0 * math.pi) - math.pi


def _bloch_z_and_transverse(tau_bar: float, theta: float, coeffs: KossakowskiCoeffs):
    """rho3 and the squared transverse length e^{-4(2A+C) tau} sin^2 theta."""
    if coeffs.unitary:
        return math.cos(theta), _sin_sq(theta)
    rho3 = math.exp(-4.0 * coeffs.A * tau_bar) * math.cos(theta) + coeffs.R * math.expm1(
        -4.0 * coeffs.A * tau_bar
    )
    transverse_sq = math.exp(-4.0 * (2.0 * coeffs.A + coeffs.C) * tau_bar) * _sin_sq(theta)
    return rho3, transverse_sq


def eigenframe(tau_bar: float, theta: float, coeffs: KossakowskiCoeffs) -> EigenFrame:
    """Eigenvalues (1 +- eta)/2 and the mixing angle of the + eigenvector.

    tan(theta_tau/2) = sqrt((eta + rho3)/(eta - rho3)), theta_tau in [0, pi].
    """
    rho3, transverse_sq = _bloch_z_and_transverse(tau_bar, theta, coeffs)
    eta = math.sqrt(rho3 * rho3 + transverse_sq)
    if eta < DEGENERACY_THRESHOLD:
        raise DegeneracyError(
            f"state is maximally mixed at tau_bar={tau_bar:.6g} (eta={eta:.3e})", eta=eta
        )
    # eta^2 - rho3^2 = transverse_sq; divide instead of subtracting nearly equal numbers
    if rho3 >= 0:
        plus = eta + rho3
        minus = transverse_sq / plus
    else:
        minus = eta - rho3
        plus = transverse_sq / minus
    theta_tau = 2.0 * math.atan2(math.sqrt(plus), math.sqrt(minus))
    return EigenFrame(0.5 * (1.0 + eta), 0.5 * (1.0 - eta), theta_tau)


def phase_integrand(tau_bar: float, theta: float, coeffs: KossakowskiCoeffs) -> float:
    """(1/2)(1 - p / sqrt(u sin^2 theta + p^2)) with u = e^{4A tau}, p = cos theta - R (u - 1).

    Equal to cos^2(theta_tau/2). Beyond 4A tau = 300 the e^{-4A tau}-scaled
    form is used so u^2 never overflows.
    """
    sin_sq = _sin_sq(theta)
    exponent = 4.0 * coeffs.A * tau_bar
    if coeffs.unitary:
        u, p = 1.0, math.cos(theta)
    elif exponent <= LARGE_EXPONENT:
        u = math.exp(exponent)
        p = math.cos(theta) - coeffs.R * math.expm1(exponent)
    else:
        u = 1.0
        sin_sq *= math.exp(-exponent)
        p = math.cos(theta) * math.exp(-exponent) - coeffs.R * (-math.expm1(-exponent))

    norm = math.sqrt(u * sin_sq + p * p)
    # eta = norm / u
    if norm < DEGENERACY_THRESHOLD * u:
        raise DegeneracyError(f"state is maximally mixed at tau_bar={tau_bar:.6g}", eta=norm / u)
    if p > 0:
        return 0.5 * u * sin_sq / (norm * (norm + p))
    return 0.5 * (norm - p) / norm


def _validate_periods(periods: int, minimum: int) -> None:
    if int(periods) != periods or periods < minimum:
        raise ParameterError(f"periods must be an integer >= {minimum}, got {periods}")


def _quadrature_gamma(theta: float, coeffs: KossakowskiCoeffs, periods: int):
    period = cycle_horizon(coeffs)
    total, error_total = 0.0, 0.0
    for k in range(periods):
        result = integrate.quad(
            phase_integrand,
            k * period,
            (k + 1) * period,
            args=(theta, coeffs),
            epsabs=QUADRATURE_TOLERANCE / periods,
            epsrel=0.0,
            limit=200,
            full_output=1,
        )
        value, error = result[0], result[1]
        if len(result) > 3:
            raise QuadratureError(f"quadrature failed on period {k}: {result[3]}", error)
        total += value
        error_total += error
    return -coeffs.Omega * total, coeffs.Omega * error_total


def phase_quadrature(params: AtomBathParams, periods: int = 1) -> PhaseResult:
    """-Omega * integral of cos^2(theta_tau/2) over whole quasi-cycles."""
    _validate_periods(periods, 1)
    coeffs = kossakowski(params)
    gamma, error = _quadrature_gamma(params.theta, coeffs, periods)
    return PhaseResult(
        gamma=gamma,
        method=PhaseMethod.QUADRATURE,
        horizon=cycle_horizon(coeffs, periods),
        params=params,
        error_estimate=error,
    )


def _closed_form_constants(theta: float, coeffs: KossakowskiCoeffs):
    if coeffs.unitary or coeffs.A <= 0 or coeffs.R <= 0:
        raise ClosedFormDomainError("closed form needs A > 0 and R > 0")
    q = coeffs.R + math.cos(theta)
    if abs(q) < Q_MIN:
        raise ClosedFormDomainError(f"|Q| = {abs(q):.3e} below {Q_MIN}; sgn(Q) is undefined")
    b = 1.0 - q * q - coeffs.R * coeffs.R
    return q, b


def antiderivative(phi: float, theta: float, coeffs: KossakowskiCoeffs) -> float:
    """F(phi) such that gamma = Omega [F(T) - F(0)].

    Direct evaluation; cancels badly for small A. phase_closed_form uses
    antiderivative_increment instead.
    """
    q, b = _closed_form_constants(theta, coeffs)
    A, R = coeffs.A, coeffs.R
    u = math.exp(4.0 * A * phi)
    s = math.sqrt(R * R * u * u + b * u + q * q)
    first = (b + 2.0 * R * R * u) / (2.0 * R) + s
    second = b + (2.0 * q * q + 2.0 * abs(q) * s) / u
    if first <= 0 or second <= 0:
        raise ClosedFormDomainError(f"non-positive logarithm argument at phi={phi}")
    return -0.5 * phi - (math.log(first) + math.copysign(1.0, q) * math.log(second)) / (8.0 * A)


def antiderivative_increment(phi0: float, phi1: float, theta: float, coeffs: KossakowskiCoeffs) -> float:
    """F(phi1) - F(phi0) with every difference formed analytically (expm1/log1p)."""
    q, b = _closed_form_constants(theta, coeffs)
    A, R = coeffs.A, coeffs.R
    span = phi1 - phi0

    u0 = math.exp(4.0 * A * phi0)
    du = u0 * math.expm1(4.0 * A * span)
    u1 = u0 + du
    v0 = 1.0 / u0
    dv = v0 * math.expm1(-4.0 * A * span)
    v1 = v0 + dv

    s0 = math.sqrt(R * R * u0 * u0 + b * u0 + q * q)
    s1 = math.sqrt(R * R * u1 * u1 + b * u1 + q * q)
    ds = du * (R * R * (u0 + u1) + b) / (s0 + s1)

    first0 = (b + 2.0 * R * R * u0) / (2.0 * R) + s0
    d_first = R * du + ds
    second0 = b + 2.0 * q * q * v0 + 2.0 * abs(q) * s0 * v0
    d_second = 2.0 * q * q * dv + 2.0 * abs(q) * (ds * v1 + s0 * dv)

    ratio_first, ratio_second = d_first / first0 if first0 > 0 else -2.0, d_second / second0 if second0 > 0 else -2.0
    if first0 <= 0 or second0 <= 0 or ratio_first <= -1.0 or ratio_second <= -1.0:
        raise ClosedFormDomainError(f"non-positive logarithm argument on [{phi0}, {phi1}]")
    logs = math.log1p(ratio_first) + math.copysign(1.0, q) * math.log1p(ratio_second)
    return -0.5 * span - logs / (8.0 * A)


def phase_closed_form(params: AtomBathParams, periods: int = 1) -> PhaseResult:
    """Omega [F(T) - F(0)], summed period by period.

    Falls back to quadrature (fallback=True) in the unitary branch, for
    |Q| < Q_MIN, or on any log-domain violation.
    """
    _validate_periods(periods, 0)
    coeffs = kossakowski(params)
    horizon = cycle_horizon(coeffs, periods)
    if periods == 0:
        return PhaseResult(0.0, PhaseMethod.CLOSED_FORM, 0.0, params)

    period = cycle_horizon(coeffs)
    try:
        total = sum(
            antiderivative_increment(k * period, (k + 1) * period, params.theta, coeffs)
            for k in range(periods)
        )
    except ClosedFormDomainError as e:
        logger.info(f"Closed form unavailable ({e}); falling back to quadrature")
        gamma, error = _quadrature_gamma(params.theta, coeffs, periods)
        return PhaseResult(gamma, PhaseMethod.CLOSED_FORM, horizon, params, fallback=True, error_estimate=error)
    return PhaseResult(coeffs.Omega * total, PhaseMethod.CLOSED_FORM, horizon, params)


def first_order_difference(params: AtomBathParams) -> float:
    """delta_a to first order in gamma0/omega0 (one quasi-cycle)."""
    c = math.cos(params.theta)
    abar_sq = params.abar * params.abar
    planck = 2.0 * thermal_occupation(params.abar)
    bracket = abar_sq * (2.0 + c) + (1.0 + abar_sq) * planck * c
    return -math.pi ** 2 * 0.5 * params.gamma_ratio * bracket * _sin_sq(params.theta)


def phase_first_order(params: AtomBathParams) -> PhaseResult:
    """First-order expansion of the one-cycle phase.

    abar = 0 reduces to the inertial form
    -pi (1 - cos theta) - pi^2 (gamma0/2 omega0)(2 + cos theta) sin^2 theta.
    """
    if params.gamma_ratio > FIRST_ORDER_WARN_RATIO:
        logger.warning(
            f"gamma_ratio={params.gamma_ratio:g} is not small; the first-order expansion is unreliable"
        )
    c = math.cos(params.theta)
    abar_sq = params.abar * params.abar
    planck = 2.0 * thermal_occupation(params.abar)
    correction = (
        -math.pi ** 2
        * 0.5
        * params.gamma_ratio
        * _sin_sq(params.theta)
        * (1.0 + abar_sq)
        * (2.0 + c + planck * c)
    )
    return PhaseResult(
        gamma=unitary_phase(params.theta) + correction,
        method=PhaseMethod.FIRST_ORDER,
        horizon=2.0 * math.pi,
        params=params,
    )


def first_order_tolerance(coeffs: KossakowskiCoeffs) -> float:
    """Expected size of the terms the first-order expansion drops, in rad."""
    return 1e-9 + SECOND_ORDER_FACTOR * coeffs.A * coeffs.A


def phase_difference(params: AtomBathParams) -> PhaseDifference:
    """First-order and exact (quadrature) accelerated-minus-inertial phase."""
    accelerated = phase_quadrature(params, 1).gamma
    inertial = phase_quadrature(params.with_abar(0.0), 1).gamma
    return PhaseDifference(
        first_order=first_order_difference(params),
        exact=accelerated - inertial,
        params=params,
    )


def _plus_eigenvectors(trajectory: Trajectory) -> np.ndarray:
    values, vectors = np.linalg.eigh(trajectory.matrices())
    gaps = values[:, 1] - values[:, 0]
    worst = int(np.argmin(gaps))
    if gaps[worst] < DEGENERACY_THRESHOLD:
        raise DegeneracyError(
            f"degenerate eigenvalues at tau_bar={trajectory.tau_bar[worst]:.6g}", eta=float(gaps[worst])
        )
    # eigh sorts ascending; the last column belongs to lambda_+
    return vectors[:, :, 1]


def _reference_component(vectors: np.ndarray) -> int:
    # excited-state component unless it (nearly) vanishes somewhere
    reach = np.min(np.abs(vectors), axis=0)
    return 0 if reach[0] >= MIN_REFERENCE_WEIGHT else int(np.argmax(reach))


def _discrete_phase(tau_bar: np.ndarray, vectors: np.ndarray, reference: int) -> float:
    """arg<phi_0|phi_N> - sum_k arg<phi_k|phi_{k+1}> with phi_k[reference] real and positive."""
    anchor = vectors[:, reference]
    weight = np.abs(anchor)
    rotation = np.divide(anchor.conj(), weight, out=np.ones_like(anchor), where=weight > 0.0)
    gauged = vectors * rotation[:, None]
    overlaps = np.einsum("ki,ki->k", gauged[:-1].conj(), gauged[1:])
    magnitudes = np.abs(overlaps)
    worst = int(np.argmin(magnitudes))
    if magnitudes[worst] < MIN_OVERLAP:
        raise UndersamplingError(
            f"eigenvector jumps between tau_bar={tau_bar[worst]:.6g} and the next sample "
            f"(overlap {magnitudes[worst]:.3f})"
        )
    # each step phase is O(h); np.sum adds them pairwise
    endpoint = np.angle(np.vdot(gauged[0], gauged[-1]))
    return float(endpoint - np.sum(np.angle(overlaps)))


def phase_kinematic(
    trajectory: Trajectory, params: Optional[AtomBathParams] = None, extrapolate: bool = True
) -> PhaseResult:
    """Kinematic phase arg<phi(0)|phi(T)> - sum_k arg<phi_k|phi_{k+1}> of the + eigenvector.

    lambda_-(0) = 0, so only the + branch contributes. Each eigenvector is
    put in the gauge where one fixed basis component is real and positive,
    which keeps every step phase small and the accumulated phase continuous.

    The discrete sum misses the continuous phase by c2 h^2 + c4 h^4 + ...
    With extrapolate (and an even number of steps that still resolves a
    period at half the rate) the every-other-sample estimate removes the
    h^2 term: gamma = gamma_h + (gamma_h - gamma_2h) / 3, and
    error_estimate holds |gamma_h - gamma_2h| / 3.

    The formula only fixes gamma modulo 2 pi. The branch is the one that
    is continuous in theta and agrees with quadrature, -2 pi at theta = pi.
    """
    omega = trajectory.coeffs.Omega
    steps = len(trajectory) - 1
    periods_covered = trajectory.tau_end * omega / (2.0 * math.pi)
    samples_per_period = steps / max(periods_covered, 1e-300)
    if samples_per_period < MIN_SAMPLES_PER_PERIOD:
        raise UndersamplingError(
            f"{samples_per_period:.0f} samples per period; need at least {MIN_SAMPLES_PER_PERIOD}"
        )

    vectors = _plus_eigenvectors(trajectory)
    reference = _reference_component(vectors)
    gamma = _discrete_phase(trajectory.tau_bar, vectors, reference)

    error_estimate = None
    if extrapolate and steps % 2 == 0 and samples_per_period / 2 >= MIN_SAMPLES_PER_PERIOD:
        coarse = _discrete_phase(trajectory.tau_bar[::2], vectors[::2], reference)
        correction = wrapped_difference(gamma, coarse) / 3.0
        gamma += correction
        error_estimate = abs(correction)
    elif extrapolate:
        logger.debug(f"Kinematic phase not extrapolated: {steps} steps, {samples_per_period:.0f} per period")

    if reference != 0:
        # the ground-state gauge winds once more per period than the excited one
        gamma -= 2.0 * math.pi * round(periods_covered)

    logger.debug(
        f"Kinematic phase over {len(trajectory)} samples: gamma={gamma:.12f}, reference component {reference}"
    )
    return PhaseResult(
        gamma=gamma,
        method=PhaseMethod.KINEMATIC,
        horizon=trajectory.tau_end,
        params=params,
        error_estimate=error_estimate,
    )
