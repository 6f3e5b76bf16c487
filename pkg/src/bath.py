"""Vacuum electromagnetic bath seen by a uniformly accelerated atom.

Everything here is in natural units: frequencies and rates in units of the
bare level spacing omega0, proper time as tau_bar = omega0 * tau, acceleration
as abar = a / (c * omega0), spectral values in units of the spontaneous
emission rate gamma0.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy import integrate

from src.errors import BathDomainError, ParameterError

logger = logging.getLogger(__name__)

# Normalization of the correlation function so that its Fourier transform is
# exactly spectral_density (FT of 1/(tau - i eps)^4 is (pi/3) lambda^3).
CORRELATION_NORMALIZATION = 3.0 / math.pi
# cosh and sinh overflow a double beyond this
MAX_RAPIDITY = 710.0


@dataclass(frozen=True)
class AtomBathParams:
    """Dimensionless inputs of one atom + bath configuration."""

    gamma_ratio: float
    abar: float
    theta: float
    omega_shift: float = 0.0

    def __post_init__(self):
        errors = []
        if not math.isfinite(self.gamma_ratio) or self.gamma_ratio < 0:
            errors.append(f"gamma_ratio must be >= 0, got {self.gamma_ratio}")
        if not math.isfinite(self.abar) or self.abar < 0:
            errors.append(f"abar must be >= 0, got {self.abar}")
        if not math.isfinite(self.theta) or not 0.0 <= self.theta <= math.pi:
            errors.append(f"theta must lie in [0, pi], got {self.theta}")
        if not math.isfinite(self.omega_shift) or self.omega_shift <= -1.0:
            errors.append(f"omega_shift must be > -1, got {self.omega_shift}")
        if errors:
            raise ParameterError("; ".join(errors))

    @property
    def unitary(self) -> bool:
        return self.gamma_ratio == 0.0

    def with_abar(self, abar: float) -> "AtomBathParams":
        return AtomBathParams(self.gamma_ratio, abar, self.theta, self.omega_shift)

    def with_theta(self, theta: float) -> "AtomBathParams":
        return AtomBathParams(self.gamma_ratio, self.abar, theta, self.omega_shift)


@dataclass(frozen=True)
class KossakowskiCoeffs:
    """Rates A, B, C (units of omega0), R = B/A and the effective spacing Omega.

    In the unitary branch all rates are zero and R keeps the bath value
    tanh(pi/abar) so reports stay informative.
    """

    A: float
    B: float
    C: float
    R: float
    Omega: float = 1.0
    unitary: bool = False

    @classmethod
    def from_spectrum(cls, params: AtomBathParams) -> "KossakowskiCoeffs":
        """Build A and B from the quarter sum/difference of G(+-omega0)."""
        omega = 1.0 + params.omega_shift
        if params.unitary:
            return cls(0.0, 0.0, 0.0, _bath_ratio(params.abar), omega, unitary=True)

        if params.abar == 0.0:
            g_plus, g_minus = inertial_limit(1.0), inertial_limit(-1.0)
        else:
            g_plus = spectral_density(1.0, params.abar)
            g_minus = spectral_density(-1.0, params.abar)
        a = 0.25 * params.gamma_ratio * (g_plus + g_minus)
        b = 0.25 * params.gamma_ratio * (g_plus - g_minus)
        return cls(a, b, -a, b / a, omega)

    def kossakowski_matrix(self) -> np.ndarray:
        """a_ij = A delta_ij - i B eps_ij3 + C delta_i3 delta_j3."""
        matrix = self.A * np.eye(3, dtype=complex)
        matrix[0, 1] = -1j * self.B
        matrix[1, 0] = 1j * self.B
        matrix[2, 2] += self.C
        return matrix

    def with_A(self, A: float) -> "KossakowskiCoeffs":
        """Copy with a different A; C follows as -A."""
        R = self.B / A if A > 0 else self.R
        return KossakowskiCoeffs(A, self.B, -A, R, self.Omega, unitary=False)


@dataclass(frozen=True)
class SpacetimePoint:
    """Point on the worldline: ct and x, y, z in units of c^2 / a."""

    t: float
    x: float
    y: float = 0.0
    z: float = 0.0

    @property
    def interval(self) -> float:
        """x^2 - (ct)^2, equal to 1 on the Rindler hyperbola."""
        return self.x * self.x - self.t * self.t


def _one_plus_coth(x: float) -> float:
    """1 + coth(x) without cancellation or overflow on either sign of x."""
    if x > 0:
        return -2.0 / math.expm1(-2.0 * x)
    return 2.0 * math.exp(2.0 * x) / math.expm1(2.0 * x)


def _stable_coth(x: float) -> float:
    """coth(x) for x > 0; exactly 1 once exp(-2x) underflows."""
    return -(1.0 + math.exp(-2.0 * x)) / math.expm1(-2.0 * x)


def _bath_ratio(abar: float) -> float:
    return 1.0 if abar == 0.0 else math.tanh(math.pi / abar)


def _require_acceleration(abar: float, operation: str) -> None:
    if not math.isfinite(abar) or abar <= 0:
        raise BathDomainError(
            f"{operation} needs abar > 0, got {abar}; use inertial_limit for abar = 0"
        )


def spectral_density(lambda_bar: float, abar: float) -> float:
    """Fourier transform of the field correlation function, in units of gamma0.

    G(lambda)/gamma0 = (1/2) lambda^3 (1 + abar^2/lambda^2) (1 + coth(pi lambda/abar)).
    """
    _require_acceleration(abar, "spectral_density")
    if lambda_bar == 0:
        raise BathDomainError("spectral_density is undefined at lambda_bar = 0")
    x = math.pi * lambda_bar / abar
    return 0.5 * lambda_bar * (lambda_bar * lambda_bar + abar * abar) * _one_plus_coth(x)


def inertial_limit(lambda_bar: float) -> float:
    """abar -> 0+ limit of spectral_density: lambda^3 for lambda > 0, else 0."""
    if lambda_bar <= 0:
        return 0.0
    return lambda_bar ** 3


def unruh_temperature(abar: float) -> float:
    """Unruh temperature k_B T / (hbar omega0) = abar / (2 pi)."""
    if abar < 0:
        raise BathDomainError(f"abar must be >= 0, got {abar}")
    return abar / (2.0 * math.pi)


def thermal_occupation(abar: float) -> float:
    """Planck factor 1 / (exp(2 pi / abar) - 1) at the transition frequency."""
    if abar < 0:
        raise BathDomainError(f"abar must be >= 0, got {abar}")
    if abar == 0.0:
        return 0.0
    x = 2.0 * math.pi / abar
    return -math.exp(-x) / math.expm1(-x)


def kossakowski(params: AtomBathParams) -> KossakowskiCoeffs:
    """Closed-form Kossakowski coefficients for the accelerated atom.

    A = (gamma0/4)(1 + abar^2) coth(pi/abar), B = (gamma0/4)(1 + abar^2), C = -A.
    abar = 0 is an exact branch (A = B, R = 1); gamma_ratio = 0 returns the
    unitary branch with all rates zero.
    """
    omega = 1.0 + params.omega_shift
    if params.unitary:
        return KossakowskiCoeffs(0.0, 0.0, 0.0, _bath_ratio(params.abar), omega, unitary=True)

    b = 0.25 * params.gamma_ratio * (1.0 + params.abar * params.abar)
    if params.abar == 0.0:
        return KossakowskiCoeffs(b, b, -b, 1.0, omega)

    x = math.pi / params.abar
    a = b * _stable_coth(x)
    return KossakowskiCoeffs(a, b, -a, math.tanh(x), omega)


def rindler_trajectory(tau_bar: float, abar: float) -> SpacetimePoint:
    """Hyperbolic worldline at proper time tau_bar.

    With a tau / c = abar * tau_bar the lab coordinates are
    ct = (c^2/a) sinh(abar tau_bar) and x = (c^2/a) cosh(abar tau_bar).
    """
    _require_acceleration(abar, "rindler_trajectory")
    rapidity = abar * tau_bar
    if abs(rapidity) > MAX_RAPIDITY:
        raise BathDomainError(f"rapidity {rapidity:.6g} overflows the lab coordinates (limit {MAX_RAPIDITY})")
    return SpacetimePoint(t=math.sinh(rapidity), x=math.cosh(rapidity))


def correlation_function(dtau_bar, abar: float, eps: float):
    """Regulated Wightman function G+(dtau) along the Rindler trajectory.

    (3/pi) (abar/2)^4 / sinh^4[(abar/2)(dtau - i eps)], normalized so that its
    Fourier transform equals spectral_density. Accepts scalars or arrays.
    """
    _require_acceleration(abar, "correlation_function")
    if eps <= 0:
        raise BathDomainError(f"correlation_function needs eps > 0, got {eps}")
    half = 0.5 * abar
    z = half * (np.asarray(dtau_bar, dtype=float) - 1j * eps)
    value = CORRELATION_NORMALIZATION * half ** 4 / np.sinh(z) ** 4
    return complex(value) if np.ndim(value) == 0 else value


def numerical_spectral_density(
    lambda_bar: float,
    abar: float,
    eps: float = 1e-3,
    window: Optional[float] = None,
    contour_shift: Optional[float] = None,
) -> float:
    """Windowed quadrature Fourier transform of correlation_function.

    The integral over the real line is taken along Im(tau) = -contour_shift
    instead; no pole lies between the two lines as long as
    contour_shift < 2 pi / abar - eps, so the value is unchanged and equals
    exp(-lambda eps) * spectral_density in the window -> infinity limit.
    """
    _require_acceleration(abar, "numerical_spectral_density")
    window = 40.0 / abar if window is None else window
    shift = math.pi / abar if contour_shift is None else contour_shift
    if not 0.0 <= shift < 2.0 * math.pi / abar - eps:
        raise BathDomainError(f"contour_shift {shift} crosses a pole of the correlation function")

    def integrand(s: float) -> float:
        g = correlation_function(s, abar, eps + shift)
        return (complex(math.cos(lambda_bar * s), math.sin(lambda_bar * s)) * g).real

    # G(-s)* = G(s): the transform is twice the real part over the half line.
    breakpoints = [0.0, min(window, 4.0 / abar), window]
    total = 0.0
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        value, error = integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=400)
        total += value
        logger.debug(f"FT segment [{lo:.3g}, {hi:.3g}] = {value:.6e} +/- {error:.1e}")
    return 2.0 * math.exp(lambda_bar * shift) * total


def unruh_kms_ratio(lambda_bar: float, abar: float) -> float:
    """G(-lambda)/G(lambda); detailed balance makes it exp(-2 pi lambda / abar)."""
    _require_acceleration(abar, "unruh_kms_ratio")
    if lambda_bar <= 0:
        raise BathDomainError(f"unruh_kms_ratio needs lambda_bar > 0, got {lambda_bar}")
    return spectral_density(-lambda_bar, abar) / spectral_density(lambda_bar, abar)


def kms_deviation_grid(lambda_grid: List[float], abar_grid: List[float]) -> float:
    """Largest |ratio - exp(-2 pi lambda/abar)| over a grid."""
    worst = 0.0
    for abar in abar_grid:
        for lam in lambda_grid:
            expected = math.exp(-2.0 * math.pi * lam / abar)
            worst = max(worst, abs(unruh_kms_ratio(lam, abar) - expected))
    return worst
