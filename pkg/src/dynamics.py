"""Reduced density matrix of the two-level atom: closed form and RK4 oracle.

States are stored as (rho_ee, coh) with coh = <+|rho|->, so trace and
Hermiticity hold by construction. Bloch components follow
rho = (1 + r . sigma) / 2, i.e. r1 = 2 Re(coh), r2 = -2 Im(coh), r3 = 2 rho_ee - 1.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from src.bath import KossakowskiCoeffs
from src.errors import ParameterError, PositivityError

logger = logging.getLogger(__name__)

BLOCH_CONVENTION = "r1 = 2 Re(coh), r2 = -2 Im(coh), r3 = 2 rho_ee - 1"

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

POSITIVITY_SLACK = 1e-10
MIN_RK4_STEPS = 100


@dataclass(frozen=True)
class BlochVector:
    r1: float
    r2: float
    r3: float

    @property
    def length(self) -> float:
        return math.sqrt(self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(rho_ee=0.5 * (1.0 + self.r3), coh=complex(0.5 * self.r1, -0.5 * self.r2))


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 Hermitian unit-trace state; the ground population is 1 - rho_ee."""

    rho_ee: float
    coh: complex

    @classmethod
    def pure(cls, theta: float) -> "DensityMatrix":
        """cos(theta/2)|+> + sin(theta/2)|->."""
        return cls(rho_ee=math.cos(0.5 * theta) ** 2, coh=complex(0.5 * math.sin(theta), 0.0))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "DensityMatrix":
        return cls(rho_ee=float(matrix[0, 0].real), coh=complex(matrix[0, 1]))

    @property
    def rho_gg(self) -> float:
        return 1.0 - self.rho_ee

    @property
    def purity(self) -> float:
        """Tr(rho^2)."""
        return self.rho_ee ** 2 + self.rho_gg ** 2 + 2.0 * abs(self.coh) ** 2

    def positivity_margin(self) -> float:
        """rho_ee (1 - rho_ee) - |coh|^2, non-negative for a physical state."""
        return self.rho_ee * self.rho_gg - abs(self.coh) ** 2

    def is_positive(self, slack: float = 0.0) -> bool:
        return self.positivity_margin() >= -slack and -slack <= self.rho_ee <= 1.0 + slack

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.rho_ee, self.coh], [self.coh.conjugate(), self.rho_gg]], dtype=complex
        )

    def bloch(self) -> BlochVector:
        return BlochVector(r1=2.0 * self.coh.real, r2=-2.0 * self.coh.imag, r3=2.0 * self.rho_ee - 1.0)


class StateDerivative(NamedTuple):
    """Time derivative of a DensityMatrix in the (rho_ee, coh) representation."""

    d_rho_ee: float
    d_coh: complex


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled evolution from tau_bar = 0."""

    tau_bar: np.ndarray
    rho_ee: np.ndarray
    coh: np.ndarray
    step: float
    theta: float
    coeffs: KossakowskiCoeffs

    def __post_init__(self):
        if not (len(self.tau_bar) == len(self.rho_ee) == len(self.coh)):
            raise ParameterError("trajectory arrays must have equal length")
        if len(self.tau_bar) < 2:
            raise ParameterError("trajectory needs at least two samples")
        gaps = np.diff(self.tau_bar)
        if np.any(gaps <= 0):
            raise ParameterError("trajectory tau_bar must be strictly increasing")
        if not np.allclose(gaps, self.step, rtol=1e-9, atol=0.0):
            raise ParameterError("trajectory samples must be uniformly spaced")

    def __len__(self) -> int:
        return len(self.tau_bar)

    def state(self, index: int) -> DensityMatrix:
        return DensityMatrix(float(self.rho_ee[index]), complex(self.coh[index]))

    def __iter__(self) -> Iterator[Tuple[float, DensityMatrix]]:
        for index in range(len(self)):
            yield float(self.tau_bar[index]), self.state(index)

    @property
    def samples(self) -> List[Tuple[float, DensityMatrix]]:
        return list(self)

    @property
    def tau_end(self) -> float:
        return float(self.tau_bar[-1])

    def matrices(self) -> np.ndarray:
        """Stack of full 2x2 matrices, shape (n, 2, 2)."""
        stack = np.empty((len(self), 2, 2), dtype=complex)
        stack[:, 0, 0] = self.rho_ee
        stack[:, 0, 1] = self.coh
        stack[:, 1, 0] = np.conj(self.coh)
        stack[:, 1, 1] = 1.0 - self.rho_ee
        return stack

    def bloch_components(self) -> np.ndarray:
        """Columns r1, r2, r3, shape (n, 3)."""
        return np.column_stack(
            [2.0 * self.coh.real, -2.0 * self.coh.imag, 2.0 * self.rho_ee - 1.0]
        )

    def positivity_margins(self) -> np.ndarray:
        return self.rho_ee * (1.0 - self.rho_ee) - np.abs(self.coh) ** 2

    def max_deviation(self, other: "Trajectory") -> float:
        """Largest element-wise difference of the density matrices."""
        if len(other) != len(self):
            raise ParameterError("trajectories have different sample counts")
        return float(
            max(np.max(np.abs(self.rho_ee - other.rho_ee)), np.max(np.abs(self.coh - other.coh)))
        )


def _decay_factors(tau_bar, coeffs: KossakowskiCoeffs):
    """Population factor exp(-4A tau) and coherence factor exp(-2(2A+C) tau)."""
    tau = np.asarray(tau_bar, dtype=float)
    return np.exp(-4.0 * coeffs.A * tau), np.exp(-2.0 * (2.0 * coeffs.A + coeffs.C) * tau)


def _closed_form_arrays(tau_bar, theta: float, coeffs: KossakowskiCoeffs):
    tau = np.asarray(tau_bar, dtype=float)
    cos_half_sq = math.cos(0.5 * theta) ** 2
    oscillation = np.exp(-1j * coeffs.Omega * tau)
    if coeffs.unitary:
        rho_ee = np.full_like(tau, cos_half_sq)
        coh = 0.5 * math.sin(theta) * oscillation
        return rho_ee, coh

    population, coherence = _decay_factors(tau, coeffs)
    # (B - A)/2A (e^{-4A tau} - 1) written with expm1
    relaxation = 0.5 * (coeffs.R - 1.0) * np.expm1(-4.0 * coeffs.A * tau)
    rho_ee = population * cos_half_sq + relaxation
    coh = 0.5 * math.sin(theta) * coherence * oscillation
    return rho_ee, coh


def rho_closed_form(tau_bar: float, theta: float, coeffs: KossakowskiCoeffs) -> DensityMatrix:
    """Exact reduced density matrix at proper time tau_bar."""
    if tau_bar < 0:
        raise ParameterError(f"tau_bar must be >= 0, got {tau_bar}")
    rho_ee, coh = _closed_form_arrays(tau_bar, theta, coeffs)
    return DensityMatrix(float(rho_ee), complex(coh))


def stationary_state(coeffs: KossakowskiCoeffs) -> DensityMatrix:
    """Fixed point of the dissipative dynamics: r3 = -R, no coherence."""
    if coeffs.unitary:
        raise ParameterError("unitary evolution has no unique stationary state")
    return BlochVector(0.0, 0.0, -coeffs.R).to_density()


def closed_form_trajectory(
    theta: float, coeffs: KossakowskiCoeffs, tau_end: float, steps: int
) -> Trajectory:
    """Sample rho_closed_form on steps + 1 uniform points of [0, tau_end]."""
    if tau_end <= 0 or steps < 1:
        raise ParameterError(f"need tau_end > 0 and steps >= 1, got {tau_end}, {steps}")
    tau = np.linspace(0.0, tau_end, steps + 1)
    rho_ee, coh = _closed_form_arrays(tau, theta, coeffs)
    return Trajectory(tau, rho_ee, coh, tau_end / steps, theta, coeffs)


def lindblad_generator(matrix: np.ndarray, coeffs: KossakowskiCoeffs) -> np.ndarray:
    """Right-hand side of the master equation for a full 2x2 matrix.

    -i [H_eff, rho] + (1/2) sum_ij a_ij (2 s_j rho s_i - s_i s_j rho - rho s_i s_j)
    with H_eff = (Omega/2) sigma_3 (hbar = 1, time in units of 1/omega0).
    """
    hamiltonian = 0.5 * coeffs.Omega * PAULI[2]
    result = -1j * (hamiltonian @ matrix - matrix @ hamiltonian)
    kossakowski_matrix = coeffs.kossakowski_matrix()
    for i in range(3):
        for j in range(3):
            a_ij = kossakowski_matrix[i, j]
            if a_ij == 0:
                continue
            s_i, s_j = PAULI[i], PAULI[j]
            product = s_i @ s_j
            result += 0.5 * a_ij * (2.0 * s_j @ matrix @ s_i - product @ matrix - matrix @ product)
    return result


def liouvillian(coeffs: KossakowskiCoeffs) -> np.ndarray:
    """4x4 superoperator acting on the row-major vec(rho)."""
    superoperator = np.empty((4, 4), dtype=complex)
    for column in range(4):
        basis = np.zeros(4, dtype=complex)
        basis[column] = 1.0
        superoperator[:, column] = lindblad_generator(basis.reshape(2, 2), coeffs).reshape(4)
    return superoperator


def lindblad_rhs(state: DensityMatrix, coeffs: KossakowskiCoeffs) -> StateDerivative:
    derivative = lindblad_generator(state.matrix(), coeffs)
    return StateDerivative(float(derivative[0, 0].real), complex(derivative[0, 1]))


def integrate_lindblad(
    theta: float,
    coeffs: KossakowskiCoeffs,
    tau_end: float,
    steps: int,
    slack: float = POSITIVITY_SLACK,
) -> Trajectory:
    """Classical fixed-step RK4 integration of the master equation.

    Starts from the pure state at angle theta. Keep the step below
    2 pi / (50 Omega); the free precession is the only fast scale.
    """
    if steps < MIN_RK4_STEPS:
        raise ParameterError(f"steps must be >= {MIN_RK4_STEPS}, got {steps}")
    if tau_end <= 0:
        raise ParameterError(f"tau_end must be > 0, got {tau_end}")

    h = tau_end / steps
    if h * coeffs.Omega > 2.0 * math.pi / 50.0:
        logger.warning(f"RK4 step {h:.3g} exceeds 2pi/(50 Omega); expect visible truncation error")

    superoperator = liouvillian(coeffs)
    rho_ee = np.empty(steps + 1)
    coh = np.empty(steps + 1, dtype=complex)
    initial = DensityMatrix.pure(theta)
    rho_ee[0], coh[0] = initial.rho_ee, initial.coh
    vec = initial.matrix().reshape(4)

    for k in range(steps):
        k1 = superoperator @ vec
        k2 = superoperator @ (vec + 0.5 * h * k1)
        k3 = superoperator @ (vec + 0.5 * h * k2)
        k4 = superoperator @ (vec + h * k3)
        vec = vec + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        # back onto the (rho_ee, coh) representation
        population, off_diagonal = vec[0].real, vec[1]
        vec = np.array([population, off_diagonal, off_diagonal.conjugate(), 1.0 - population])
        rho_ee[k + 1], coh[k + 1] = population, off_diagonal

    tau = np.linspace(0.0, tau_end, steps + 1)
    trajectory = Trajectory(tau, rho_ee, coh, h, theta, coeffs)
    margins = trajectory.positivity_margins()
    worst = int(np.argmin(margins))
    if margins[worst] < -slack:
        raise PositivityError(
            f"RK4 state left the Bloch ball at tau_bar={tau[worst]:.6g} "
            f"(margin {margins[worst]:.3e}); reduce the step size",
            tau_bar=float(tau[worst]),
            violation=float(-margins[worst]),
        )
    return trajectory


def to_bloch(state: DensityMatrix) -> BlochVector:
    return state.bloch()


def from_bloch(vector: BlochVector) -> DensityMatrix:
    return vector.to_density()


def bloch_roundtrip(state: DensityMatrix) -> Tuple[BlochVector, DensityMatrix]:
    """DensityMatrix -> BlochVector -> DensityMatrix."""
    vector = to_bloch(state)
    return vector, from_bloch(vector)


def trajectory_rows(
    trajectory: Trajectory, oracle: Optional[Trajectory] = None
) -> Tuple[List[str], List[List[float]]]:
    """Header and numeric rows for the trajectory CSV."""
    header = ["tau_bar", "rho_ee", "re_coh", "im_coh", "r1", "r2", "r3"]
    if oracle is not None:
        header += ["rk4_rho_ee", "rk4_re_coh", "rk4_im_coh"]
    bloch = trajectory.bloch_components()
    rows = []
    for index in range(len(trajectory)):
        row = [
            float(trajectory.tau_bar[index]),
            float(trajectory.rho_ee[index]),
            float(trajectory.coh[index].real),
            float(trajectory.coh[index].imag),
            float(bloch[index, 0]),
            float(bloch[index, 1]),
            float(bloch[index, 2]),
        ]
        if oracle is not None:
            row += [
                float(oracle.rho_ee[index]),
                float(oracle.coh[index].real),
                float(oracle.coh[index].imag),
            ]
        rows.append(row)
    return header, rows
