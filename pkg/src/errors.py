"""Exception hierarchy for the Unruh phase calculator."""

from typing import List, Optional


class UnruhPhaseError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(UnruhPhaseError, ValueError):
    """Physical or numerical input outside its allowed domain."""


class BathDomainError(ParameterError):
    """Spectral density or trajectory evaluated outside its domain."""


class DegeneracyError(UnruhPhaseError, ArithmeticError):
    """Density matrix is (numerically) maximally mixed; the phase is undefined."""

    def __init__(self, message: str, eta: Optional[float] = None):
        super().__init__(message)
        self.eta = eta


class QuadratureError(UnruhPhaseError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class ClosedFormDomainError(UnruhPhaseError, ArithmeticError):
    """Logarithm argument of the closed form left its domain."""


class PositivityError(UnruhPhaseError, RuntimeError):
    """Integrated state violates positivity beyond the allowed slack."""

    def __init__(self, message: str, tau_bar: float, violation: float):
        super().__init__(message)
        self.tau_bar = tau_bar
        self.violation = violation


class UndersamplingError(UnruhPhaseError, RuntimeError):
    """Trajectory too coarse for a continuous eigenvector gauge."""


class ConfigError(UnruhPhaseError, ValueError):
    """Run configuration failed validation; lists every violated field."""

    def __init__(self, errors: List[str]):
        super().__init__(f"Invalid configuration: {'; '.join(errors)}")
        self.errors = list(errors)


class OutputError(UnruhPhaseError, OSError):
    """An output file could not be written."""
