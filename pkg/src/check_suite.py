"""Oracle suite: cross-checks every computational route against an independent one."""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from config.check_config import get_check_config, is_skipped
from src.bath import (
    AtomBathParams,
    KossakowskiCoeffs,
    kms_deviation_grid,
    kossakowski,
    numerical_spectral_density,
    spectral_density,
)
from src.dynamics import closed_form_trajectory, integrate_lindblad, rho_closed_form
from src.errors import UnruhPhaseError
from src.phase import (
    SECOND_ORDER_FACTOR,
    cycle_horizon,
    first_order_difference,
    first_order_tolerance,
    phase_closed_form,
    phase_difference,
    phase_first_order,
    phase_kinematic,
    phase_quadrature,
    unitary_phase,
    wrapped_difference,
)
from src.utils.logging_utils import generate_run_id, log_check_result

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    details: Dict[str, Any] = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.3e} (tolerance {self.tolerance:.3e})"


@dataclass
class CheckReport:
    results: List[CheckResult]
    duration: float
    quick: bool = False

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]

    def summary_lines(self) -> List[str]:
        lines = [result.summary() for result in self.results]
        lines.append(
            f"{len(self.results) - len(self.failures)}/{len(self.results)} checks passed "
            f"in {self.duration:.1f}s"
        )
        return lines


def _grid_params(cfg: dict) -> List[AtomBathParams]:
    grid = cfg["grid"]
    return [
        AtomBathParams(grid["gamma_ratio"], abar, theta)
        for theta in grid["theta"]
        for abar in grid["abar"]
    ]


def _worst(name: str, deviations: List[float], tolerance: float, **details) -> CheckResult:
    value = max(deviations) if deviations else 0.0
    return CheckResult(name, bool(value <= tolerance), value, tolerance, details)


def check_kms(cfg: dict) -> CheckResult:
    section = cfg["kms"]
    deviation = kms_deviation_grid(section["lambda_grid"], section["abar_grid"])
    return _worst("kms_detailed_balance", [deviation], section["tolerance"])


def check_coefficients(cfg: dict) -> CheckResult:
    """Closed-form A, B against the quarter sum/difference of the spectral density."""
    deviations = []
    for params in _grid_params(cfg):
        direct, from_spectrum = kossakowski(params), KossakowskiCoeffs.from_spectrum(params)
        deviations.append(abs(direct.A - from_spectrum.A) / direct.A)
        deviations.append(abs(direct.B - from_spectrum.B) / direct.B)
    return _worst("kossakowski_from_spectrum", deviations, 1e-12)


def check_dynamics(cfg: dict, perturb: float = 0.0) -> CheckResult:
    """RK4 endpoint vs closed form at one quasi-cycle; perturb shifts A in the RK4 input only."""
    steps = cfg["dynamics"]["steps"]
    deviations = []
    for params in _grid_params(cfg):
        coeffs = kossakowski(params)
        oracle_coeffs = coeffs.with_A(coeffs.A + perturb) if perturb else coeffs
        horizon = cycle_horizon(coeffs)
        trajectory = integrate_lindblad(params.theta, oracle_coeffs, horizon, steps)
        expected = rho_closed_form(horizon, params.theta, coeffs)
        endpoint = trajectory.state(len(trajectory) - 1)
        deviations.append(max(abs(endpoint.rho_ee - expected.rho_ee), abs(endpoint.coh - expected.coh)))
    return _worst("rk4_vs_closed_form", deviations, cfg["dynamics"]["tolerance"], steps=steps, perturb=perturb)


def check_phase_methods(cfg: dict) -> List[CheckResult]:
    section = cfg["phase"]
    closed, kinematic, fallbacks = [], [], 0
    for params in _grid_params(cfg):
        reference = phase_quadrature(params).gamma
        closed_result = phase_closed_form(params)
        fallbacks += int(closed_result.fallback)
        closed.append(abs(closed_result.gamma - reference))

        coeffs = kossakowski(params)
        trajectory = closed_form_trajectory(
            params.theta, coeffs, cycle_horizon(coeffs), section["kinematic_samples"]
        )
        kinematic.append(abs(wrapped_difference(phase_kinematic(trajectory, params).gamma, reference)))
    return [
        _worst("closed_form_vs_quadrature", closed, section["closed_form_tolerance"], fallbacks=fallbacks),
        _worst(
            "kinematic_vs_quadrature",
            kinematic,
            section["kinematic_tolerance"],
            samples=section["kinematic_samples"],
        ),
    ]


def check_first_order(cfg: dict) -> CheckResult:
    """First-order phase vs quadrature, scaled by the size of the dropped terms."""
    ratios, worst = [], (0.0, 1.0)
    for params in _grid_params(cfg):
        error = abs(phase_first_order(params).gamma - phase_quadrature(params).gamma)
        tolerance = first_order_tolerance(kossakowski(params))
        ratios.append(error / tolerance)
        if error / tolerance >= max(ratios):
            worst = (error, tolerance)
    return CheckResult("first_order_vs_quadrature", bool(max(ratios) <= 1.0), worst[0], worst[1])


def check_delta_consistency(cfg: dict) -> CheckResult:
    floor = cfg["first_order"]["delta_floor"]
    ratios, worst = [], (0.0, floor)
    for params in _grid_params(cfg):
        difference = phase_difference(params)
        inertial_rate = kossakowski(params.with_abar(0.0)).A
        tolerance = floor + SECOND_ORDER_FACTOR * (kossakowski(params).A ** 2 + inertial_rate ** 2)
        error = abs(difference.first_order - difference.exact)
        ratios.append(error / tolerance)
        if error / tolerance >= max(ratios):
            worst = (error, tolerance)
    return CheckResult("delta_first_order_vs_exact", bool(max(ratios) <= 1.0), worst[0], worst[1])


def check_headline(cfg: dict) -> CheckResult:
    section = cfg["headline"]
    low, high = section["window"]
    difference = phase_difference(AtomBathParams(section["gamma_ratio"], section["abar"], section["theta"]))
    magnitude = abs(difference.exact)
    passed = low <= magnitude <= high and low <= abs(difference.first_order) <= high
    return CheckResult(
        "headline_delta",
        passed,
        magnitude,
        high,
        {"first_order": difference.first_order, "window": [low, high]},
    )


def check_qualitative(cfg: dict) -> CheckResult:
    """delta_a vanishes at the poles, grows with abar at pi/2, peaks near pi/2, and is <= 0 up to pi/2."""
    section = cfg["qualitative"]
    gamma_ratio = cfg["headline"]["gamma_ratio"]
    failures = []

    for theta in (0.0, math.pi):
        difference = phase_difference(AtomBathParams(gamma_ratio, section["argmax_abar"], theta))
        if difference.exact != 0.0 or difference.first_order != 0.0:
            failures.append(f"delta_a nonzero at theta={theta:.4f}")

    magnitudes = [
        abs(phase_difference(AtomBathParams(gamma_ratio, abar, math.pi / 2)).exact)
        for abar in section["monotone_abar"]
    ]
    if not all(a < b for a, b in zip(magnitudes, magnitudes[1:])):
        failures.append(f"|delta_a| not increasing in abar: {magnitudes}")

    thetas = np.linspace(0.0, math.pi, section["argmax_points"])
    profile = [abs(first_order_difference(AtomBathParams(gamma_ratio, section["argmax_abar"], t))) for t in thetas]
    offset = abs(float(thetas[int(np.argmax(profile))]) - math.pi / 2)
    if offset > section["argmax_window"]:
        failures.append(f"argmax of |delta_a| is {offset:.3f} rad from pi/2")

    for abar in section["monotone_abar"]:
        for theta in section["sign_theta"]:
            if first_order_difference(AtomBathParams(gamma_ratio, abar, theta)) > 0:
                failures.append(f"delta_a > 0 at theta={theta:.3f}, abar={abar}")

    return CheckResult(
        "qualitative_claims",
        not failures,
        offset,
        section["argmax_window"],
        {"failures": failures},
    )


def check_fourier(cfg: dict) -> CheckResult:
    section = cfg["fourier"]
    numerical = numerical_spectral_density(section["lambda_bar"], section["abar"], eps=section["eps"])
    analytic = spectral_density(section["lambda_bar"], section["abar"])
    relative = abs(numerical - analytic) / abs(analytic)
    return _worst(
        "numerical_fourier_transform",
        [relative],
        section["relative_tolerance"],
        numerical=numerical,
        analytic=analytic,
    )


def check_unitary(cfg: dict) -> CheckResult:
    """gamma_ratio = 0: every method gives -pi (1 - cos theta)."""
    section = cfg["unitary"]
    deviations = []
    for theta in section["theta"]:
        params = AtomBathParams(0.0, section["abar"], theta)
        expected = unitary_phase(theta)
        deviations.append(abs(phase_quadrature(params).gamma - expected))
        deviations.append(abs(phase_closed_form(params).gamma - expected))
        deviations.append(abs(phase_first_order(params).gamma - expected))
        coeffs = kossakowski(params)
        trajectory = closed_form_trajectory(theta, coeffs, cycle_horizon(coeffs), section["kinematic_samples"])
        deviations.append(abs(phase_kinematic(trajectory, params).gamma - expected))
    return _worst("unitary_reduction", deviations, section["tolerance"])


def _guarded(name: str, check: Callable[[], Any]) -> List[CheckResult]:
    try:
        outcome = check()
    except UnruhPhaseError as e:
        logger.error(f"Check {name} raised: {e}")
        return [CheckResult(name, False, math.inf, 0.0, {"error": str(e)})]
    return outcome if isinstance(outcome, list) else [outcome]


def run_check_suite(quick: bool = False, perturb: float = 0.0, run_id: Optional[str] = None) -> CheckReport:
    """Run every oracle check and log each outcome."""
    cfg = get_check_config(quick)
    run_id = run_id or generate_run_id()
    started = time.monotonic()

    checks: List[tuple] = [
        ("kms", lambda: check_kms(cfg)),
        ("coefficients", lambda: check_coefficients(cfg)),
        ("dynamics", lambda: check_dynamics(cfg, perturb)),
        ("phase_methods", lambda: check_phase_methods(cfg)),
        ("first_order", lambda: check_first_order(cfg)),
        ("delta_consistency", lambda: check_delta_consistency(cfg)),
        ("headline", lambda: check_headline(cfg)),
        ("qualitative", lambda: check_qualitative(cfg)),
        ("fourier", lambda: check_fourier(cfg)),
        ("unitary", lambda: check_unitary(cfg)),
    ]

    results: List[CheckResult] = []
    for name, check in checks:
        if is_skipped(name, quick):
            logger.info(f"Skipping check {name} in quick mode")
            continue
        for result in _guarded(name, check):
            log_check_result(result.name, result.passed, result.value, result.tolerance, run_id, result.details)
            results.append(result)

    return CheckReport(results, time.monotonic() - started, quick)
