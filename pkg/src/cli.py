"""Command-line front end: evolve, phase, diff, sweep and check workflows."""

import sys
import math
import time
import logging
import argparse
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.bath import kossakowski, rindler_trajectory, unruh_temperature
from src.config import RunConfig, load_run_config, settings
from src.dynamics import BLOCH_CONVENTION, closed_form_trajectory, integrate_lindblad, trajectory_rows
from src.errors import ConfigError, OutputError, ParameterError, UnruhPhaseError
from src.phase import (
    PhaseMethod,
    PhaseResult,
    cycle_horizon,
    phase_closed_form,
    phase_difference,
    phase_first_order,
    phase_kinematic,
    phase_quadrature,
    unitary_phase,
    wrapped_difference,
)
from src.plot_script import render_plot_script
from src.services.sweep_service import SweepSpec, sweep_service
from src.utils.io_utils import atomic_write_text, render_csv
from src.utils.logging_utils import generate_run_id, log_command, log_computation, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_CHECK_FAILED = 3

# sinh overflows a double past 710
LARGE_RAPIDITY = 700.0
MAX_LOG_FLOAT = math.log(sys.float_info.max)

# flag dest -> RunConfig key
_OVERRIDES = {
    "gamma_ratio": "gamma_ratio",
    "abar": "abar",
    "omega0": "omega0",
    "accel": "accel",
    "theta": "theta",
    "omega_shift": "omega_shift",
    "periods": "periods",
    "steps": "steps",
    "method": "method",
    "out": "output_path",
    "oracle": "oracle",
    "theta_grid": "theta_grid",
    "abar_grid": "abar_grid",
    "plot_script": "plot_script",
    "workers": "workers",
    "samples": "samples",
}


def _run_options() -> argparse.ArgumentParser:
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--config", help="key=value run configuration file")
    options.add_argument("--theta", help="initial polar angle, e.g. 0.8 or pi/2")
    options.add_argument("--abar", type=float, help="dimensionless acceleration a/(c omega0)")
    options.add_argument("--omega0", type=float, help="level spacing in rad/s")
    options.add_argument("--accel", type=float, help="proper acceleration in m/s^2 (needs --omega0)")
    options.add_argument("--gamma-ratio", type=float, help="gamma0/omega0")
    options.add_argument("--omega-shift", type=float, help="Lamb shift in units of omega0")
    options.add_argument("--periods", type=int, help="number of quasi-cycles")
    options.add_argument("--steps", type=int, help="trajectory steps")
    options.add_argument("--samples", type=int, help="kinematic samples per quasi-cycle")
    options.add_argument("--method", help="all, quadrature, closed_form, first_order or kinematic")
    options.add_argument("--oracle", action="store_true", default=None, help="also integrate with RK4")
    options.add_argument("--out", help="output CSV path")
    options.add_argument("--theta-grid", help="start:stop:num or comma list")
    options.add_argument("--abar-grid", help="start:stop:num or comma list")
    options.add_argument("--plot-script", help="write a matplotlib script for the sweep CSV here")
    options.add_argument("--workers", type=int, help="sweep worker processes")
    return options


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run_phase.py",
        description="Geometric phase of a uniformly accelerated two-level atom",
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run_options = _run_options()
    commands.add_parser("evolve", parents=[run_options], help="write the density-matrix trajectory")
    commands.add_parser("phase", parents=[run_options], help="geometric phase by each method")
    commands.add_parser("diff", parents=[run_options], help="acceleration-induced phase difference")
    commands.add_parser("sweep", parents=[run_options], help="delta_a over a (theta, abar) grid")

    check = commands.add_parser("check", help="run the oracle suite")
    check.add_argument("--quick", action="store_true", help="fast subset")
    check.add_argument("--perturb", type=float, default=0.0, help="add this to A in the RK4 oracle")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {key: getattr(args, dest, None) for dest, key in _OVERRIDES.items()}
    return load_run_config(args.config, overrides, grid_only=args.command == "sweep")


def _require_output(config: RunConfig, command: str) -> str:
    if not config.output_path:
        raise ConfigError([f"output_path (--out) is required for {command}"])
    return config.output_path


def _describe(config: RunConfig) -> Dict[str, Any]:
    single_point = config.abar is not None or (config.accel is not None and config.omega0 is not None)
    return {
        "gamma_ratio": config.gamma_ratio,
        "abar": config.resolved_abar if single_point else None,
        "theta": config.theta,
        "omega_shift": config.omega_shift,
        "periods": config.periods,
    }


def lab_frame_log_duration(tau_bar: float, abar: float, omega0: Optional[float] = None) -> float:
    """Natural log of lab_frame_duration, finite for every rapidity."""
    rapidity = abar * tau_bar
    if tau_bar == 0.0:
        return -math.inf
    if abar == 0.0:
        log_value = math.log(tau_bar)
    elif rapidity < LARGE_RAPIDITY:
        log_value = math.log(math.sinh(rapidity) / abar)
    else:
        # sinh(x) = e^x / 2 once e^{-2x} is below double precision
        log_value = rapidity - math.log(2.0) - math.log(abar)
    if omega0:
        log_value -= math.log(omega0)
    return log_value


def lab_frame_duration(tau_bar: float, abar: float, omega0: Optional[float] = None) -> Tuple[float, str]:
    """Coordinate time elapsed in the lab frame over proper time tau_bar.

    t = (c/a) sinh(a tau/c) = sinh(abar tau_bar) / (abar omega0). Seconds
    when omega0 is known, otherwise units of 1/omega0. Durations beyond the
    float range come back as inf; lab_frame_log_duration still resolves them.
    """
    unit = "s" if omega0 else "1/omega0"
    if abar == 0.0 or abar * tau_bar < LARGE_RAPIDITY:
        value = tau_bar if abar == 0.0 else rindler_trajectory(tau_bar, abar).t / abar
        return (value / omega0 if omega0 else value), unit

    log_value = lab_frame_log_duration(tau_bar, abar, omega0)
    if log_value > MAX_LOG_FLOAT:
        logger.warning(f"lab-frame duration e^{log_value:.1f} {unit} overflows a float; reporting inf")
        return math.inf, unit
    return math.exp(log_value), unit


def cmd_evolve(config: RunConfig, run_id: str) -> int:
    """Sample the closed-form trajectory (and RK4 with --oracle) into a CSV."""
    path = _require_output(config, "evolve")
    params = config.to_params()
    coeffs = kossakowski(params)
    tau_end = cycle_horizon(coeffs, config.periods)

    started = time.monotonic()
    trajectory = closed_form_trajectory(params.theta, coeffs, tau_end, config.steps)
    comments = [
        f"gamma_ratio={config.gamma_ratio!r} abar={params.abar!r} theta={params.theta!r} "
        f"periods={config.periods} steps={config.steps}"
    ]
    oracle = None
    if config.oracle:
        oracle = integrate_lindblad(params.theta, coeffs, tau_end, config.steps)
        deviation = trajectory.max_deviation(oracle)
        comments.append(f"max_deviation_rk4={deviation:.3e}")
        print(f"RK4 max deviation from closed form: {deviation:.3e}")
    log_computation("evolve", run_id, _describe(config), duration=time.monotonic() - started)

    header, rows = trajectory_rows(trajectory, oracle)
    atomic_write_text(path, render_csv(header, rows, comments, header_comments=[BLOCH_CONVENTION]))
    print(f"Wrote {len(rows)} samples to {path}")
    return EXIT_OK


def _methods(config: RunConfig) -> List[PhaseMethod]:
    if config.method == "all":
        return list(PhaseMethod)
    return [PhaseMethod(config.method)]


def _compute_phase(method: PhaseMethod, config: RunConfig) -> PhaseResult:
    params = config.to_params()
    if method is PhaseMethod.QUADRATURE:
        return phase_quadrature(params, config.periods)
    if method is PhaseMethod.CLOSED_FORM:
        return phase_closed_form(params, config.periods)
    if method is PhaseMethod.FIRST_ORDER:
        return phase_first_order(params)

    coeffs = kossakowski(params)
    tau_end = cycle_horizon(coeffs, config.periods)
    samples = config.samples * config.periods
    if config.oracle:
        trajectory = integrate_lindblad(params.theta, coeffs, tau_end, samples)
    else:
        trajectory = closed_form_trajectory(params.theta, coeffs, tau_end, samples)
    return phase_kinematic(trajectory, params)


def cmd_phase(config: RunConfig, run_id: str) -> int:
    """Report the geometric phase by every requested method."""
    params = config.to_params()
    reference = unitary_phase(params.theta, config.periods)
    print(f"abar = {params.abar:.6g}  (Unruh temperature {unruh_temperature(params.abar):.6g} hbar omega0/k_B)")
    print(f"theta = {params.theta:.6g}, gamma0/omega0 = {params.gamma_ratio:.3g}, periods = {config.periods}")
    print(f"unitary reference -pi(1 - cos theta): {reference:.12f} rad")

    results = []
    for method in _methods(config):
        if method is PhaseMethod.FIRST_ORDER and config.periods != 1:
            logger.warning("first-order expansion covers one quasi-cycle; skipping for periods != 1")
            continue
        started = time.monotonic()
        result = _compute_phase(method, config)
        log_computation(
            f"phase_{method.value}", run_id, _describe(config), duration=time.monotonic() - started
        )
        note = " (quadrature fallback)" if result.fallback else ""
        if result.error_estimate is not None:
            note += f" +/- {result.error_estimate:.1e}"
        print(f"{method.value:>12}: {result.gamma:.12f} rad{note}")
        results.append(result)

    by_method = {result.method: result.gamma for result in results}
    quadrature = by_method.get(PhaseMethod.QUADRATURE)
    if quadrature is not None:
        for method, gamma in by_method.items():
            if method is not PhaseMethod.QUADRATURE:
                print(f"|{method.value} - quadrature| = {abs(wrapped_difference(gamma, quadrature)):.3e} rad")

    if config.output_path:
        rows = [
            [r.method.value, r.gamma, r.horizon, r.fallback, r.error_estimate] for r in results
        ]
        header = ["method", "gamma", "horizon", "fallback", "error_estimate"]
        atomic_write_text(config.output_path, render_csv(header, rows))
        print(f"Wrote {len(rows)} results to {config.output_path}")
    return EXIT_OK


def cmd_diff(config: RunConfig, run_id: str) -> int:
    """Report delta_a to first order and exactly, plus the lab-frame cycle duration."""
    params = config.to_params()
    started = time.monotonic()
    difference = phase_difference(params)
    log_computation("diff", run_id, _describe(config), duration=time.monotonic() - started)

    horizon = cycle_horizon(kossakowski(params))
    duration, unit = lab_frame_duration(horizon, params.abar, config.omega0)
    print(f"abar = {params.abar:.6g}, theta = {params.theta:.6g}, gamma0/omega0 = {params.gamma_ratio:.3g}")
    print(f"delta_a (first order): {difference.first_order:.6e} rad")
    print(f"delta_a (exact):       {difference.exact:.6e} rad")
    if math.isinf(duration):
        exponent = lab_frame_log_duration(horizon, params.abar, config.omega0) / math.log(10.0)
        print(f"lab-frame duration of one quasi-cycle: 10^{exponent:.4f} {unit}")
    else:
        print(f"lab-frame duration of one quasi-cycle: {duration:.4g} {unit}")

    if config.output_path:
        header = ["theta", "abar", "gamma_ratio", "delta_a_first_order", "delta_a_exact", "lab_duration", "lab_duration_log10"]
        row = [
            params.theta,
            params.abar,
            params.gamma_ratio,
            difference.first_order,
            difference.exact,
            duration,
            lab_frame_log_duration(horizon, params.abar, config.omega0) / math.log(10.0),
        ]
        atomic_write_text(config.output_path, render_csv(header, [row], [f"lab_duration_unit={unit}"]))
        print(f"Wrote delta_a to {config.output_path}")
    return EXIT_OK


def cmd_sweep(config: RunConfig, run_id: str) -> int:
    """delta_a over the (theta, abar) grid, optionally with a plot script."""
    path = _require_output(config, "sweep")
    spec = SweepSpec(config.gamma_ratio, config.theta_grid, config.abar_grid, config.omega_shift)

    started = time.monotonic()
    rows = sweep_service.run(spec, workers=config.workers)
    log_computation(
        "sweep",
        run_id,
        {"points": len(spec), "gamma_ratio": config.gamma_ratio},
        duration=time.monotonic() - started,
    )
    sweep_service.write_csv(rows, path, [f"gamma_ratio={config.gamma_ratio!r}"])
    print(f"Wrote {len(rows)} rows to {path}")

    for abar in config.abar_grid:
        column = [row for row in rows if row.abar == abar]
        peak = max(column, key=lambda row: abs(row.delta_a_exact))
        print(f"abar = {abar:g}: max |delta_a| = {abs(peak.delta_a_exact):.4e} rad at theta = {peak.theta:.4f}")

    if config.plot_script:
        atomic_write_text(config.plot_script, render_plot_script(path))
        print(f"Wrote plot script to {config.plot_script}")
    return EXIT_OK


def cmd_check(quick: bool, perturb: float, run_id: str) -> int:
    """Run the oracle suite; exit 3 when any check fails."""
    from src.check_suite import run_check_suite

    report = run_check_suite(quick=quick, perturb=perturb, run_id=run_id)
    for line in report.summary_lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


_COMMANDS = {
    "evolve": cmd_evolve,
    "phase": cmd_phase,
    "diff": cmd_diff,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Also check environment variable for debug mode
    debug_mode = args.debug or settings.debug
    setup_logging(logging.DEBUG if debug_mode else logging.INFO, settings.log_dir)
    if debug_mode:
        logger.info("🐛 DEBUG MODE ENABLED")

    run_id = generate_run_id()
    try:
        if args.command == "check":
            log_command("check", {"quick": args.quick, "perturb": args.perturb}, run_id)
            return cmd_check(args.quick, args.perturb, run_id)

        config = config_from_args(args)
        log_command(args.command, _describe(config), run_id)
        return _COMMANDS[args.command](config, run_id)
    except (ConfigError, ParameterError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OutputError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    except UnruhPhaseError as e:
        log_computation(args.command, run_id, success=False, error=str(e))
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
