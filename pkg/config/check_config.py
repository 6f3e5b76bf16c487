"""
Oracle check configuration for the Unruh phase calculator.
All grids and tolerances used by the check suite are centralized here.
"""

import math

# Full oracle suite configuration
CHECK_CONFIG = {
    # Detailed balance of the spectral density
    "kms": {
        "lambda_grid": [0.1, 0.5, 1.0, 2.0, 10.0],
        "abar_grid": [0.5, 1.0, 4.0, 10.0],
        "tolerance": 1e-12
    },

    # (theta, abar) grid shared by the method-agreement checks
    "grid": {
        "gamma_ratio": 1e-6,
        "theta": [0.2, 0.8, math.pi / 2, 2.2, 2.9],
        "abar": [0.0, 0.5, 1.0, 4.0, 10.0]
    },

    # RK4 endpoint vs closed form at tau_bar = 2 pi
    "dynamics": {
        "steps": 10_000,
        "tolerance": 1e-10
    },

    # Phase method agreement
    "phase": {
        "closed_form_tolerance": 1e-9,
        "kinematic_samples": 100_000,
        "kinematic_tolerance": 1e-6
    },

    # First-order expansion vs quadrature (plus first_order_tolerance per point)
    "first_order": {
        "delta_floor": 1e-10
    },

    # Headline value at theta = pi/2, abar = 4, gamma_ratio = 1e-6
    "headline": {
        "gamma_ratio": 1e-6,
        "abar": 4.0,
        "theta": math.pi / 2,
        "window": [1.55e-4, 1.62e-4]
    },

    # Qualitative statements about delta_a
    "qualitative": {
        "monotone_abar": [1.0, 2.0, 4.0, 8.0],
        "argmax_abar": 4.0,
        "argmax_points": 33,
        "argmax_window": 0.35,
        "sign_theta": [0.1, 0.4, 0.8, 1.2, math.pi / 2]
    },

    # Windowed Fourier transform of the correlation function
    "fourier": {
        "lambda_bar": 1.0,
        "abar": 2.0,
        "eps": 1e-3,
        "relative_tolerance": 1e-2
    },

    # gamma_ratio = 0 reduces every method to -pi (1 - cos theta)
    "unitary": {
        "theta": [0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi],
        "abar": 4.0,
        "kinematic_samples": 100_000,
        "tolerance": 1e-9
    }
}

# Quick subset: single grid point and the cheap checks
QUICK_CHECK_CONFIG = {
    **CHECK_CONFIG,
    "grid": {
        "gamma_ratio": 1e-6,
        "theta": [0.8],
        "abar": [4.0]
    },
    "phase": {
        "closed_form_tolerance": 1e-9,
        "kinematic_samples": 20_000,
        "kinematic_tolerance": 1e-6
    },
    "skip": ["fourier"]
}


def get_check_config(quick: bool = False) -> dict:
    """Get the check configuration for the requested mode."""
    return QUICK_CHECK_CONFIG if quick else CHECK_CONFIG


def is_skipped(check: str, quick: bool = False) -> bool:
    """Whether a check is left out of the requested mode."""
    return check in get_check_config(quick).get("skip", [])
