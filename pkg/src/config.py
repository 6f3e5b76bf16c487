"""Configuration management for the Unruh phase calculator."""

import os
import re
import math
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv, dotenv_values

from src.bath import AtomBathParams
from src.errors import ConfigError, ParameterError

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 2.99792458e8  # m/s

METHODS = ("all", "quadrature", "closed_form", "first_order", "kinematic")

_PI_EXPRESSION = re.compile(
    r"^\s*(?P<coef>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(?P<div>\d+\.?\d*))?\s*$"
)


class Settings:
    """Process-wide settings read from the environment."""

    def __init__(self, debug: bool = False):
        self.debug = debug
        if debug:
            logger.setLevel(logging.DEBUG)

        self.workers_raw = os.getenv("UNRUH_PHASE_WORKERS")
        self.log_dir = os.getenv("UNRUH_PHASE_LOG_DIR", "logs")

        self._validate_env_vars()
        self.workers = int(self.workers_raw) if self.workers_raw else (os.cpu_count() or 1)

        logger.debug(f"Settings loaded - workers: {self.workers}, log dir: {self.log_dir or '<none>'}")

    def _validate_env_vars(self) -> None:
        """Validate that the numeric environment variables parse."""
        invalid = []
        if self.workers_raw:
            try:
                if int(self.workers_raw) < 1:
                    invalid.append(f"UNRUH_PHASE_WORKERS must be >= 1, got {self.workers_raw}")
            except ValueError:
                invalid.append(f"UNRUH_PHASE_WORKERS is not an integer: {self.workers_raw!r}")
        if invalid:
            raise ConfigError(invalid)

    @property
    def log_level(self) -> int:
        return logging.DEBUG if self.debug else logging.INFO


def parse_angle(text: Any) -> float:
    """Float or pi expression: '0.8', 'pi', 'pi/2', '3*pi/4', '2pi/3'."""
    if isinstance(text, (int, float)):
        return float(text)
    match = _PI_EXPRESSION.match(str(text))
    if match:
        coef = match.group("coef")
        if coef in ("", "+"):
            value = math.pi
        elif coef == "-":
            value = -math.pi
        else:
            value = float(coef) * math.pi
        if match.group("div"):
            value /= float(match.group("div"))
        return value
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"not a number or pi expression: {text!r}") from None


def parse_grid(text: Any) -> List[float]:
    """'start:stop:num' (inclusive, like numpy.linspace) or a comma list."""
    if isinstance(text, (list, tuple)):
        return [parse_angle(v) for v in text]
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:num, got {text!r}")
        num = int(parts[2])
        if num < 1:
            raise ValueError(f"grid needs at least one point, got {num}")
        return [float(v) for v in np.linspace(parse_angle(parts[0]), parse_angle(parts[1]), num)]
    values = [parse_angle(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError("grid is empty")
    return values


def _parse_bool(text: Any) -> bool:
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional(convert: Callable[[Any], Any]) -> Callable[[Any], Any]:
    def wrapped(value: Any) -> Any:
        if value is None or (isinstance(value, str) and not value.strip()):
            return None
        return convert(value)

    return wrapped


_CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    "gamma_ratio": float,
    "abar": _optional(float),
    "omega0": _optional(float),
    "accel": _optional(float),
    "theta": parse_angle,
    "omega_shift": float,
    "periods": int,
    "steps": int,
    "method": lambda v: str(v).strip().lower(),
    "output_path": _optional(str),
    "oracle": _parse_bool,
    "theta_grid": parse_grid,
    "abar_grid": parse_grid,
    "plot_script": _optional(str),
    "workers": _optional(int),
    "samples": int,
}


@dataclass
class RunConfig:
    """One run of the command-line front end, in natural units unless noted."""

    gamma_ratio: float = 1e-6
    abar: Optional[float] = None
    omega0: Optional[float] = None  # rad/s
    accel: Optional[float] = None  # m/s^2
    theta: float = math.pi / 2
    omega_shift: float = 0.0
    periods: int = 1
    steps: int = 1000
    method: str = "all"
    output_path: Optional[str] = None
    oracle: bool = False
    theta_grid: List[float] = field(
        default_factory=lambda: [float(v) for v in np.linspace(0.0, math.pi, 33)]
    )
    abar_grid: List[float] = field(default_factory=lambda: [4.0])
    plot_script: Optional[str] = None
    workers: Optional[int] = None
    samples: int = 100_000

    @property
    def resolved_abar(self) -> float:
        """abar as given, or accel / (c * omega0) from SI inputs."""
        if self.abar is not None:
            return self.abar
        if self.accel is None or self.omega0 is None:
            raise ConfigError(["abar is not set and cannot be derived from omega0/accel"])
        return self.accel / (SPEED_OF_LIGHT * self.omega0)

    def validate(self, grid_only: bool = False) -> None:
        """Check every field and raise ConfigError listing all violations.

        grid_only runs (sweeps) take abar from abar_grid and need no single point.
        """
        errors = []
        if self.abar is not None and self.accel is not None:
            errors.append("give either abar or omega0+accel, not both")
        elif not grid_only and self.abar is None and (self.accel is None or self.omega0 is None):
            errors.append("abar is required (or both omega0 and accel)")
        if self.omega0 is not None and not (math.isfinite(self.omega0) and self.omega0 > 0):
            errors.append(f"omega0 must be > 0, got {self.omega0}")
        if self.accel is not None and not (math.isfinite(self.accel) and self.accel >= 0):
            errors.append(f"accel must be >= 0, got {self.accel}")
        if self.periods < 1:
            errors.append(f"periods must be >= 1, got {self.periods}")
        if self.steps < 1:
            errors.append(f"steps must be >= 1, got {self.steps}")
        if self.samples < 2:
            errors.append(f"samples must be >= 2, got {self.samples}")
        if self.method not in METHODS:
            errors.append(f"method must be one of {', '.join(METHODS)}, got {self.method!r}")
        if self.workers is not None and self.workers < 1:
            errors.append(f"workers must be >= 1, got {self.workers}")
        if any(not 0.0 <= t <= math.pi for t in self.theta_grid):
            errors.append("theta_grid values must lie in [0, pi]")
        if any(a < 0 for a in self.abar_grid):
            errors.append("abar_grid values must be >= 0")
        if not errors:
            try:
                if grid_only:
                    AtomBathParams(self.gamma_ratio, 0.0, self.theta, self.omega_shift)
                else:
                    self.to_params()
            except ParameterError as e:
                errors.extend(str(e).split("; "))
        if errors:
            raise ConfigError(errors)

    def to_params(self) -> AtomBathParams:
        return AtomBathParams(
            gamma_ratio=self.gamma_ratio,
            abar=self.resolved_abar,
            theta=self.theta,
            omega_shift=self.omega_shift,
        )


def read_config_file(path: str) -> Dict[str, Optional[str]]:
    """Flat key=value file with # comments, read with python-dotenv."""
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError([f"config file not found: {path}"])
    values = dotenv_values(config_path)
    logger.debug(f"Loaded {len(values)} keys from {path}")
    return dict(values)


def load_run_config(
    path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    grid_only: bool = False,
) -> RunConfig:
    """Defaults, then the config file, then command-line overrides (None means unset)."""
    merged: Dict[str, Any] = {}
    errors = []
    if path:
        merged.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    known = {f.name for f in fields(RunConfig)}
    kwargs: Dict[str, Any] = {}
    for key, raw in merged.items():
        if key not in known:
            errors.append(f"unknown key {key!r}")
            continue
        try:
            kwargs[key] = _CONVERTERS[key](raw)
        except (TypeError, ValueError) as e:
            errors.append(f"{key}: {e}")
    if errors:
        raise ConfigError(errors)

    run_config = RunConfig(**kwargs)
    run_config.validate(grid_only)
    return run_config


# Global settings instance
settings = Settings(debug=os.getenv("DEBUG", "false").lower() == "true")
