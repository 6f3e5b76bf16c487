"""Sweep service: evaluates the phase over a (theta, abar) grid with a worker pool."""

import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Callable, List, Optional, Sequence, Tuple

from src.bath import AtomBathParams
from src.phase import first_order_difference, phase_first_order, phase_quadrature
from src.utils.io_utils import atomic_write_text, render_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepSpec:
    """Grid description; rows come out theta-major, abar-minor."""

    gamma_ratio: float
    theta_grid: Sequence[float]
    abar_grid: Sequence[float]
    omega_shift: float = 0.0

    def points(self) -> List[Tuple[float, float, float, float]]:
        return [
            (self.gamma_ratio, theta, abar, self.omega_shift)
            for theta in self.theta_grid
            for abar in self.abar_grid
        ]

    def __len__(self) -> int:
        return len(self.theta_grid) * len(self.abar_grid)


@dataclass(frozen=True)
class SweepRow:
    """One CSV record; field order is the column order."""

    theta: float
    abar: float
    gamma_quadrature: float
    gamma_first_order: float
    delta_a_exact: float
    delta_a_first_order: float

    @classmethod
    def header(cls) -> List[str]:
        return [f.name for f in fields(cls)]


def evaluate_sweep_point(point: Tuple[float, float, float, float]) -> SweepRow:
    """Quadrature and first-order phase plus delta_a at one grid point.

    Module-level so process pools can pickle it.
    """
    gamma_ratio, theta, abar, omega_shift = point
    params = AtomBathParams(gamma_ratio, abar, theta, omega_shift)
    gamma_exact = phase_quadrature(params, 1).gamma
    inertial_exact = gamma_exact if abar == 0.0 else phase_quadrature(params.with_abar(0.0), 1).gamma
    return SweepRow(
        theta=theta,
        abar=abar,
        gamma_quadrature=gamma_exact,
        gamma_first_order=phase_first_order(params).gamma,
        delta_a_exact=gamma_exact - inertial_exact,
        delta_a_first_order=first_order_difference(params),
    )


class SweepService:
    """Service for running parameter sweeps."""

    def __init__(self, executor_factory: Optional[Callable[[int], Executor]] = None,
                 workers: Optional[int] = None):
        # Use dependency injection for better testing
        if executor_factory is None:
            self.executor_factory = lambda n: ProcessPoolExecutor(max_workers=n)
        else:
            self.executor_factory = executor_factory

        if workers is None:
            from src.config import settings
            self.workers = settings.workers
        else:
            self.workers = workers

    def run(self, spec: SweepSpec, workers: Optional[int] = None) -> List[SweepRow]:
        """
        Evaluate every grid point and return rows in grid order.

        Completion order of the workers does not matter: executor.map yields
        results in submission order.
        """
        points = spec.points()
        pool_size = max(1, min(workers or self.workers, len(points)))
        started = time.monotonic()

        if pool_size == 1:
            rows = [evaluate_sweep_point(point) for point in points]
        else:
            chunksize = max(1, len(points) // (4 * pool_size))
            with self.executor_factory(pool_size) as executor:
                rows = list(executor.map(evaluate_sweep_point, points, chunksize=chunksize))

        logger.info(
            f"Sweep of {len(points)} points finished in {time.monotonic() - started:.2f}s "
            f"with {pool_size} worker(s)"
        )
        return rows

    def write_csv(self, rows: Sequence[SweepRow], path: str, comments: Optional[List[str]] = None) -> None:
        """Write sweep rows to path atomically."""
        text = render_csv(SweepRow.header(), [astuple(row) for row in rows], comments)
        atomic_write_text(path, text)
        logger.info(f"Wrote {len(rows)} sweep rows to {path}")


# Global sweep service instance
sweep_service = SweepService()
