"""Monte-Carlo covariance estimation and the 1D convergence study."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dft import DftBackend, get_backend
from .grid import GridSpec
from .spectral import SpectralDensity, Test1dDensity, closed_form_c_1d
from .streams import GaussianStream, substream
from .synth import discrete_covariance_table, resolve_algorithm, synthesize_batch

log = logging.getLogger(__name__)

# fields per substream block are capped by this many grid values
BLOCK_VALUES = 1 << 20
MAX_BLOCK = 4096
SLOPE_FLOOR_FACTOR = 3.0


def block_size(grid: GridSpec) -> int:
    """Samples per substream block; depends only on the grid."""
    return max(1, min(MAX_BLOCK, BLOCK_VALUES // grid.size))


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        try:
            workers = int(os.environ.get("GRF_THREADS", "0"))
        except ValueError:
            workers = 0
    return workers if workers > 0 else (os.cpu_count() or 1)


def mc_floor(samples: int) -> float:
    """Standard-error bound ``2/sqrt(M)`` for covariances of unit-variance fields."""
    return 2.0 / math.sqrt(samples)


@dataclass
class CovarianceEstimate:
    grid: GridSpec
    reference: tuple[int, ...]
    estimates: np.ndarray
    sample_count: int
    seed: int | None
    algorithm: str = ""
    density: str = ""

    def by_lag(self) -> np.ndarray:
        """Estimates re-indexed so that entry ``L`` holds lag ``L`` (mod N)."""
        shift = tuple(-r for r in self.reference)
        return np.roll(self.estimates, shift, axis=tuple(range(self.grid.dim)))


def _block_sums(grid, density, algorithm, ref, backend, rng, count):
    fields = synthesize_batch(grid, density, rng, algorithm, count, backend)
    flat = fields.reshape(count, -1)
    pivot = flat[:, grid.ravel(ref)]
    return pivot @ flat


def estimate_covariance(
    grid: GridSpec,
    density: SpectralDensity,
    algorithm: str,
    samples: int,
    reference: Sequence[int],
    seed: int = 0,
    *,
    backend: DftBackend | str | None = None,
    workers: int | None = None,
    stream: GaussianStream | None = None,
) -> CovarianceEstimate:
    """``M**-1 sum_j eta_j(ref) eta_j(K)`` over ``samples`` synthesised fields.

    Samples are split into fixed blocks, block ``b`` drawing from
    ``substream(seed, b)``; block sums are combined in block order, so the
    result does not depend on ``workers``. Passing ``stream`` draws every
    sample from it sequentially instead.
    """
    if isinstance(samples, bool) or int(samples) != samples or samples < 1:
        raise ValueError(f"sample count must be a positive integer, got {samples!r}")
    samples = int(samples)
    algorithm = resolve_algorithm(algorithm)
    ref = grid.check_index(reference)
    backend = get_backend(backend)
    size = block_size(grid)
    starts = range(0, samples, size)
    counts = [min(size, samples - s) for s in starts]

    if stream is not None:
        sums = [
            _block_sums(grid, density, algorithm, ref, backend, stream, c)
            for c in counts
        ]
    else:

        def run(block):
            rng = substream(seed, block)
            return _block_sums(grid, density, algorithm, ref, backend, rng, counts[block])

        n_workers = min(worker_count(workers), len(counts))
        if n_workers == 1:
            sums = [run(b) for b in range(len(counts))]
        else:
            with ThreadPoolExecutor(n_workers) as pool:
                sums = list(pool.map(run, range(len(counts))))

    total = np.sum(np.stack(sums), axis=0)
    est = (total / samples).reshape(grid.shape)
    return CovarianceEstimate(
        grid, ref, est, samples, None if stream is not None else seed,
        algorithm, density.spec,
    )


def max_error(estimate: CovarianceEstimate, oracle) -> float:
    """``max_K |estimate(K) - oracle(x_K)|``.

    ``oracle`` is an array over the grid or a callable taking the array of
    torus displacements from the reference point (shape ``counts + (d,)``).
    """
    if callable(oracle):
        oracle = oracle(estimate.grid.torus_lags(estimate.reference))
    oracle = np.broadcast_to(np.asarray(oracle, dtype=float), estimate.grid.shape)
    return float(np.max(np.abs(estimate.estimates - oracle)))


def closed_form_oracle(lags: np.ndarray) -> np.ndarray:
    """Closed-form 1D test covariance at torus displacements ``lags``."""
    return closed_form_c_1d(np.sqrt(np.sum(lags**2, axis=-1)))


def discrete_oracle(
    grid: GridSpec, density: SpectralDensity, reference: Sequence[int]
) -> np.ndarray:
    """Exact discrete covariance between ``reference`` and every grid point."""
    table = discrete_covariance_table(grid, density)
    return np.roll(table, tuple(grid.check_index(reference)), axis=tuple(range(grid.dim)))


def study_grid(level: int) -> GridSpec:
    """``2**level`` equidistant points on the periodic interval [-pi, pi)."""
    return GridSpec((2 * math.pi,), (2**level,), origin=(-math.pi,))


@dataclass
class ConvergenceRow:
    """``points`` is ``|D^n| = 2**n + 1``, counting both ends of [-pi, pi]."""

    level: int
    points: int
    error: float
    mc_floor: float


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]
    samples: int
    seed: int
    algorithm: str
    slope: float | None = None
    fitted_levels: list[int] = field(default_factory=list)

    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows])

    def is_monotone_to_floor(self) -> bool:
        """Errors do not increase until the first level at or below ``3 x floor``."""
        errs = self.errors()
        for i in range(1, len(errs)):
            if errs[i - 1] <= SLOPE_FLOOR_FACTOR * self.rows[i - 1].mc_floor:
                break
            if errs[i] > errs[i - 1]:
                return False
        return True


def fit_slope(points: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of ``log2(error)`` against ``log2(points)``."""
    x = np.log2(np.asarray(points, dtype=float))
    y = np.log2(np.asarray(errors, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def convergence_study(
    levels: Sequence[int],
    samples: int,
    algorithm: str = "one_fft_recursive",
    seed: int = 0,
    *,
    workers: int | None = None,
    backend: DftBackend | str | None = None,
) -> ConvergenceReport:
    """Max covariance error against the closed form on refined grids.

    The slope of ``log2 e`` against ``log2 |D^n|`` is fitted over levels
    whose error exceeds three times the Monte-Carlo floor; with fewer than
    two such levels it is left unset.
    """
    levels = sorted(set(int(n) for n in levels))
    if not levels or levels[0] < 2 or levels[-1] > 12:
        raise ValueError(f"levels must lie within 2..12, got {levels}")
    algorithm = resolve_algorithm(algorithm)
    density = Test1dDensity()
    rows = []
    for n in levels:
        grid = study_grid(n)
        reference = (grid.counts[0] // 2,)  # x = 0
        est = estimate_covariance(
            grid, density, algorithm, samples, reference, seed + n,
            workers=workers, backend=backend,
        )
        # x = pi coincides with x = -pi on the torus, so the max over the
        # 2**n periodic points equals the max over all 2**n + 1 points of D^n
        err = max_error(est, closed_form_oracle)
        rows.append(ConvergenceRow(n, grid.size + 1, err, mc_floor(samples)))
        log.info("level %d: |D|=%d e=%.3e", n, grid.size + 1, err)

    report = ConvergenceReport(rows, samples, seed, algorithm)
    fit = [r for r in rows if r.error > SLOPE_FLOOR_FACTOR * r.mc_floor]
    report.fitted_levels = [r.level for r in fit]
    if len(fit) >= 2:
        report.slope = fit_slope([r.points for r in fit], [r.error for r in fit])
    else:
        log.warning(
            "only %d level(s) above the Monte-Carlo floor; slope not fitted", len(fit)
        )
    return report
