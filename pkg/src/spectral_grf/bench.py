"""Wall-clock benchmark of the synthesis algorithms."""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import GridSpec
from .spectral import SpectralDensity
from .streams import SeededStream
from .synth import ALGORITHMS, count_draws, resolve_algorithm, synthesize_batch

MIN_REPEAT = 5
MIN_SAMPLE_SECONDS = 0.02


@dataclass
class BenchRow:
    algorithm: str
    points: int
    repeat: int
    median_seconds: float
    draws: int
    counts: tuple[int, ...] = ()
    loops: int = 1


def time_synthesis(
    grid: GridSpec,
    density: SpectralDensity,
    algorithm: str,
    repeat: int,
    seed: int = 0,
    backend=None,
    min_sample: float = MIN_SAMPLE_SECONDS,
) -> BenchRow:
    """Median seconds per synthesis over ``repeat`` samples.

    Like :mod:`timeit`, each sample runs enough back-to-back syntheses to last
    ``min_sample`` seconds, so sub-millisecond grids are not timer noise.
    """
    if repeat < MIN_REPEAT:
        raise ValueError(f"repeat must be >= {MIN_REPEAT}, got {repeat}")
    algorithm = resolve_algorithm(algorithm)
    # warm-up fills the density and index caches and calibrates the loop count
    warm = SeededStream(seed, key=(repeat, 0))
    synthesize_batch(grid, density, warm, algorithm, 1, backend)
    warm = SeededStream(seed, key=(repeat, 1))
    t0 = time.perf_counter()
    synthesize_batch(grid, density, warm, algorithm, 1, backend)
    single = time.perf_counter() - t0
    loops = max(1, math.ceil(min_sample / max(single, 1e-9)))

    times = []
    draws = None
    for r in range(repeat):
        streams = [SeededStream(seed, key=(r, i)) for i in range(loops)]
        t0 = time.perf_counter()
        for rng in streams:
            synthesize_batch(grid, density, rng, algorithm, 1, backend)
        times.append((time.perf_counter() - t0) / loops)
        counts = {rng.drawn for rng in streams}
        if len(counts) != 1 or (draws is not None and counts != {draws}):
            raise RuntimeError("draw count changed between runs")
        draws = counts.pop()
    if draws != count_draws(grid, algorithm):
        raise RuntimeError(
            f"{algorithm} drew {draws} variates, expected {count_draws(grid, algorithm)}"
        )
    return BenchRow(
        algorithm, grid.size, repeat, statistics.median(times), draws, grid.counts, loops
    )


def run_benchmark(
    grids: Sequence[GridSpec],
    density_for: callable,
    algorithms: Sequence[str] = ALGORITHMS,
    repeat: int = 7,
    seed: int = 0,
    backend=None,
    min_sample: float = MIN_SAMPLE_SECONDS,
) -> list[BenchRow]:
    """``density_for(grid)`` supplies the density for each grid."""
    rows = []
    for grid in grids:
        density = density_for(grid)
        for alg in algorithms:
            rows.append(time_synthesis(grid, density, alg, repeat, seed, backend, min_sample))
    return rows


def speedups(rows: Sequence[BenchRow], baseline: str = "two_fft") -> dict:
    """``{(counts, algorithm): baseline_median / median}`` for non-baseline rows."""
    base = {r.counts: r.median_seconds for r in rows if r.algorithm == baseline}
    return {
        (r.counts, r.algorithm): base[r.counts] / r.median_seconds
        for r in rows
        if r.algorithm != baseline and r.counts in base
    }


def fit_linearithmic(points: Sequence[int], seconds: Sequence[float]):
    """Fit ``t = c P log2 P`` in log space; returns ``(c, relative deviations)``."""
    p = np.asarray(points, dtype=float)
    t = np.asarray(seconds, dtype=float)
    model = p * np.log2(p)
    c = float(np.exp(np.mean(np.log(t / model))))
    return c, np.abs(t / (c * model) - 1.0)


def square_grid(points: int, length: float = 1.0) -> GridSpec:
    side = math.isqrt(points)
    if side * side != points:
        raise ValueError(f"{points} is not a perfect square")
    return GridSpec((length, length), (side, side))
