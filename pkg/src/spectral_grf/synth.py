"""Field synthesis and the exact discrete covariance.

Every algorithm produces fields with the law

    B(x_J) = |A|**-0.5 * sum_K exp(-2 pi i k.j / N) gamma(p_K)**0.5 w(K)

where ``w`` is unit-variance Hermitian noise and ``|A|`` the domain volume.
The covariance is then

    E[B(x_J) B(x_J')] = |A|**-1 * sum_K gamma(p_K) cos(2 pi k.(j - j') / N),

a Riemann sum of the spectral integral with frequency step ``1/l_i``.

``two_fft`` transforms white noise of variance ``1/|cell|`` (forward), filters
it and transforms back. ``one_fft_overwrite`` and ``one_fft_recursive`` build
the Hermitian spectrum directly and need a single inverse transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .dft import DftBackend, RealnessError, get_backend, real_part_checked
from .grid import GridSpec
from .hermitian import (
    check_dims,
    draws_per_spectrum,
    planes_hermitian,
    spectrum_batch,
    sqrt_density_table,
)
from .spectral import SpectralDensity
from .streams import GaussianStream, SeededStream

Algorithm = Literal["two_fft", "one_fft_overwrite", "one_fft_recursive"]
ALGORITHMS: tuple[str, ...] = ("two_fft", "one_fft_overwrite", "one_fft_recursive")

ALIASES = {
    "two-fft": "two_fft",
    "one-fft": "one_fft_overwrite",
    "overwrite": "one_fft_overwrite",
    "recursive": "one_fft_recursive",
}

_SPECTRUM_MODE = {"one_fft_overwrite": "overwrite", "one_fft_recursive": "exact_set"}


def resolve_algorithm(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in ALGORITHMS:
        raise ValueError(
            f"unknown algorithm {name!r}; expected one of {ALGORITHMS + tuple(ALIASES)}"
        )
    return name


@dataclass(frozen=True)
class RealField:
    grid: GridSpec
    values: np.ndarray
    algorithm: str
    density: str
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)


def count_draws(grid: GridSpec, algorithm: str) -> int:
    """Standard-normal variates one synthesis consumes."""
    algorithm = resolve_algorithm(algorithm)
    if algorithm == "two_fft":
        return grid.size
    return draws_per_spectrum(grid, _SPECTRUM_MODE[algorithm])


def synthesize_batch(
    grid: GridSpec,
    density: SpectralDensity,
    rng: GaussianStream,
    algorithm: str = "one_fft_recursive",
    batch: int = 1,
    backend: DftBackend | str | None = None,
) -> np.ndarray:
    """``batch`` independent fields as an array of shape ``(batch, *counts)``."""
    algorithm = resolve_algorithm(algorithm)
    backend = get_backend(backend)
    check_dims(grid, density)
    sqrt_g = sqrt_density_table(grid, density)
    d = grid.dim
    if algorithm == "two_fft":
        z = rng.normal((batch,) + grid.shape)
        z *= math.sqrt(1.0 / grid.cell_volume)
        spec = backend.forward(z, d)
        spec *= sqrt_g
        return real_part_checked(backend.inverse(spec, d))
    # the field is inverse(V) = irfft(conj(V)); only the half of conj(V) is built
    half = spectrum_batch(
        grid, sqrt_g, rng, _SPECTRUM_MODE[algorithm], batch, half=True, conjugate=True
    )
    if not planes_hermitian(half, d):
        raise RealnessError("spectrum is not Hermitian on the k_d = 0, N_d/2 planes")
    out = backend.irfft(half, grid.shape)
    out *= grid.size / math.sqrt(grid.volume)
    return out


def synthesize(
    grid: GridSpec,
    density: SpectralDensity,
    rng: GaussianStream | int,
    algorithm: str = "one_fft_recursive",
    backend: DftBackend | str | None = None,
) -> RealField:
    """One field. ``rng`` may be a stream or an integer seed."""
    seed = None
    if not isinstance(rng, GaussianStream):
        seed = int(rng)
        rng = SeededStream(seed)
    elif isinstance(rng, SeededStream):
        seed = rng.seed
    algorithm = resolve_algorithm(algorithm)
    values = synthesize_batch(grid, density, rng, algorithm, 1, backend)[0]
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("synthesised field has non-finite values")
    return RealField(grid, values, algorithm, density.spec, seed)


def _check_lag(grid: GridSpec, lag: Sequence[int]) -> tuple[int, ...]:
    lag = tuple(int(v) for v in lag)
    if len(lag) != grid.dim:
        raise ValueError(f"lag {lag} has {len(lag)} components, grid has {grid.dim}")
    return tuple(v % n for v, n in zip(lag, grid.counts))


def exact_discrete_covariance(
    grid: GridSpec, density: SpectralDensity, lag: Sequence[int]
) -> float:
    """Covariance of synthesised fields between points ``lag`` grid steps apart.

    Direct O(P) cosine sum; integer phases are reduced modulo ``N_i`` first.
    """
    lag = _check_lag(grid, lag)
    g = sqrt_density_table(grid, density) ** 2
    phase = 0.0
    for i, (n, j) in enumerate(zip(grid.counts, lag)):
        k = np.arange(n)
        shape = (1,) * i + (n,) + (1,) * (grid.dim - i - 1)
        phase = phase + ((k * j) % n / n).reshape(shape)
    return float(np.sum(g * np.cos(2.0 * np.pi * phase)) / grid.volume)


def discrete_covariance_table(
    grid: GridSpec, density: SpectralDensity, backend: DftBackend | str | None = None
) -> np.ndarray:
    """Exact covariance for every lag at once, indexed by lag (shape ``counts``)."""
    g = sqrt_density_table(grid, density) ** 2
    half = g[..., : grid.counts[-1] // 2 + 1].astype(complex)
    backend = get_backend(backend)
    # g is real and even, so inverse(g) = irfft(g)
    return backend.irfft(half, grid.shape) * (grid.size / grid.volume)
