"""Conjugate-representative index sets and Hermitian noise spectra.

For even point counts every index ``K`` of the lattice pairs with ``-K``
except the ``2**d`` self-conjugate indices (all components in ``{0, N_i/2}``).
A representative set holds all self-conjugate indices and one index of each
pair. Drawing noise on it and filling the rest by conjugation gives a spectrum
whose inverse DFT is real.

The representative set is stored as rectangular blocks. Each block is a Cartesian
product of per-axis index ranges, so spectra are assembled with slice copies
rather than scatter loops.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grid import GridSpec, reflect, self_conjugate_mask
from .spectral import DensityError, SpectralDensity
from .streams import GaussianStream

SpectrumMode = Literal["exact_set", "overwrite"]
MODES = ("exact_set", "overwrite")

Ranges = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Block:
    """Cartesian product of per-axis unions of half-open ranges."""

    ranges: tuple[Ranges, ...]
    paired: bool

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(sum(b - a for a, b in axis) for axis in self.ranges)

    @property
    def size(self) -> int:
        return math.prod(self.lengths)

    def axis_values(self) -> list[np.ndarray]:
        return [
            np.concatenate([np.arange(a, b) for a, b in axis]) for axis in self.ranges
        ]

    def indices(self) -> np.ndarray:
        if self.size == 0:
            return np.empty((0, len(self.ranges)), dtype=np.int64)
        mesh = np.meshgrid(*self.axis_values(), indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, len(self.ranges))


@dataclass(frozen=True)
class ConjugateRepSet:
    """Representative set: self-conjugate block first, then the paired blocks."""

    grid: GridSpec
    blocks: tuple[Block, ...]

    @functools.cached_property
    def reps(self) -> np.ndarray:
        """Representatives as an ``(n, d)`` integer array, in draw order."""
        return np.concatenate([b.indices() for b in self.blocks])

    @property
    def n_self_conjugate(self) -> int:
        return 2**self.grid.dim

    @property
    def self_conjugate(self) -> np.ndarray:
        return self.reps[: self.n_self_conjugate]

    @property
    def paired(self) -> np.ndarray:
        return self.reps[self.n_self_conjugate :]

    def __len__(self) -> int:
        return sum(b.size for b in self.blocks)


@functools.lru_cache(maxsize=64)
def build_conjugate_reps(grid: GridSpec) -> ConjugateRepSet:
    """Representative set built subset by subset.

    For every nonempty subset ``j_1 < ... < j_n`` of the axes (in lexicographic
    order, by size): ``k_{j_1}`` runs over ``1..M-1``, the other chosen axes over
    ``1..N-1`` without ``M``, and the unchosen axes over ``{0, M}``.
    """
    counts = grid.counts
    d = grid.dim
    half = [n // 2 for n in counts]
    corners = tuple(((0, 1), (m, m + 1)) for m in half)
    blocks = [Block(corners, paired=False)]
    for n in range(1, d + 1):
        for subset in itertools.combinations(range(d), n):
            axes = list(corners)
            first, rest = subset[0], subset[1:]
            axes[first] = ((1, half[first]),)
            for j in rest:
                axes[j] = ((1, half[j]), (half[j] + 1, counts[j]))
            blocks.append(Block(tuple(_drop_empty(r) for r in axes), paired=True))
    return ConjugateRepSet(grid, tuple(blocks))


def _drop_empty(ranges: Ranges) -> Ranges:
    return tuple((a, b) for a, b in ranges if b > a)


@dataclass(frozen=True)
class HermitianSpectrum:
    grid: GridSpec
    values: np.ndarray


def verify_hermitian(spectrum: HermitianSpectrum) -> bool:
    """Exact check of ``V(-K) == conj(V(K))`` and realness at self-conjugate ``K``."""
    v = np.asarray(spectrum.values)
    d = spectrum.grid.dim
    if v.shape != spectrum.grid.shape:
        return False
    if not np.array_equal(reflect(v, d), np.conj(v)):
        return False
    return bool(np.all(v.imag[self_conjugate_mask(spectrum.grid)] == 0))


def check_dims(grid: GridSpec, density: SpectralDensity) -> None:
    if density.dim != grid.dim:
        raise DensityError(
            f"density is {density.dim}-dimensional, grid is {grid.dim}-dimensional"
        )


@functools.lru_cache(maxsize=32)
def sqrt_density_table(grid: GridSpec, density: SpectralDensity) -> np.ndarray:
    """``gamma(p_K)**0.5`` on the wrapped frequency lattice (read-only)."""
    check_dims(grid, density)
    g = np.broadcast_to(density.ordinary(grid.open_frequencies()), grid.shape)
    if not np.all(np.isfinite(g)):
        raise DensityError(f"density {density.spec} is not finite on the grid")
    if np.any(g < 0):
        raise DensityError(f"density {density.spec} is negative on the grid")
    table = np.sqrt(g)
    table.flags.writeable = False
    return table


def _segments(ranges: Ranges, n: int):
    """(dest, src, neg_dest) slices for one axis of a block."""
    out = []
    offset = 0
    for a, b in ranges:
        src = slice(offset, offset + b - a)
        neg = slice(0, 1) if a == 0 else slice(n - a, n - b, -1)
        out.append((slice(a, b), src, neg))
        offset += b - a
    return out


@functools.lru_cache(maxsize=64)
def _exact_set_plan(grid: GridSpec, stop: int):
    """Slice copies for :func:`_fill_exact_set` writing ``k_d < stop``.

    One entry per block: ``(start, width, paired, lengths, moves)`` with
    ``moves`` a list of ``(dest, src, neg)`` index tuples; ``dest`` or ``neg``
    is ``None`` when it falls outside the output.
    """
    plan = []
    pos = 0
    for block in build_conjugate_reps(grid).blocks:
        if block.size == 0:
            continue
        width = 2 * block.size if block.paired else block.size
        moves = []
        per_axis = [_segments(r, n) for r, n in zip(block.ranges, grid.counts)]
        for combo in itertools.product(*per_axis):
            dest = (slice(None),) + tuple(c[0] for c in combo)
            src = (slice(None),) + tuple(c[1] for c in combo)
            neg = (slice(None),) + tuple(c[2] for c in combo)
            dest_in = combo[-1][0].stop <= stop
            neg_in = block.paired and combo[-1][2].start < stop
            if dest_in or neg_in:
                moves.append((dest if dest_in else None, src, dest[1:], neg if neg_in else None))
        plan.append((pos, width, block.paired, block.lengths, tuple(moves)))
        pos += width
    return tuple(plan), pos


def _fill_exact_set(out, reps: ConjugateRepSet, z, sqrt_g, sign):
    """Fill ``out`` from the representative blocks.

    ``out`` may hold only ``k_d <= N_d/2`` along the last axis; writes beyond
    its extent are skipped. ``sign = -1`` stores the conjugate spectrum.
    ``z`` is scaled in place.
    """
    batch = out.shape[0]
    plan, total = _exact_set_plan(reps.grid, out.shape[-1])
    # paired draws follow the 2**d self-conjugate ones; (re, im) pairs are
    # adjacent, so a paired block reads as complex without a copy
    z[:, reps.n_self_conjugate :] *= math.sqrt(0.5)
    for pos, width, paired, lengths, moves in plan:
        raw = z[:, pos : pos + width]
        if paired:
            raw = raw.view(complex)
        raw = raw.reshape((batch,) + lengths)
        for dest, src, gdx, neg in moves:
            if dest is not None:
                target = out[dest]
                np.multiply(raw[src], sqrt_g[gdx], out=target)
            else:
                target = raw[src] * sqrt_g[gdx]
            if not paired:
                continue
            if sign < 0:
                np.conjugate(target, out=target)
            if neg is not None:
                np.conjugate(target, out=out[neg])
    return total


@dataclass(frozen=True)
class _OverwritePlan:
    # (first_row, stop_row, draw_offset, is_corner_row); rows index the
    # flattened leading axes, each row holding k_d = 0..N_d/2
    runs: tuple[tuple[int, int, int, bool], ...]
    corner_cells: tuple[tuple[int, ...], ...]
    total: int
    plane_keep: np.ndarray


@functools.lru_cache(maxsize=32)
def _overwrite_plan(grid: GridSpec) -> _OverwritePlan:
    lead = grid.shape[:-1]
    m = grid.counts[-1] // 2
    rows = math.prod(lead)
    # rows whose leading components are all in {0, M_i} contain two
    # self-conjugate cells (k_d = 0 and k_d = M_d) drawing one variate each
    corner_rows = sorted(
        int(np.ravel_multi_index(c, lead)) if lead else 0
        for c in itertools.product(*[(0, n // 2) for n in lead])
    )
    runs = []
    row, offset = 0, 0
    for c in corner_rows:
        if c > row:
            runs.append((row, c, offset, False))
            offset += (c - row) * 2 * (m + 1)
        runs.append((c, c + 1, offset, True))
        offset += 2 * m
        row = c + 1
    if row < rows:
        runs.append((row, rows, offset, False))
        offset += (rows - row) * 2 * (m + 1)
    corners = tuple(
        c + (kd,)
        for c in itertools.product(*[(0, n // 2) for n in lead])
        for kd in (0, m)
    )
    lin = np.arange(rows).reshape(lead)
    keep = lin >= reflect(lin, grid.dim - 1) if lead else np.array(True)
    return _OverwritePlan(tuple(runs), corners, offset, keep)


def _fill_overwrite(out, grid: GridSpec, z, sqrt_g, sign):
    """Half-lattice sweep ``k_d = 0..N_d/2``; later cells overwrite earlier conjugates.

    ``out`` may hold only the half lattice; ``sign = -1`` stores the conjugate.
    """
    plan = _overwrite_plan(grid)
    d = grid.dim
    m = grid.counts[-1] // 2
    batch = out.shape[0]
    flat = out.reshape(batch, -1, out.shape[-1])
    for r0, r1, off, corner in plan.runs:
        if not corner:
            raw = z[:, off : off + (r1 - r0) * 2 * (m + 1)]
            raw = raw.reshape(batch, r1 - r0, m + 1, 2)
            flat[:, r0:r1, : m + 1].real = raw[..., 0]
            flat[:, r0:r1, : m + 1].imag = sign * raw[..., 1]
        else:
            raw = z[:, off : off + 2 * m]
            flat[:, r0, 0] = raw[:, 0]
            pairs = raw[:, 1 : 2 * m - 1].reshape(batch, m - 1, 2)
            flat[:, r0, 1:m].real = pairs[..., 0]
            flat[:, r0, 1:m].imag = sign * pairs[..., 1]
            flat[:, r0, m] = raw[:, 2 * m - 1]
    half = out[..., : m + 1]
    half *= sqrt_g[..., : m + 1] * math.sqrt(0.5)
    for cell in plan.corner_cells:
        out[(slice(None),) + cell] *= math.sqrt(2.0)
    if out.shape[-1] > m + 1:
        # interior slab: unique conjugate partner in k_d = N_d/2+1..N_d-1
        _conj_reflect_into(out[..., m + 1 :], out[..., 1:m][..., ::-1], d - 1)
    perm = _plane_reflection(grid.shape[:-1])
    keep = plan.plane_keep.reshape(-1)
    for kd in (0, m):
        plane = flat[:, :, kd]
        flat[:, :, kd] = np.where(keep, plane, np.conj(plane[:, perm]))
    return plan.total


def _conj_reflect_into(dst, src, nlead, conj=True):
    """``dst[:, K, ...] = conj(src[:, -K, ...])`` with ``K`` over axes ``1..nlead``."""
    op = np.conjugate if conj else np.copyto
    if nlead == 0:
        return op(src, out=dst) if conj else op(dst, src)
    segs = [((slice(0, 1), slice(0, 1)), (slice(1, None), slice(None, 0, -1)))] * nlead
    for combo in itertools.product(*segs):
        d_idx = (slice(None),) + tuple(c[0] for c in combo)
        s_idx = (slice(None),) + tuple(c[1] for c in combo)
        if conj:
            np.conjugate(src[s_idx], out=dst[d_idx])
        else:
            np.copyto(dst[d_idx], src[s_idx])


def draws_per_spectrum(grid: GridSpec, mode: SpectrumMode) -> int:
    if mode == "exact_set":
        return grid.size
    if mode == "overwrite":
        return _overwrite_plan(grid).total
    raise ValueError(f"unknown spectrum mode {mode!r}; expected one of {MODES}")


def spectrum_batch(
    grid: GridSpec,
    sqrt_g: np.ndarray,
    rng: GaussianStream,
    mode: SpectrumMode,
    batch: int,
    *,
    half: bool = False,
    conjugate: bool = False,
) -> np.ndarray:
    """``batch`` Hermitian spectra ``w(K) * gamma(p_K)**0.5``, shape ``(batch, *counts)``.

    Sample ``b`` uses row ``b`` of one ``(batch, draws)`` request to ``rng``.
    ``half`` keeps only ``k_d = 0..N_d/2`` (what a c2r transform reads);
    ``conjugate`` returns the complex conjugate spectrum. Neither changes the
    draws consumed.
    """
    n = draws_per_spectrum(grid, mode)
    z = rng.normal((batch, n))
    last = grid.counts[-1] // 2 + 1 if half else grid.counts[-1]
    out = np.empty((batch,) + grid.shape[:-1] + (last,), dtype=complex)
    sign = -1.0 if conjugate else 1.0
    if mode == "exact_set":
        used = _fill_exact_set(out, build_conjugate_reps(grid), z, sqrt_g, sign)
    else:
        used = _fill_overwrite(out, grid, z, sqrt_g, sign)
    assert used == n
    return out


def planes_hermitian(half: np.ndarray, ndim: int) -> bool:
    """Exact Hermitian check of the ``k_d = 0`` and ``k_d = N_d/2`` planes.

    These are the only entries of a half spectrum constrained by symmetry; if
    they pass, the half extends to a full Hermitian spectrum.
    """
    m = half.shape[-1] - 1
    lead = half.shape[half.ndim - ndim : -1]
    perm = _plane_reflection(lead)
    rows = half.reshape(half.shape[: half.ndim - ndim] + (-1, m + 1))
    for kd in (0, m):
        plane = rows[..., kd]
        if not np.array_equal(plane[..., perm], np.conj(plane)):
            return False
    return True


@functools.lru_cache(maxsize=64)
def _plane_reflection(lead: tuple[int, ...]) -> np.ndarray:
    """Flat positions of ``-K`` for ``K`` over an array of shape ``lead``."""
    if not lead:
        return np.zeros(1, dtype=np.intp)
    lin = np.arange(math.prod(lead)).reshape(lead)
    return reflect(lin, len(lead)).ravel()


def _reflect_axes(values, axes):
    if not axes:
        return values
    return np.roll(np.flip(values, axis=axes), 1, axis=axes)


def hermitian_extend(half: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Full spectrum from its ``k_d <= N_d/2`` half, filling the rest by conjugation."""
    ndim = len(shape)
    n = shape[-1]
    m = n // 2
    full = np.empty(half.shape[:-1] + (n,), dtype=complex)
    full[..., : m + 1] = half
    lead = tuple(range(full.ndim - ndim, full.ndim - 1))
    full[..., m + 1 :] = np.conj(_reflect_axes(half[..., 1:m], lead))[..., ::-1]
    return full


def synthesize_spectrum(
    grid: GridSpec,
    density: SpectralDensity,
    rng: GaussianStream,
    mode: SpectrumMode = "exact_set",
) -> HermitianSpectrum:
    """One Hermitian spectrum with ``E|V(K)|**2 = gamma(p_K)``."""
    sqrt_g = sqrt_density_table(grid, density)
    values = spectrum_batch(grid, sqrt_g, rng, mode, 1)[0]
    return HermitianSpectrum(grid, values)
