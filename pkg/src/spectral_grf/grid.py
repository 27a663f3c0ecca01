"""Rectangular periodic grids, index arithmetic and frequency mapping.

Indices are plain tuples of ints (``MultiIndex``); every operation on them is
taken modulo the point count of the corresponding axis, so the grid is a torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

MultiIndex = tuple[int, ...]


class GridError(ValueError):
    """Raised for malformed grids or indices that do not fit a grid."""


@dataclass(frozen=True)
class GridSpec:
    """Equidistant grid on ``prod_i [origin_i, origin_i + lengths_i)``.

    ``counts`` must all be even; the pairing of frequencies ``K`` and ``-K``
    relies on it.
    """

    lengths: tuple[float, ...]
    counts: tuple[int, ...]
    origin: tuple[float, ...] = field(default=())

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.lengths)
        counts = tuple(self.counts)
        if len(lengths) == 0:
            raise GridError("grid needs at least one dimension")
        if len(lengths) != len(counts):
            raise GridError(
                f"{len(lengths)} lengths given for {len(counts)} point counts"
            )
        for n in counts:
            if isinstance(n, bool) or int(n) != n:
                raise GridError(f"point count {n!r} is not an integer")
        counts = tuple(int(n) for n in counts)
        if any(n < 2 or n % 2 for n in counts):
            raise GridError(f"point counts must be even and >= 2, got {counts}")
        if not all(math.isfinite(v) and v > 0 for v in lengths):
            raise GridError(f"edge lengths must be positive, got {lengths}")
        origin = tuple(float(v) for v in self.origin) or (0.0,) * len(counts)
        if len(origin) != len(counts):
            raise GridError("origin must have one coordinate per dimension")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def cube(cls, length: float, count: int, dim: int) -> "GridSpec":
        return cls((length,) * dim, (count,) * dim)

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    @property
    def size(self) -> int:
        """Total number of grid points."""
        return math.prod(self.counts)

    @property
    def half_counts(self) -> tuple[int, ...]:
        return tuple(n // 2 for n in self.counts)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(l / n for l, n in zip(self.lengths, self.counts))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @property
    def volume(self) -> float:
        return math.prod(self.lengths)

    def check_index(self, index: Sequence[int]) -> MultiIndex:
        k = tuple(int(v) for v in index)
        if len(k) != self.dim:
            raise GridError(f"index {k} has {len(k)} components, grid has {self.dim}")
        if any(not 0 <= v < n for v, n in zip(k, self.counts)):
            raise GridError(f"index {k} out of range for counts {self.counts}")
        return k

    def ravel(self, index: Sequence[int]) -> int:
        """Row-major position of ``index`` in ``[0, size)``."""
        return int(np.ravel_multi_index(self.check_index(index), self.counts))

    def unravel(self, position: int) -> MultiIndex:
        if not 0 <= position < self.size:
            raise GridError(f"position {position} out of range [0, {self.size})")
        return tuple(int(v) for v in np.unravel_index(position, self.counts))

    def indices(self) -> Iterator[MultiIndex]:
        """All indices in row-major order."""
        return iter(np.ndindex(*self.counts))

    def coordinates(self, index: Sequence[int]) -> tuple[float, ...]:
        k = self.check_index(index)
        return tuple(a + j * h for a, j, h in zip(self.origin, k, self.spacing))

    def axis_coordinates(self) -> list[np.ndarray]:
        return [
            a + np.arange(n) * h
            for a, n, h in zip(self.origin, self.counts, self.spacing)
        ]

    def axis_frequencies(self) -> list[np.ndarray]:
        """Wrapped (DFT-order) frequencies per axis, Nyquist entry positive."""
        out = []
        for n, l in zip(self.counts, self.lengths):
            k = np.arange(n)
            k = np.where(k <= n // 2, k, k - n)
            out.append(k / l)
        return out

    def open_frequencies(self) -> list[np.ndarray]:
        """Per-axis frequencies shaped for broadcasting over the full grid."""
        return _open_mesh(self.axis_frequencies())

    def torus_lags(self, reference: Sequence[int]) -> np.ndarray:
        """Physical displacement of every grid point from ``reference``.

        Each component is wrapped into ``[-l_i/2, l_i/2]``; result has shape
        ``counts + (dim,)``.
        """
        ref = self.check_index(reference)
        comps = []
        for j0, n, h in zip(ref, self.counts, self.spacing):
            lag = (np.arange(n) - j0) % n
            lag = np.where(lag <= n // 2, lag, lag - n)
            comps.append(lag * h)
        mesh = np.meshgrid(*comps, indexing="ij")
        return np.stack(mesh, axis=-1)


def _open_mesh(axes: list[np.ndarray]) -> list[np.ndarray]:
    d = len(axes)
    return [a.reshape((1,) * i + (-1,) + (1,) * (d - i - 1)) for i, a in enumerate(axes)]


def neg_index(index: Sequence[int], grid: GridSpec) -> MultiIndex:
    """``-K`` modulo the point counts."""
    k = grid.check_index(index)
    return tuple((n - v) % n for v, n in zip(k, grid.counts))


def is_self_conjugate(index: Sequence[int], grid: GridSpec) -> bool:
    k = grid.check_index(index)
    return all(v in (0, n // 2) for v, n in zip(k, grid.counts))


def frequency(index: Sequence[int], grid: GridSpec) -> tuple[float, ...]:
    """Physical frequency of ``index`` in DFT order.

    ``k/l`` for ``k <= N/2`` and ``(k - N)/l`` above; the set of values is the
    same as for the centred convention ``(k - N/2)/l``.
    """
    k = grid.check_index(index)
    return tuple(
        (v if v <= n // 2 else v - n) / l
        for v, n, l in zip(k, grid.counts, grid.lengths)
    )


def reflect(values: np.ndarray, ndim: int) -> np.ndarray:
    """Return ``out[..., K] = values[..., -K mod N]`` over the trailing ``ndim`` axes."""
    axes = tuple(range(values.ndim - ndim, values.ndim))
    return np.roll(np.flip(values, axis=axes), 1, axis=axes)


def self_conjugate_mask(grid: GridSpec) -> np.ndarray:
    masks = []
    for n in grid.counts:
        m = np.zeros(n, dtype=bool)
        m[[0, n // 2]] = True
        masks.append(m)
    out = np.ones(grid.shape, dtype=bool)
    for m in _open_mesh(masks):
        out = out & m
    return out
