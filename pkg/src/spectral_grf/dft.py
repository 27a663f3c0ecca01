"""Multidimensional DFT backends.

Conventions, over the trailing ``ndim`` axes with ``P = prod(N_i)``::

    forward(a)[K] = sum_J a[J] exp(+2 pi i sum_i k_i j_i / N_i)
    inverse(a)[J] = P**-1 sum_K a[K] exp(-2 pi i sum_i k_i j_i / N_i)

``irfft(half, shape)`` takes the ``k_d <= N_d/2`` half of a Hermitian
spectrum ``Y`` and returns the real array ``P**-1 sum_K Y[K] exp(+2 pi i k.j/N)``,
which equals ``inverse(conj(Y))``.
"""

from __future__ import annotations

import math
import os
from typing import Protocol

import numpy as np
import scipy.fft

from .hermitian import hermitian_extend


class RealnessError(ArithmeticError):
    """Inverse transform left an imaginary part above tolerance."""


REALNESS_TOL = 1e-10


def imag_residue(values: np.ndarray) -> float:
    """``max|Im| / max|Re|`` (0 for an all-zero array)."""
    scale = float(np.max(np.abs(values.real), initial=0.0))
    resid = float(np.max(np.abs(values.imag), initial=0.0))
    if resid == 0.0:
        return 0.0
    return resid / scale if scale > 0 else math.inf


def real_part_checked(values: np.ndarray, tol: float = REALNESS_TOL) -> np.ndarray:
    resid = imag_residue(values)
    if resid >= tol:
        raise RealnessError(f"imaginary residue {resid:.3e} exceeds {tol:.0e}")
    return np.ascontiguousarray(values.real)


class DftBackend(Protocol):
    name: str

    def forward(self, a: np.ndarray, ndim: int) -> np.ndarray: ...

    def inverse(self, a: np.ndarray, ndim: int) -> np.ndarray: ...

    def irfft(self, half: np.ndarray, shape: tuple[int, ...]) -> np.ndarray: ...


_CPUS = os.cpu_count() or 1


def _workers() -> int:
    try:
        n = int(os.environ.get("GRF_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else _CPUS


class ScipyBackend:
    """scipy.fft (pocketfft); ``irfft`` is the c2r transform."""

    name = "scipy"

    def forward(self, a, ndim):
        axes = tuple(range(-ndim, 0))
        return scipy.fft.ifftn(a, axes=axes, norm="forward", workers=_workers())

    def inverse(self, a, ndim):
        axes = tuple(range(-ndim, 0))
        return scipy.fft.fftn(a, axes=axes, norm="forward", workers=_workers())

    def irfft(self, half, shape):
        axes = tuple(range(-len(shape), 0))
        return scipy.fft.irfftn(half, s=shape, axes=axes, workers=_workers())


class NaiveBackend:
    """Direct O(P**2) summation, for cross-checking at small sizes."""

    name = "naive"
    max_points = 4096

    def __init__(self, chunk: int = 256):
        self.chunk = chunk

    def _transform(self, a, ndim, sign):
        shape = a.shape[-ndim:]
        p = math.prod(shape)
        if p > self.max_points:
            raise ValueError(f"naive DFT limited to {self.max_points} points, got {p}")
        idx = np.indices(shape).reshape(ndim, p)
        flat = np.asarray(a, dtype=complex).reshape(-1, p)
        out = np.empty_like(flat)
        for start in range(0, p, self.chunk):
            k = idx[:, start : start + self.chunk]
            # exact integer phase numerators, reduced per axis before scaling
            frac = np.zeros((k.shape[1], p))
            for i, n in enumerate(shape):
                frac += np.outer(k[i], idx[i]) % n / n
            kernel = np.exp(sign * 2j * np.pi * frac)
            out[:, start : start + self.chunk] = flat @ kernel.T
        return out.reshape(a.shape)

    def forward(self, a, ndim):
        return self._transform(a, ndim, +1)

    def inverse(self, a, ndim):
        p = math.prod(a.shape[-ndim:])
        return self._transform(a, ndim, -1) / p

    def irfft(self, half, shape):
        full = hermitian_extend(half, shape)
        return real_part_checked(self.forward(full, len(shape)) / math.prod(shape))


BACKENDS = {"scipy": ScipyBackend, "naive": NaiveBackend}


def get_backend(name: str | DftBackend | None = None) -> DftBackend:
    if name is None:
        return ScipyBackend()
    if isinstance(name, str):
        try:
            return BACKENDS[name]()
        except KeyError:
            raise ValueError(f"unknown DFT backend {name!r}") from None
    return name
