"""Standard-normal draw streams.

Synthesis routines take a stream rather than a generator so draws can be
counted, rigged (impulse tests) or bounded. Every stream tracks ``drawn``, the
total number of variates handed out.
"""

from __future__ import annotations

import numpy as np


class StreamExhausted(RuntimeError):
    pass


class GaussianStream:
    """Base class; subclasses implement :meth:`_draw`."""

    def __init__(self):
        self.drawn = 0

    def normal(self, shape) -> np.ndarray:
        """Draw i.i.d. N(0, 1) variates, filled in row-major order."""
        shape = (shape,) if np.isscalar(shape) else tuple(shape)
        n = int(np.prod(shape, dtype=np.int64))
        out = self._draw(n).reshape(shape)
        self.drawn += n
        return out

    def _draw(self, n: int) -> np.ndarray:
        raise NotImplementedError


class SeededStream(GaussianStream):
    """PCG64 stream keyed by ``(seed, *key)`` through :class:`numpy.random.SeedSequence`."""

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        super().__init__()
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def _draw(self, n):
        return self._gen.standard_normal(n)


def substream(seed: int, block: int) -> SeededStream:
    """Stream for sample block ``block`` of a batch run seeded with ``seed``.

    Pure function of its arguments, so a batch gives the same draws however the
    blocks are spread over workers.
    """
    return SeededStream(seed, key=(block,))


class ArrayStream(GaussianStream):
    """Replays a fixed array of values, then raises :class:`StreamExhausted`."""

    def __init__(self, values):
        super().__init__()
        self._values = np.asarray(values, dtype=float).ravel()
        self._pos = 0

    @property
    def remaining(self) -> int:
        return self._values.size - self._pos

    def _draw(self, n):
        if n > self.remaining:
            raise StreamExhausted(
                f"requested {n} draws, only {self.remaining} left in stream"
            )
        out = self._values[self._pos : self._pos + n].copy()
        self._pos += n
        return out


class ZeroStream(GaussianStream):
    """Returns zeros forever; synthesised fields are identically zero."""

    def _draw(self, n):
        return np.zeros(n)
