"""Spectral densities and closed-form covariance oracles.

A density here is the Lebesgue density of the spectral measure of a
stationary covariance. Two Fourier conventions occur in practice:

* ordinary frequency, ``C(r) = int exp(-2 pi i p.r) gamma(p) dp``;
* angular frequency, ``C(r) = int exp(-i w.r) gamma(w) dw``.

Each density declares its convention; :meth:`SpectralDensity.ordinary`
always returns the ordinary-frequency density, which is what the synthesis
code consumes. Degree -2 members of the polynomial family (e.g.
``poly:m=1,k=1,l=1,n=1`` in 2D) are not integrable, so the underlying field
has infinite variance and grid samples do not converge as the grid is refined.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class DensityError(ValueError):
    pass


class SpectralDensity:
    """Even, nonnegative function on R^d.

    Subclasses implement :meth:`_evaluate`, which receives one array per
    component (mutually broadcastable) and returns the density values.
    """

    dim: int
    angular: bool = False

    def _evaluate(self, comps: Sequence[np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    @property
    def spec(self) -> str:
        """Spec string accepted by :func:`parse_density`."""
        raise NotImplementedError

    def __call__(self, p) -> np.ndarray | float:
        p = np.asarray(p, dtype=float)
        scalar = p.ndim <= 1
        p = np.atleast_1d(p)
        if p.shape[-1] != self.dim:
            raise DensityError(
                f"point has {p.shape[-1]} components, density is {self.dim}-dimensional"
            )
        out = self._evaluate([p[..., i] for i in range(self.dim)])
        out = np.broadcast_to(out, p.shape[:-1])
        return float(out) if scalar else out

    def ordinary(self, comps: Sequence[np.ndarray]) -> np.ndarray:
        """Density in ordinary frequency at component arrays ``comps``."""
        if len(comps) != self.dim:
            raise DensityError(
                f"{len(comps)} components given, density is {self.dim}-dimensional"
            )
        if not self.angular:
            return self._evaluate(comps)
        return TWO_PI**self.dim * self._evaluate([TWO_PI * c for c in comps])


def evaluate(density: SpectralDensity, p) -> float:
    """Value of ``density`` at the single point ``p`` (in its own convention)."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise DensityError("evaluate expects a single d-vector")
    return float(density(p))


def _sum_even_powers(comps: Sequence[np.ndarray], exps: Sequence[int]) -> np.ndarray:
    total = 0.0
    for c, k in zip(comps, exps):
        # squaring first keeps gamma(p) == gamma(-p) bit for bit
        total = total + (c * c) ** k
    return np.asarray(total, dtype=float)


def _positive_int(name: str, v) -> int:
    if isinstance(v, bool) or int(v) != v or v < 1:
        raise DensityError(f"{name} must be a positive integer, got {v!r}")
    return int(v)


@dataclass(frozen=True)
class PolyDecayDensity(SpectralDensity):
    """``(m^(k l) + (sum_i p_i^(2k))^l)^(-n)`` in ordinary frequency."""

    m: float
    k: int
    l: int
    n: int
    dim: int = 2

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m > 0):
            raise DensityError(f"m must be a positive real, got {self.m!r}")
        for name in ("k", "l", "n", "dim"):
            object.__setattr__(self, name, _positive_int(name, getattr(self, name)))
        object.__setattr__(self, "m", float(self.m))

    def _evaluate(self, comps):
        s = _sum_even_powers(comps, [self.k] * self.dim)
        return (self.m ** (self.k * self.l) + s**self.l) ** (-float(self.n))

    @property
    def spec(self) -> str:
        return f"poly:m={self.m:g},k={self.k},l={self.l},n={self.n},d={self.dim}"


@dataclass(frozen=True)
class AnisotropicDensity(SpectralDensity):
    """``(m^max(k) + sum_i p_i^(2 k_i))^(-n)`` with one exponent per axis.

    Reduces to :class:`PolyDecayDensity` with ``l = 1`` when all exponents agree.
    """

    m: float
    ks: tuple[int, ...]
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m > 0):
            raise DensityError(f"m must be a positive real, got {self.m!r}")
        ks = tuple(_positive_int("k_i", k) for k in self.ks)
        if not ks:
            raise DensityError("anisotropic density needs at least one exponent")
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "n", _positive_int("n", self.n))
        object.__setattr__(self, "m", float(self.m))

    @property
    def dim(self) -> int:
        return len(self.ks)

    def _evaluate(self, comps):
        s = _sum_even_powers(comps, self.ks)
        return (self.m ** max(self.ks) + s) ** (-float(self.n))

    @property
    def spec(self) -> str:
        ks = ",".join(f"k{i + 1}={k}" for i, k in enumerate(self.ks))
        return f"aniso:m={self.m:g},{ks},n={self.n}"


TEST1D_SCALE = 32e6 / math.pi


@dataclass(frozen=True)
class Test1dDensity(SpectralDensity):
    """``(32e6/pi) (100 + w^2)^-4``, an angular-frequency density on R.

    Its covariance is :func:`closed_form_c_1d`, with unit variance.
    """

    __test__ = False  # keep pytest from collecting the class

    dim: int = 1
    angular: bool = True

    def __post_init__(self):
        if self.dim != 1 or not self.angular:
            raise DensityError("test1d is fixed: one-dimensional, angular frequency")

    def _evaluate(self, comps):
        (w,) = comps
        return TEST1D_SCALE * (100.0 + w * w) ** -4.0

    @property
    def spec(self) -> str:
        return "test1d"


@dataclass(frozen=True)
class ConstantDensity(SpectralDensity):
    """Constant density; its grid samples are discrete white noise."""

    c: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c >= 0):
            raise DensityError(f"constant must be finite and >= 0, got {self.c!r}")
        object.__setattr__(self, "dim", _positive_int("dim", self.dim))
        object.__setattr__(self, "c", float(self.c))

    def _evaluate(self, comps):
        shape = np.broadcast_shapes(*(np.shape(c) for c in comps))
        return np.full(shape, self.c)

    @property
    def spec(self) -> str:
        return f"const:c={self.c:g},d={self.dim}"


def closed_form_c_1d(r):
    """Covariance paired with :class:`Test1dDensity` at distance ``r >= 0``."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(np.isnan(r_arr)):
        raise ValueError("distance must be nonnegative")
    out = (200.0 / 3.0 * r_arr**3 + 40.0 * r_arr**2 + 10.0 * r_arr + 1.0) * np.exp(
        -10.0 * r_arr
    )
    return float(out) if out.ndim == 0 else out


_FLOAT = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def _parse_params(body: str) -> dict[str, str]:
    params = {}
    for item in filter(None, body.split(",")):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise DensityError(f"malformed parameter {item!r}")
        params[key.strip()] = value.strip()
    return params


def _as_float(params, key) -> float:
    try:
        v = params.pop(key)
    except KeyError:
        raise DensityError(f"missing parameter {key!r}") from None
    if not re.fullmatch(_FLOAT, v):
        raise DensityError(f"parameter {key}={v!r} is not a number")
    return float(v)


def _as_int(params, key, default=None) -> int:
    if key not in params and default is not None:
        return default
    v = _as_float(params, key)
    if v != int(v):
        raise DensityError(f"parameter {key} must be an integer, got {v!r}")
    return int(v)


def parse_density(text: str, dim: int | None = None) -> SpectralDensity:
    """Build a density from a spec string.

    Grammar::

        poly:m=<f>,k=<u>,l=<u>,n=<u>[,d=<u>]
        aniso:m=<f>,k1=<u>,...,kd=<u>,n=<u>
        const:c=<f>[,d=<u>]
        test1d

    ``dim`` fills in ``d`` when the string omits it and is checked otherwise.
    """
    name, _, body = text.strip().partition(":")
    name = name.strip().lower()
    params = _parse_params(body)
    if name == "test1d":
        if params:
            raise DensityError("test1d takes no parameters")
        density: SpectralDensity = Test1dDensity()
    elif name == "poly":
        m = _as_float(params, "m")
        k, l, n = (_as_int(params, key) for key in ("k", "l", "n"))
        d = _as_int(params, "d", default=dim or 2)
        density = PolyDecayDensity(m, k, l, n, d)
    elif name == "aniso":
        m = _as_float(params, "m")
        n = _as_int(params, "n")
        keys = sorted(
            (key for key in params if re.fullmatch(r"k\d+", key)),
            key=lambda s: int(s[1:]),
        )
        if [int(key[1:]) for key in keys] != list(range(1, len(keys) + 1)):
            raise DensityError("aniso exponents must be k1..kd without gaps")
        density = AnisotropicDensity(m, tuple(_as_int(params, key) for key in keys), n)
    elif name == "const":
        c = _as_float(params, "c")
        d = _as_int(params, "d", default=dim or 1)
        density = ConstantDensity(c, d)
    else:
        raise DensityError(f"unknown density family {name!r}")
    if params:
        raise DensityError(f"unexpected parameters {sorted(params)} for {name}")
    if dim is not None and density.dim != dim:
        raise DensityError(
            f"density {text!r} is {density.dim}-dimensional, grid is {dim}-dimensional"
        )
    return density
