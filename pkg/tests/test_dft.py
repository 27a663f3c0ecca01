import numpy as np
import pytest

from spectral_grf.dft import (
    NaiveBackend,
    RealnessError,
    ScipyBackend,
    get_backend,
    imag_residue,
    real_part_checked,
)
from spectral_grf.hermitian import hermitian_extend


def direct_dft(a, sign):
    """Textbook nested-loop DFT over all axes, used as the oracle."""
    out = np.zeros(a.shape, complex)
    for k in np.ndindex(*a.shape):
        for j in np.ndindex(*a.shape):
            phase = sum(ki * ji / n for ki, ji, n in zip(k, j, a.shape))
            out[k] += a[j] * np.exp(sign * 2j * np.pi * phase)
    return out


@pytest.fixture(params=["scipy", "naive"])
def backend(request):
    return get_backend(request.param)


def test_conventions_against_direct_sum(backend):
    a = np.random.default_rng(0).normal(size=(4, 6)) + 1j
    assert np.allclose(backend.forward(a, 2), direct_dft(a, +1), atol=1e-10)
    assert np.allclose(backend.inverse(a, 2), direct_dft(a, -1) / 24, atol=1e-12)


def test_round_trip(backend):
    a = np.random.default_rng(1).normal(size=(3, 8, 4)) + 0.5j
    back = backend.inverse(backend.forward(a, 2), 2)
    assert np.max(np.abs(back - a)) < 1e-12 * np.max(np.abs(a))


def test_large_round_trip_scipy():
    a = np.random.default_rng(2).normal(size=(1024, 1024))
    back = ScipyBackend().inverse(ScipyBackend().forward(a, 2), 2)
    assert np.max(np.abs(back - a)) / np.max(np.abs(a)) < 1e-12


@pytest.mark.parametrize("shape", [(8,), (4, 6), (2, 4, 6)])
def test_irfft_of_hermitian_half(backend, shape):
    rng = np.random.default_rng(3)
    real = rng.normal(size=shape)
    full = ScipyBackend().forward(real, len(shape))  # Hermitian by construction
    m = shape[-1] // 2
    half = full[..., : m + 1]
    np.testing.assert_allclose(hermitian_extend(half, shape), full, atol=1e-12)
    expect = direct_dft(full, +1).real / real.size
    np.testing.assert_allclose(backend.irfft(half, shape), expect, atol=1e-12)


def test_naive_matches_scipy():
    a = np.random.default_rng(4).normal(size=(2, 16, 16)) + 1j
    f, n = ScipyBackend(), NaiveBackend()
    for op in ("forward", "inverse"):
        x, y = getattr(f, op)(a, 2), getattr(n, op)(a, 2)
        assert np.max(np.abs(x - y)) <= 1e-9 * np.max(np.abs(x))


def test_naive_size_limit():
    with pytest.raises(ValueError):
        NaiveBackend().forward(np.zeros(8192), 1)


def test_realness_checks():
    assert imag_residue(np.zeros(3, complex)) == 0.0
    assert imag_residue(np.array([2.0 + 1e-12j])) == pytest.approx(5e-13)
    assert imag_residue(np.array([1j])) == np.inf
    out = real_part_checked(np.array([1.0 + 1e-14j, -2.0]))
    assert out.dtype == float and out.tolist() == [1.0, -2.0]
    with pytest.raises(RealnessError):
        real_part_checked(np.array([1.0 + 1e-6j]))


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_backend("fftw")
    b = NaiveBackend()
    assert get_backend(b) is b
