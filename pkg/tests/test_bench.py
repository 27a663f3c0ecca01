import numpy as np
import pytest

from spectral_grf.bench import BenchRow, fit_linearithmic, run_benchmark, speedups, square_grid, time_synthesis
from spectral_grf.grid import GridSpec
from spectral_grf.spectral import PolyDecayDensity
from spectral_grf.synth import count_draws


def test_rows_record_draws():
    g = square_grid(64 * 64)
    rows = run_benchmark([g], lambda g: PolyDecayDensity(1, 1, 1, 2), repeat=5)
    assert [r.algorithm for r in rows] == ["two_fft", "one_fft_overwrite", "one_fft_recursive"]
    for r in rows:
        assert r.draws == count_draws(g, r.algorithm)
        assert r.points == 4096 and r.repeat == 5 and r.median_seconds > 0


def test_repeat_minimum():
    with pytest.raises(ValueError):
        time_synthesis(GridSpec((1.0,), (8,)), PolyDecayDensity(1, 1, 1, 1, dim=1), "two_fft", 4)


def test_speedups():
    rows = [BenchRow("two_fft", 4, 5, 2.0, 4, (2, 2)), BenchRow("one_fft_recursive", 4, 5, 1.0, 4, (2, 2))]
    assert speedups(rows) == {((2, 2), "one_fft_recursive"): 2.0}


def test_linearithmic_fit_exact_model():
    p = np.array([2**14, 2**16, 2**18])
    c, dev = fit_linearithmic(p, 3e-9 * p * np.log2(p))
    assert np.isclose(c, 3e-9) and np.all(dev < 1e-12)


def test_square_grid():
    assert square_grid(256).counts == (16, 16)
    with pytest.raises(ValueError):
        square_grid(200)
