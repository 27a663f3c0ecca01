"""FFT-based synthesis of stationary Gaussian random fields on periodic grids."""

from .grid import GridError, GridSpec, frequency, is_self_conjugate, neg_index
from .hermitian import (
    HermitianSpectrum,
    build_conjugate_reps,
    synthesize_spectrum,
    verify_hermitian,
)
from .spectral import (
    AnisotropicDensity,
    ConstantDensity,
    DensityError,
    PolyDecayDensity,
    SpectralDensity,
    Test1dDensity,
    closed_form_c_1d,
    parse_density,
)
from .stats import (
    CovarianceEstimate,
    ConvergenceReport,
    convergence_study,
    estimate_covariance,
    max_error,
)
from .streams import ArrayStream, GaussianStream, SeededStream, ZeroStream
from .synth import (
    ALGORITHMS,
    RealField,
    count_draws,
    exact_discrete_covariance,
    synthesize,
    synthesize_batch,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AnisotropicDensity",
    "ArrayStream",
    "ConstantDensity",
    "ConvergenceReport",
    "CovarianceEstimate",
    "DensityError",
    "GaussianStream",
    "GridError",
    "GridSpec",
    "HermitianSpectrum",
    "PolyDecayDensity",
    "RealField",
    "SeededStream",
    "SpectralDensity",
    "Test1dDensity",
    "ZeroStream",
    "build_conjugate_reps",
    "closed_form_c_1d",
    "convergence_study",
    "count_draws",
    "estimate_covariance",
    "exact_discrete_covariance",
    "frequency",
    "is_self_conjugate",
    "max_error",
    "neg_index",
    "parse_density",
    "synthesize",
    "synthesize_batch",
    "synthesize_spectrum",
    "verify_hermitian",
]
