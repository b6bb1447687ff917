"""Maximal quantum f-divergences between density matrices: evaluation,
unitary-orbit extremal values and extremizers, permutation and Riemannian
verification oracles, and a reproducible CLI."""

from .divergence import (
    DivergenceResult,
    QuadratureSpec,
    compute_divergence,
    d_f_hockey,
    hockey_stick,
    relative_spectrum,
    s_hat_direct,
    s_hat_integral,
    s_hat_regularized,
)
from .errors import (
    AlphaOutOfOperatorConvexRange,
    DimensionMismatch,
    DimensionTooLargeForBruteForce,
    DomainViolation,
    InvalidDensity,
    InvalidRank,
    LengthMismatch,
    MaxFDivError,
    MeasureUnavailable,
    NonHermitianInput,
    QuadratureNotConverged,
    SingularSigma,
    UnknownFunction,
)
from .extremal import (
    BruteForceResult,
    ClaimComponents,
    OrbitExtremalReport,
    Pairing,
    RangeSample,
    anti_sorted_pairing,
    brute_force_orbit_diagonal,
    claim_components,
    co_sorted_pairing,
    extremal_max,
    extremal_min,
    extremal_unitaries,
    orbit_extremal_report,
    range_interval,
)
from .functions import (
    KernelKind,
    OperatorConvexFunction,
    RepresentationMeasure,
    catalog_lookup,
    exchange_inequality_check,
    kernel_cross_partial,
    kernel_eval,
    parse_function_spec,
    representation_eval,
)
from .linalg import (
    DensityState,
    SpectralDecomposition,
    density_state,
    eig_hermitian,
    haar_unitary,
    is_majorized,
    is_weakly_majorized,
    matrix_function,
    matrix_leq,
    negative_part,
    positive_part,
    random_density,
    require_hermitian,
    trace_product_bounds,
)
from .optimizer import (
    OptimizerTrace,
    StationarityReport,
    directional_derivative,
    finite_difference_gradient,
    orbit_objective,
    riemannian_optimize,
    stationarity_residual,
    value_and_gradient,
)
from .rng import make_rng

__version__ = "0.1.0"
