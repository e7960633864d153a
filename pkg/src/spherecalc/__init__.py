"""Exact and Monte Carlo calculus on the unit sphere S^{n-1}.

Polynomials with exact sphere moments and harmonic decompositions, scalar
fields with analytic jets, intrinsic sphere operators, reproducible sphere
integration, and checks of Poincare-type and concentration inequalities.
"""

from ._accel import backend
from .concentration import (
    HypothesisAudit,
    check_euclidean_gradient,
    check_euclidean_second_order_poincare,
    check_exp_moment,
    check_gaussian_second_order,
    check_log_sobolev,
    check_poincare,
    check_theorem,
    tail_scaling_report,
)
from .fields import (
    AffineShiftedField,
    CallableField,
    FieldSpecError,
    LinearField,
    PlaneWaveField,
    PolynomialField,
    QuadraticField,
    ScalarField,
    ScaledShiftedField,
    field_from_spec,
    parse_field,
    self_test,
)
from .integrate import (
    MonteCarloEstimate,
    SamplerConfig,
    VectorMean,
    entropy_estimate,
    log_mean_exp,
    mc_integrate,
    sample_uniform,
    vector_mean,
)
from .polynomial import (
    DegreeGuardError,
    HarmonicDecomposition,
    Polynomial,
    harmonic_decompose,
    parse_polynomial,
    poly_derive,
    poly_laplacian,
    poly_sphere_integral,
    sphere_moment,
)
from .reports import CheckReport, to_csv, to_jsonl
from .spectral import (
    AffineProjection,
    SpectralField,
    check_hessian_energy_identity,
    check_sharp_constants,
    eigen_minimization_scan,
    project_affine,
    spectral_laplacian_power,
)
from .sphere_ops import (
    HomogeneousExtensionParams,
    SphericalJet,
    UnitVector,
    commutator_residual,
    d_ij,
    d_matrix,
    euclidean_second_order_modulus,
    hessian_vector_identity_residual,
    hom_gradient,
    hom_hessian_apply,
    hom_laplacian,
    hom_value,
    hs_norm,
    operator_norm,
    second_order_modulus,
    spherical_gradient,
    spherical_hessian,
    spherical_jet,
    spherical_laplacian,
)

__version__ = "0.1.0"
