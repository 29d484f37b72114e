"""Imaginary-time flows of quadratic Hamiltonians and half-form KSH transforms
of Gaussian coherent states on the plane, with independent numerical oracles."""
from .dynamics import (
    CONVENTIONS,
    DP,
    DX,
    FlowMatrix,
    HolomorphicCoordinate,
    PiTime,
    Polarization,
    PolarizationClass,
    QuadraticHamiltonian,
    ReductionData,
    canonical_reduction,
    classify_polarization,
    flow_matrix,
    hamiltonian_generator,
    holomorphic_coordinate,
    kahler_density,
    reduction_pullback_residual,
    time_reparametrization,
)
from .errors import (
    BlowUp,
    DivergentIntegral,
    KshError,
    NonHyperbolic,
    OutOfRange,
    SingularTime,
    ToleranceNotMet,
    ZeroH11,
)
from .gaussians import (
    GaussianSuperposition,
    LineGaussian,
    PhaseSpaceGaussian,
    coherent_state,
    embed,
    halfform_convert,
    heisenberg_shift,
    polarization_residual,
    polarized_inner,
    schrodinger_inner,
)
from .transforms import (
    FREE_PARTICLE,
    QuadraticObservableOps,
    action_matrix,
    fourier_on_gaussian,
    heat_evolve,
    heat_semigroup,
    ksh_by_composition,
    ksh_closed_form,
    ksh_conjugated,
    ksh_generic,
    ksh_transform,
    prequantum_evolution,
    segal_bargmann,
)
from .verify import (
    Divergent,
    OdeSpec,
    QuadratureSpec,
    gram_isometry_defect,
    matrix_exp_oracle,
    quad_norm_polarized,
    quad_norm_schrodinger,
    riccati_ode_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "CONVENTIONS",
    "DP",
    "DX",
    "FlowMatrix",
    "HolomorphicCoordinate",
    "PiTime",
    "Polarization",
    "PolarizationClass",
    "QuadraticHamiltonian",
    "ReductionData",
    "canonical_reduction",
    "classify_polarization",
    "flow_matrix",
    "hamiltonian_generator",
    "holomorphic_coordinate",
    "kahler_density",
    "reduction_pullback_residual",
    "time_reparametrization",
    "BlowUp",
    "DivergentIntegral",
    "KshError",
    "NonHyperbolic",
    "OutOfRange",
    "SingularTime",
    "ToleranceNotMet",
    "ZeroH11",
    "GaussianSuperposition",
    "LineGaussian",
    "PhaseSpaceGaussian",
    "coherent_state",
    "embed",
    "halfform_convert",
    "heisenberg_shift",
    "polarization_residual",
    "polarized_inner",
    "schrodinger_inner",
    "FREE_PARTICLE",
    "QuadraticObservableOps",
    "action_matrix",
    "fourier_on_gaussian",
    "heat_evolve",
    "heat_semigroup",
    "ksh_by_composition",
    "ksh_closed_form",
    "ksh_conjugated",
    "ksh_generic",
    "ksh_transform",
    "prequantum_evolution",
    "segal_bargmann",
    "Divergent",
    "OdeSpec",
    "QuadratureSpec",
    "gram_isometry_defect",
    "matrix_exp_oracle",
    "quad_norm_polarized",
    "quad_norm_schrodinger",
    "riccati_ode_oracle",
]
