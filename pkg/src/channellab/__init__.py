"""Ergodicity and mixing analysis for finite-dimensional quantum channels.

The package decides whether a completely positive trace-preserving map,
given in Kraus or Stinespring form, is ergodic (unique fixed point) or
mixing (every orbit converges to that fixed point), using spectral
classification cross-validated by Lyapunov-functional monotonicity,
asymptotic-deformation estimates, conserved-dilation analysis, and a
brute-force orbit oracle.
"""

from .channel import (
    DensityMatrix,
    KrausChannel,
    StinespringDilation,
    Superoperator,
    apply,
    channel_from_document,
    channel_to_document,
    choi_matrix,
    compose,
    from_stinespring,
    is_unital,
    power,
    stinespring_from_document,
    stinespring_to_document,
    to_superoperator,
    validate_cpt,
)
from .dilation import (
    ConservedDilation,
    conservation_audit,
    cross_validate,
    find_factorizing_eigenstates,
    instance_from_document,
    instance_to_document,
    validate_conserved,
)
from .errors import ChannelLabError, HypothesisViolation, InternalInconsistencyError
from .lyapunov import (
    FUNCTIONALS,
    asymptotic_deformation_estimate,
    cesaro_average,
    deformation_evidence,
    orbit,
    orbit_oracle,
    probe_states,
    relative_entropy,
    trivial_lyapunov,
    verify_generalized_lyapunov,
    von_neumann_entropy,
    weak_contraction_check,
)
from .spectral import (
    VERDICT_ERGODIC_NOT_MIXING,
    VERDICT_MIXING,
    VERDICT_NOT_ERGODIC,
    SpectralReport,
    analyze,
    calibrate_speed_constant,
    convergence_bound,
    estimate_rate,
    peripheral_normality_check,
    polar_fixed_point,
    purely_ergodic_shortcut,
)
from .zoo import ChannelSpec, build, build_named, catalog, dilation_instance, random_channel

__version__ = "0.1.0"

__all__ = [
    "ChannelLabError",
    "ChannelSpec",
    "ConservedDilation",
    "DensityMatrix",
    "FUNCTIONALS",
    "HypothesisViolation",
    "InternalInconsistencyError",
    "KrausChannel",
    "SpectralReport",
    "StinespringDilation",
    "Superoperator",
    "VERDICT_ERGODIC_NOT_MIXING",
    "VERDICT_MIXING",
    "VERDICT_NOT_ERGODIC",
    "analyze",
    "apply",
    "asymptotic_deformation_estimate",
    "build",
    "build_named",
    "calibrate_speed_constant",
    "catalog",
    "cesaro_average",
    "channel_from_document",
    "channel_to_document",
    "choi_matrix",
    "compose",
    "conservation_audit",
    "convergence_bound",
    "cross_validate",
    "deformation_evidence",
    "dilation_instance",
    "estimate_rate",
    "find_factorizing_eigenstates",
    "from_stinespring",
    "instance_from_document",
    "instance_to_document",
    "is_unital",
    "orbit",
    "orbit_oracle",
    "peripheral_normality_check",
    "polar_fixed_point",
    "power",
    "probe_states",
    "purely_ergodic_shortcut",
    "random_channel",
    "relative_entropy",
    "stinespring_from_document",
    "stinespring_to_document",
    "to_superoperator",
    "trivial_lyapunov",
    "validate_conserved",
    "validate_cpt",
    "verify_generalized_lyapunov",
    "von_neumann_entropy",
    "weak_contraction_check",
]
