"""Expansive constants of iterated systems and their decay rates.

Submodules:

* symbolic  exact gamma(sigma^n), cylinder Lebesgue numbers, entropy and
            dimension for subshifts of finite type,
* torus     grid upper bounds and certified Lipschitz lower bounds for
            hyperbolic toral automorphisms,
* sampled   orbit-scan estimates on finite metric samples,
* decay     rate estimation and the inequality checks tying it together,
* kernels   the compiled/pure compute cores (see kernels.BACKEND).
"""

__version__ = "0.1.0"

from . import decay, sampled, symbolic, torus
from .decay import (
    INF,
    DecayEstimate,
    GammaSequence,
    VerificationReport,
    decay_estimate,
    power_scaling_check,
    verify_report,
)
from .kernels import BACKEND
from .sampled import (
    DimensionEstimate,
    FiniteSampledSystem,
    OpenCoverSpec,
    bowen_distance,
    box_dimension_estimate,
    expansive_constant_estimate,
    lebesgue_sequence,
    lipschitz_constant_estimate,
)
from .symbolic import (
    ExactGamma,
    PairWitness,
    SymbolicSpace,
    TransitionMatrix,
    cylinder_lebesgue_exact,
    entropy,
    exact_expansive_constant,
    generator_report,
    hausdorff_dimension,
    validate_matrix,
    verify_pair_witness,
)
from .torus import (
    RationalGrid,
    ToralAutomorphism,
    certified_gamma1,
    gamma_lower_bound_lipschitz,
    gamma_upper_bound,
    hE_bracket,
    torus_distance,
)

__all__ = [
    "__version__",
    "BACKEND",
    "INF",
    "DecayEstimate",
    "GammaSequence",
    "VerificationReport",
    "decay",
    "decay_estimate",
    "power_scaling_check",
    "verify_report",
    "DimensionEstimate",
    "FiniteSampledSystem",
    "OpenCoverSpec",
    "bowen_distance",
    "box_dimension_estimate",
    "expansive_constant_estimate",
    "lebesgue_sequence",
    "lipschitz_constant_estimate",
    "ExactGamma",
    "PairWitness",
    "SymbolicSpace",
    "TransitionMatrix",
    "cylinder_lebesgue_exact",
    "entropy",
    "exact_expansive_constant",
    "generator_report",
    "hausdorff_dimension",
    "validate_matrix",
    "verify_pair_witness",
    "RationalGrid",
    "ToralAutomorphism",
    "certified_gamma1",
    "gamma_lower_bound_lipschitz",
    "gamma_upper_bound",
    "hE_bracket",
    "torus_distance",
    "sampled",
    "symbolic",
    "torus",
]
