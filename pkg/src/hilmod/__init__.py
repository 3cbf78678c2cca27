"""Numerical toolkit for finite truncations of the standard Hilbert module over a C*-algebra.

Elements of A = M_n(C) (or its diagonal subalgebra), vectors in A^N, normal
states, the tau-family of seminorms, adjointable block operators, and the
experiments that probe "compactness" of operators under those seminorms.
"""

from .algebra import AlgebraDescriptor, AlgebraElement, random_unitary, unitary_from_to
from .checks import Check
from .compactness import (
    choose_state_unitaries,
    compactness_probe,
    counterexample_experiment,
    greedy_net,
    net_distance,
    sample_unit_ball,
    separate_from_ball,
    witness_construction,
)
from .config import ExperimentConfig
from .errors import (
    CompactAtHorizonError,
    ConfigError,
    DegenerateWeightsError,
    DimensionError,
    DomainError,
    HilmodError,
    HorizonTooSmallError,
    NumericError,
    PreconditionError,
    UnsupportedAlgebraError,
)
from .module import ModuleVector, basis_vector, coord_project, inner_product, module_norm
from .operators import (
    ModuleOperator,
    adjoint_op,
    apply,
    compose,
    coordinate_projection,
    diagonal_multiplier,
    finite_rank,
    identity,
    operator_norm,
    tail_profile,
    theta,
)
from .states import NormalState, diagonal_state, geometric_weights, vector_state
from .topology import AdmissibleWeights, SeminormSpec, normalize_admissible, seminorm

__all__ = [
    "AlgebraDescriptor",
    "AlgebraElement",
    "random_unitary",
    "unitary_from_to",
    "Check",
    "choose_state_unitaries",
    "compactness_probe",
    "counterexample_experiment",
    "greedy_net",
    "net_distance",
    "sample_unit_ball",
    "separate_from_ball",
    "witness_construction",
    "ExperimentConfig",
    "CompactAtHorizonError",
    "ConfigError",
    "DegenerateWeightsError",
    "DimensionError",
    "DomainError",
    "HilmodError",
    "HorizonTooSmallError",
    "NumericError",
    "PreconditionError",
    "UnsupportedAlgebraError",
    "ModuleVector",
    "basis_vector",
    "coord_project",
    "inner_product",
    "module_norm",
    "ModuleOperator",
    "adjoint_op",
    "apply",
    "compose",
    "coordinate_projection",
    "diagonal_multiplier",
    "finite_rank",
    "identity",
    "operator_norm",
    "tail_profile",
    "theta",
    "NormalState",
    "diagonal_state",
    "geometric_weights",
    "vector_state",
    "AdmissibleWeights",
    "SeminormSpec",
    "normalize_admissible",
    "seminorm",
]
