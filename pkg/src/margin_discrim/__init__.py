"""Optimal discrimination of two pure quantum states under an error margin.

The package provides closed-form optima and explicit POVMs for both the
strong (per-outcome) and weak (mean) error-margin conditions, an
independent numerical oracle, a probability validator, a seeded
measurement simulator, and a constructive one-way LOCC realization for
bipartite states.
"""

from .errors import (
    DecompositionSearchError,
    DiscriminationError,
    DomainError,
    NotRepresentableError,
    RegimeError,
    ValidationError,
)
from .linalg import (
    Observable2,
    Povm3,
    PureState,
    StatePair,
    bloch_from_state,
    expectation,
    operator_matrix,
    reflection_about_bisector,
    state_from_bloch,
)
from .margin import (
    MarginCondition,
    ReducedParams,
    amplification_factor,
    build_povm,
    critical_margin,
    helstrom_povm,
    minimum_error_success,
    optimal_povm,
    reduced_params_strong,
    reduced_params_weak,
    success_probability,
    success_strong,
    success_weak,
)
from .locc import (
    AliceDecomposition,
    LoccPovm,
    UnambiguousProblem,
    build_locc_povm,
    find_alice_decomposition,
    global_unambiguous_povm,
    locc_pipeline,
    margin_povm_to_locc,
    povm_to_unambiguous,
    verify_compression,
)
from .oracle import OracleResult, f_poly, g_poly, oracle_general, oracle_reduced
from .simulate import SimulationResult, simulate
from .validator import (
    DiscriminationReport,
    check_margin,
    evaluate,
    joint_probability,
    margin_feasible,
)

__version__ = "0.1.0"

__all__ = [
    "AliceDecomposition",
    "DecompositionSearchError",
    "DiscriminationError",
    "DiscriminationReport",
    "DomainError",
    "LoccPovm",
    "MarginCondition",
    "NotRepresentableError",
    "Observable2",
    "OracleResult",
    "Povm3",
    "PureState",
    "ReducedParams",
    "RegimeError",
    "SimulationResult",
    "StatePair",
    "UnambiguousProblem",
    "ValidationError",
    "amplification_factor",
    "bloch_from_state",
    "build_locc_povm",
    "build_povm",
    "check_margin",
    "critical_margin",
    "evaluate",
    "expectation",
    "f_poly",
    "find_alice_decomposition",
    "g_poly",
    "global_unambiguous_povm",
    "helstrom_povm",
    "joint_probability",
    "locc_pipeline",
    "margin_feasible",
    "margin_povm_to_locc",
    "minimum_error_success",
    "operator_matrix",
    "optimal_povm",
    "oracle_general",
    "oracle_reduced",
    "povm_to_unambiguous",
    "reduced_params_strong",
    "reduced_params_weak",
    "reflection_about_bisector",
    "simulate",
    "state_from_bloch",
    "success_probability",
    "success_strong",
    "success_weak",
    "verify_compression",
]
