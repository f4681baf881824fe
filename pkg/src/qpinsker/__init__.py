"""Entropies, distances, detection and Pinsker-type bounds for finite-dimensional quantum states."""

__version__ = "0.1.0"

from .states import (  # noqa: E402
    CQState,
    DensityOperator,
    Ensemble,
    JointDist,
    Povm,
    ProbDist,
    Tolerances,
    build_cq_state,
    partial_trace,
    pure_state,
    random_mixed,
    random_pure,
    tensor,
    validate_density,
)
from .entropy import (  # noqa: E402
    classical_relative_entropy,
    conditional_entropy,
    cq_joint_entropy,
    holevo_information,
    mutual_information,
    quantum_joint_entropy,
    quantum_mutual_information,
    quantum_relative_entropy,
    shannon_entropy,
    von_neumann_entropy,
)
from .distance import cq_trace_distance, statistical_distance, trace_distance, trace_norm  # noqa: E402
from .detection import (  # noqa: E402
    accessible_information,
    guessing_probability,
    helstrom_binary,
    optimality_residual,
    optimize_detection,
    pretty_good_measurement,
)
from .inequalities import (  # noqa: E402
    holevo_vs_trace,
    pinsker_classical,
    pinsker_mutual,
    pinsker_quantum,
    pinsker_quantum_mutual,
)
from .qkd import build_key_ensemble, classical_guess_bound, guess_bound, qkd_delta, suboptimal_povm  # noqa: E402
