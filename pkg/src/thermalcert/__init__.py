"""Tools for certifying that quantum states lie outside thermal-state families.

The package decides, numerically and with explicit witnesses, whether a
pure state can be approximated by Gibbs states exp(H)/tr[exp(H)] of
k-body Hamiltonians H, and runs the Monte-Carlo detection experiments
built on that decision procedure.
"""

from .pauli import PauliString, PauliExpansion, expand, multiply, truncate_weight
from .states import (
    DensityMatrix,
    PureState,
    fidelity_pure,
    haar_random_pure,
    partial_trace,
    relative_entropy,
    trace_distance,
    von_neumann_entropy,
)
from .graphs import Graph, GraphState, permuted_linear_cluster, ring_cluster
from .sdp import (
    MarginalProgram,
    SdpOutcome,
    SolverConfig,
    marginal_program,
    project_affine,
    project_cone_shifted,
    solve,
)
from .expfamily import (
    ExponentialCoordinates,
    KLocalHamiltonian,
    local_basis,
    max_entropy_projection,
    maximize_reduced_overlap,
    overlap_ascent,
    overlap_bound,
    pythagorean_residual,
    reduced_overlap_objective,
    thermal_state,
)
from .certify import (
    CertificationResult,
    ball_witness_threshold,
    certify_ball,
    entropy_gap,
    entropy_gap_at_uniform,
    fannes_audenaert_bound,
    min_entropy_floor,
    relative_entropy_lower_bound,
    witness_value,
)

__all__ = [name for name in dir() if not name.startswith("_")]
