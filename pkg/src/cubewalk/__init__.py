"""Monte Carlo linear solver driven by walks on Hamming cubes.

Solves ``(1 - gamma * P) x = b`` where P is the transition matrix of a
classical bit-flip walk or a single-coin quantum walk over ``N = 2**n``
nodes. Provides closed-form matrix builders, a small statevector simulator
of the walk circuit with an optional readout-noise model, a truncated-series
Monte Carlo estimator, dense reference solvers, and a CLI for experiments.
"""

from .hamming import (
    ASCENDING,
    DESCENDING,
    NodeState,
    classical_distance,
    gray_decode,
    gray_encode,
    quantum_distance,
    xor,
)
from .oracle import DenseSystem, SingularMatrixError, direct_solve, neumann_sum_dense
from .simulator import (
    DEFAULT_READOUT_ERROR,
    NoiseModel,
    StateVector,
    apply_cnot_coin_to,
    apply_evolution,
    apply_u3_coin,
    graph_marginal,
    init_state,
    sample_step,
    walk_marginal,
    walk_state,
)
from .solver import (
    ConfigurationError,
    EstimateResult,
    SolveConfig,
    error_floor,
    estimate_component,
    estimate_vector,
    plan_steps,
    relative_error,
    sample_classical_step,
)
from .system import LinearSystem, SpectralRadiusError, build_system, spectral_radius
from .walks import (
    CLASSICAL,
    QUANTUM,
    CapacityError,
    CoinParams,
    TransitionMatrix,
    WalkSpec,
    build_transition_matrix,
    check_gray_equivalence,
    classical_entry,
    classical_two_step_entry,
    condition_number,
    flip_distribution,
    is_factorisable,
    kron_reconstruction_error,
    kron_split_residual,
    quantum_entry_one,
    quantum_entry_two,
    u3_entry,
    u3_matrix,
)

__version__ = "0.1.0"
