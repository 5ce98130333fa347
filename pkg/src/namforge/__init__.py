"""Compile noisy Trotter circuits into effective Lindblad models and check them by exact simulation."""

from .algebra import (
    OperatorBasis,
    RateMatrix,
    choi_cptp_check,
    diagonalize_rate_matrix,
    dissipator,
    frobenius_inner,
    liouvillian_hamiltonian,
    pauli_basis,
    superop_exp,
)
from .circuit import (
    Circuit,
    DecompositionBlock,
    GateOp,
    NoiseEvent,
    build_second_order_circuit,
    build_tfim_trotter_circuit,
    load_circuit,
    parse_circuit,
    standard_noise,
    validate_circuit,
)
from .commutation import (
    commutation_matrix,
    commute_noise_past_unitary,
    conjugated_basis,
    hoist_noise_from_block,
    remap_noise_past_block,
    small_angle_commutation_correction,
)
from .nam import (
    NoisyAlgorithmModel,
    build_noisy_algorithm_model,
    trace_matched_alternative,
    trotter_correction,
    uncommuted_model,
)
from .simulate import (
    Trajectory,
    compare_trajectories,
    evolve_effective,
    evolve_exact_circuit,
    expectation,
)

__version__ = "0.1.0"
