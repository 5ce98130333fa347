"""Circuit IR, standard noise, the JSON document format and circuit generators."""

from .gates import gate_matrix, permutation_unitary
from .io import SCHEMA, CircuitParseError, circuit_from_dict, circuit_to_dict, load_circuit, parse_circuit, serialize_circuit
from .library import (
    build_second_order_circuit,
    build_tfim_trotter_circuit,
    cancellation_circuit,
    cnot_zz_circuit,
    implicit_swap_circuit,
    minimal_circuit,
    swap_network_circuit,
)
from .model import (
    CheckResult,
    Circuit,
    CircuitError,
    CircuitValidationError,
    DecompositionBlock,
    Diagnostics,
    GateOp,
    NoiseEvent,
    validate_circuit,
)
from .noise import custom_noise, global_depolarizing_lambda, independent_rates, single_qubit_rates, standard_noise
