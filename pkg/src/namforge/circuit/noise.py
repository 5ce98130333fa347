"""Rate matrices of the standard independent and global noise models."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..algebra import RateMatrix, pauli_basis, pauli_label_index
from .model import CircuitError, NoiseEvent

NOISE_KINDS = ("damping", "dephasing", "depolarizing", "global_depolarizing")

# single-qubit rate matrices per unit rate over (X, Y, Z)
_DAMPING = 0.25 * np.array([[1, -1j, 0], [1j, 1, 0], [0, 0, 0]])
_DEPHASING = np.diag([0.0, 0.0, 0.5]).astype(complex)
_DEPOLARIZING = 0.25 * np.eye(3, dtype=complex)
_SINGLE = {"damping": _DAMPING, "dephasing": _DEPHASING, "depolarizing": _DEPOLARIZING}


def single_qubit_rates(kind: str) -> np.ndarray:
    """Unit-rate 3x3 rate matrix of an independent noise kind (copy)."""
    return _SINGLE[kind].copy()


def _local_indices(m: int, site: int) -> list[int]:
    return [pauli_label_index("I" * site + c + "I" * (m - site - 1)) for c in "XYZ"]


def independent_rates(kind: str, rates: Sequence[float]) -> np.ndarray:
    """Rate matrix over the Pauli basis of ``len(rates)`` qubits for per-qubit rates."""
    m = len(rates)
    n = 4**m - 1
    out = np.zeros((n, n), dtype=complex)
    unit = _SINGLE[kind]
    for site, r in enumerate(rates):
        idx = _local_indices(m, site)
        out[np.ix_(idx, idx)] += r * unit
    return out


def standard_noise(
    kind: str,
    qubits: Sequence[int],
    rates: float | Sequence[float],
    gate_time_ratio: float = 1.0,
) -> NoiseEvent:
    """Noise event for a named model.

    ``damping``, ``dephasing`` and ``depolarizing`` are independent per qubit
    with the given rate(s); their rate-matrix traces are ``gamma/2``,
    ``gamma/2`` and ``3 gamma/4`` per qubit. ``global_depolarizing`` takes one
    rate ``gamma_DC`` and spreads ``gamma_DC / D**2`` uniformly over every
    traceless Pauli string on ``qubits``.
    """
    qubits = tuple(int(q) for q in qubits)
    if kind not in NOISE_KINDS:
        raise CircuitError(f"unknown noise kind {kind!r}; expected one of {NOISE_KINDS}")
    if np.ndim(rates) == 0:
        rates_t = (float(rates),) * (1 if kind == "global_depolarizing" else len(qubits))
    else:
        rates_t = tuple(float(r) for r in rates)
    if any(r < 0 for r in rates_t):
        raise CircuitError(f"noise rates must be non-negative, got {rates_t}")
    basis = pauli_basis(len(qubits))
    if kind == "global_depolarizing":
        if len(rates_t) != 1:
            raise CircuitError("global depolarizing noise takes a single rate")
        entries = rates_t[0] / basis.dim**2 * np.eye(len(basis), dtype=complex)
    else:
        if len(rates_t) != len(qubits):
            raise CircuitError(f"{len(rates_t)} rates given for {len(qubits)} qubits")
        entries = independent_rates(kind, rates_t)
    return NoiseEvent(RateMatrix(basis, entries), qubits, gate_time_ratio, kind, rates_t)


def custom_noise(entries, qubits: Sequence[int], gate_time_ratio: float = 1.0) -> NoiseEvent:
    qubits = tuple(int(q) for q in qubits)
    return NoiseEvent(RateMatrix(pauli_basis(len(qubits)), entries), qubits, gate_time_ratio)


def global_depolarizing_lambda(gamma_dc: float, tau: float) -> float:
    """Discrete depolarizing probability equivalent to rate ``gamma_dc`` over ``tau``."""
    return 1.0 - np.exp(-gamma_dc * tau)
