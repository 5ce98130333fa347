"""Named gate unitaries. Multi-qubit matrices list qubits most-significant first."""

from __future__ import annotations

import numpy as np

from ..algebra import PAULI_MATRICES

_X = PAULI_MATRICES["X"]
_Z = PAULI_MATRICES["Z"]

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

PARAMETRIZED = frozenset({"RX", "RZ", "ZZ", "XX"})
FIXED = frozenset({"H", "CNOT", "SWAP"})
GATE_NAMES = PARAMETRIZED | FIXED | {"CUSTOM"}
ARITY = {"RX": 1, "RZ": 1, "H": 1, "ZZ": 2, "XX": 2, "CNOT": 2, "SWAP": 2}


def _pauli_rotation(pauli: np.ndarray, angle: float) -> np.ndarray:
    # exp(-i angle/2 P) for any P with P @ P == I
    return np.cos(angle / 2) * np.eye(pauli.shape[0]) - 1j * np.sin(angle / 2) * pauli


def rx(angle: float) -> np.ndarray:
    return _pauli_rotation(_X, angle)


def rz(angle: float) -> np.ndarray:
    return _pauli_rotation(_Z, angle)


def zz(angle: float) -> np.ndarray:
    """``ZZ(phi) = exp(-i phi/2 Z(x)Z)``."""
    return _pauli_rotation(np.kron(_Z, _Z), angle)


def xx(angle: float) -> np.ndarray:
    return _pauli_rotation(np.kron(_X, _X), angle)


def gate_matrix(name: str, angle: float | None = None) -> np.ndarray:
    if name in PARAMETRIZED:
        if angle is None:
            raise ValueError(f"gate {name} requires an angle")
        return {"RX": rx, "RZ": rz, "ZZ": zz, "XX": xx}[name](float(angle))
    if name == "H":
        return HADAMARD
    if name == "CNOT":
        return CNOT
    if name == "SWAP":
        return SWAP
    raise ValueError(f"unknown gate {name!r}")


def permutation_unitary(perm) -> np.ndarray:
    """Unitary moving the state of local qubit ``j`` onto position ``perm[j]``."""
    perm = list(perm)
    m = len(perm)
    if sorted(perm) != list(range(m)):
        raise ValueError(f"{perm} is not a permutation of range({m})")
    d = 2**m
    u = np.zeros((d, d), dtype=complex)
    for idx in range(d):
        bits = [(idx >> (m - 1 - j)) & 1 for j in range(m)]
        out = [0] * m
        for j, b in enumerate(bits):
            out[perm[j]] = b
        u[int("".join(map(str, out)), 2), idx] = 1.0
    return u
