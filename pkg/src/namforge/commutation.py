"""Moving noise terms past gates, out of decomposition blocks, and past SWAPs.

All transforms act on the rate matrix over a fixed orthonormal basis:
a noise term followed-in-time by a unitary ``U`` equals ``U`` followed by a
noise term with rate matrix ``M Gamma M^dagger``, where
``M_mn = (1/D) Tr[A_m^dagger U A_n U^dagger]``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .algebra import (
    DimensionError,
    OperatorBasis,
    RateMatrix,
    embed_operator,
    is_hermitian,
    is_unitary,
    pauli_basis,
    pauli_label_index,
)
from .circuit.model import DecompositionBlock, GateOp, NoiseEvent

UNITARY_TOL = 1e-10
_TRIM_TOL = 1e-14


class NotUnitaryError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CommutationMatrix:
    basis: OperatorBasis
    entries: np.ndarray

    def apply(self, gamma: RateMatrix) -> RateMatrix:
        """``M Gamma M^dagger`` with the PSD floor applied."""
        if not gamma.basis.same_as(self.basis):
            raise DimensionError("rate matrix and commutation matrix use different bases")
        return RateMatrix.clipped(gamma.basis, self.entries @ gamma.entries @ self.entries.conj().T)

    def unitarity_deviation(self) -> float:
        m = self.entries
        return float(np.max(np.abs(m.conj().T @ m - np.eye(len(m)))))


def commutation_matrix(u: np.ndarray, basis: OperatorBasis) -> CommutationMatrix:
    u = np.asarray(u, dtype=complex)
    if u.shape != (basis.dim, basis.dim):
        raise DimensionError(f"unitary shape {u.shape} does not match basis dimension {basis.dim}")
    if not is_unitary(u, UNITARY_TOL):
        raise NotUnitaryError("commutation requires a unitary gate")
    a = basis.elements
    conj = u @ a @ u.conj().T
    n = len(a)
    m = (a.reshape(n, -1).conj() @ conj.reshape(n, -1).T) / basis.dim
    return CommutationMatrix(basis, m)


def commute_noise_past_unitary(
    noise: NoiseEvent, u: np.ndarray, basis: OperatorBasis | None = None
) -> NoiseEvent:
    """Noise term that, placed after ``u``, reproduces ``noise`` placed before it.

    ``u`` acts on ``noise.support`` in support order.
    """
    if basis is not None and not basis.same_as(noise.gamma.basis):
        raise DimensionError("noise event is not expressed in the given basis")
    m = commutation_matrix(u, noise.gamma.basis)
    return noise.with_gamma(m.apply(noise.gamma))


def conjugated_basis(u: np.ndarray, basis: OperatorBasis) -> OperatorBasis:
    """Basis ``B_n = U A_n U^dagger``; labels are signed Pauli strings when possible."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, UNITARY_TOL):
        raise NotUnitaryError("conjugation requires a unitary")
    elements = u @ basis.elements @ u.conj().T
    lookup = {lab: el for lab, el in zip(basis.labels, basis.elements)} if basis.is_pauli else {}
    labels = []
    for lab, el in zip(basis.labels, elements):
        name = f"U{lab}U+"
        for cand, ref in lookup.items():
            overlap = np.vdot(ref, el) / basis.dim
            if abs(abs(overlap) - 1) < 1e-12:
                sign = {1: "", -1: "-", 1j: "i", -1j: "-i"}.get(complex(np.round(overlap)), "?")
                name = sign + cand
                break
        labels.append(name)
    elements.setflags(write=False)
    return OperatorBasis(basis.qubit_count, elements, tuple(labels), False)


def embedding_indices(support: Sequence[int], target: Sequence[int]) -> np.ndarray:
    """Index of each local Pauli label of ``support`` inside the basis of ``target``."""
    support = list(support)
    target = list(target)
    pos = [target.index(q) for q in support]
    basis = pauli_basis(len(support))
    out = []
    for lab in basis.labels:
        chars = ["I"] * len(target)
        for p, c in zip(pos, lab):
            chars[p] = c
        out.append(pauli_label_index("".join(chars)))
    return np.array(out, dtype=int)


def embed_rate_entries(entries: np.ndarray, support: Sequence[int], target: Sequence[int]) -> np.ndarray:
    """Zero-padded copy of a local rate matrix on a larger ordered support."""
    n = 4 ** len(target) - 1
    out = np.zeros((n, n), dtype=complex)
    idx = embedding_indices(support, target)
    out[np.ix_(idx, idx)] = entries
    return out


def expand_noise(noise: NoiseEvent, target: Sequence[int]) -> NoiseEvent:
    target = tuple(target)
    if tuple(noise.support) == target:
        return noise
    entries = embed_rate_entries(noise.gamma.entries, noise.support, target)
    return noise.with_gamma(RateMatrix(pauli_basis(len(target)), entries), target)


def trim_support(noise: NoiseEvent) -> NoiseEvent:
    """Drop qubits on which every contributing basis operator is the identity."""
    g = noise.gamma.entries
    labels = noise.gamma.basis.labels
    scale = max(float(np.max(np.abs(g), initial=0.0)), 1e-300)
    active = np.flatnonzero((np.abs(g) > _TRIM_TOL * scale).any(axis=0) | (np.abs(g) > _TRIM_TOL * scale).any(axis=1))
    keep = [j for j in range(len(noise.support)) if any(labels[a][j] != "I" for a in active)]
    if not keep:
        keep = [0]
    if len(keep) == len(noise.support):
        return noise
    new_support = tuple(noise.support[j] for j in keep)
    idx = embedding_indices(new_support, noise.support)
    sub = g[np.ix_(idx, idx)]
    return noise.with_gamma(RateMatrix(pauli_basis(len(keep)), sub), new_support)


def commute_noise_past_gate(noise: NoiseEvent, u: np.ndarray, qubits: Sequence[int]) -> NoiseEvent:
    """Commute ``noise`` past a gate ``u`` acting on register ``qubits``.

    Works on the union of the two supports and trims identity factors afterwards.
    """
    qubits = list(qubits)
    if not set(qubits) & set(noise.support):
        return noise
    union = sorted(set(noise.support) | set(qubits))
    wide = expand_noise(noise, union)
    u_wide = embed_operator(u, [union.index(q) for q in qubits], len(union))
    moved = commute_noise_past_unitary(wide, u_wide)
    return trim_support(moved)


def hoist_noise_from_block(block: DecompositionBlock) -> tuple[DecompositionBlock, list[NoiseEvent]]:
    """Move every noise event in ``block`` to its end.

    Each event is commuted past all gates that follow it inside the block.
    The hoisted events keep their relative order, so that the clean gates
    followed by the hoisted events reproduce the original block exactly.
    """
    hoisted = []
    ops = list(block.ops)
    for i, op in enumerate(ops):
        if not isinstance(op, NoiseEvent):
            continue
        ev = op
        for later in ops[i + 1:]:
            if isinstance(later, GateOp):
                ev = commute_noise_past_gate(ev, later.unitary(), later.qubits)
        hoisted.append(ev)
    clean = replace(block, ops=tuple(op for op in ops if isinstance(op, GateOp)))
    return clean, hoisted


def remap_noise_past_block(noise: NoiseEvent, block: DecompositionBlock) -> NoiseEvent:
    """Zero-order move of ``noise`` past ``block``: only its qubit labels change.

    Any commutation correction from the block's small-angle content is
    dropped; it is of first order in the block's angle.
    """
    if not block.is_permuting:
        return noise
    where = {q: block.support[block.permutation[j]] for j, q in enumerate(block.support)}
    return noise.on(tuple(where.get(q, q) for q in noise.support))


def omega_matrix(h_bar: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """``Omega_mn = (1/D) Tr[A_m^dagger A_n h] - (1/D) Tr[A_m^dagger h A_n]``."""
    h_bar = np.asarray(h_bar, dtype=complex)
    if h_bar.shape != (basis.dim, basis.dim):
        raise DimensionError(f"generator shape {h_bar.shape} does not match basis dimension {basis.dim}")
    a = basis.elements
    comm = a @ h_bar - h_bar @ a
    n = len(a)
    return (a.reshape(n, -1).conj() @ comm.reshape(n, -1).T) / basis.dim


def small_angle_commutation_correction(gamma: RateMatrix, h_bar: np.ndarray, phi: float) -> np.ndarray:
    """First-order change ``i phi [Omega, Gamma]`` of a rate matrix commuted past ``exp(-i phi h)``.

    Returned as a Hermitian (not PSD) array; the compiler never applies it.
    """
    if not is_hermitian(np.asarray(h_bar, dtype=complex)):
        raise ValueError("generator must be Hermitian")
    omega = omega_matrix(h_bar, gamma.basis)
    g = gamma.entries
    return 1j * phi * (omega @ g - g @ omega)


def pauli_permutation_indices(k: int, perm: Sequence[int]) -> np.ndarray:
    """``idx[a]`` is the basis index of label ``a`` after moving qubit ``j`` to ``perm[j]``."""
    labels = pauli_basis(k).labels
    out = []
    for lab in labels:
        chars = ["I"] * k
        for j, c in enumerate(lab):
            chars[perm[j]] = c
        out.append(pauli_label_index("".join(chars)))
    return np.array(out, dtype=int)


__all__ = [
    "CommutationMatrix",
    "NotUnitaryError",
    "commutation_matrix",
    "commute_noise_past_gate",
    "commute_noise_past_unitary",
    "conjugated_basis",
    "embed_rate_entries",
    "embedding_indices",
    "expand_noise",
    "hoist_noise_from_block",
    "omega_matrix",
    "pauli_permutation_indices",
    "remap_noise_past_block",
    "small_angle_commutation_correction",
    "trim_support",
]
