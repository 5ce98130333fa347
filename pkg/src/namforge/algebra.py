"""Dense operator and superoperator algebra.

Conventions used throughout the package:

* Density matrices are vectorized by stacking columns, so that
  ``vec(A @ rho @ B) == kron(B.T, A) @ vec(rho)``.
* Operator bases are products of Pauli matrices, ordered lexicographically
  over their labels with ``I < X < Y < Z``. Qubit 0 is the leftmost tensor
  factor (most significant bit of the computational-basis index).
* Inner products are normalized as ``(1/D) Tr[A^dagger B]`` with ``D = 2**k``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-10
PSD_FLOOR = -1e-10
CPTP_TOL = 1e-8
DEFAULT_MAX_QUBITS = 5

PAULI_CHARS = "IXYZ"
PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()

for _m in (*PAULI_MATRICES.values(), SIGMA_PLUS, SIGMA_MINUS):
    _m.setflags(write=False)


class DimensionError(ValueError):
    """Raised when an operator or register size is out of range or mismatched."""


class NotHermitianError(ValueError):
    pass


class NotPositiveError(ValueError):
    pass


def max_qubits() -> int:
    """Register cap; ``NAMFORGE_MAX_QUBITS`` overrides the default of 5."""
    value = os.environ.get("NAMFORGE_MAX_QUBITS")
    if value is None:
        return DEFAULT_MAX_QUBITS
    try:
        return int(value)
    except ValueError as exc:
        raise DimensionError(f"NAMFORGE_MAX_QUBITS must be an integer, got {value!r}") from exc


def check_qubit_count(k: int) -> None:
    cap = max_qubits()
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= cap:
        raise DimensionError(f"qubit count must be in [1, {cap}], got {k!r}")


def qubits_for_dimension(dim: int) -> int:
    k = int(round(np.log2(dim))) if dim > 0 else -1
    if k < 0 or 2**k != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return k


def pauli_string_matrix(label: str) -> np.ndarray:
    """Dense matrix of a Pauli string, e.g. ``"XZ" -> kron(X, Z)``."""
    if not label or any(c not in PAULI_CHARS for c in label):
        raise ValueError(f"invalid Pauli string {label!r}")
    out = np.ones((1, 1), dtype=complex)
    for c in label:
        out = np.kron(out, PAULI_MATRICES[c])
    return out


def pauli_label_index(label: str) -> int:
    """Position of ``label`` in the canonical traceless basis ordering."""
    idx = 0
    for c in label:
        idx = 4 * idx + PAULI_CHARS.index(c)
    if idx == 0:
        raise ValueError("the identity string is not part of the traceless basis")
    return idx - 1


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """Ordered orthonormal basis of traceless operators on ``qubit_count`` qubits.

    ``elements`` has shape ``(4**k - 1, 2**k, 2**k)``. ``labels`` names every
    element; for Pauli bases these are Pauli strings, for conjugated bases
    they are signed Pauli strings where possible.
    """

    qubit_count: int
    elements: np.ndarray
    labels: tuple[str, ...]
    is_pauli: bool = True

    @property
    def dim(self) -> int:
        return 2**self.qubit_count

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def same_as(self, other: "OperatorBasis", atol: float = 1e-12) -> bool:
        if self is other:
            return True
        if self.qubit_count != other.qubit_count:
            return False
        return bool(np.allclose(self.elements, other.elements, atol=atol, rtol=0))


@lru_cache(maxsize=None)
def _pauli_basis(k: int) -> OperatorBasis:
    labels = tuple("".join(p) for p in itertools.product(PAULI_CHARS, repeat=k))[1:]
    elements = np.stack([pauli_string_matrix(s) for s in labels])
    elements.setflags(write=False)
    return OperatorBasis(k, elements, labels, True)


def pauli_basis(k: int) -> OperatorBasis:
    """Orthonormal Pauli-product basis on ``k`` qubits (cached, read-only)."""
    check_qubit_count(k)
    return _pauli_basis(int(k))


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Normalized Frobenius inner product ``(1/D) Tr[a^dagger b]``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise DimensionError(f"expected equal square matrices, got {a.shape} and {b.shape}")
    return complex(np.vdot(a, b) / a.shape[0])


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _symmetrized_psd(m: np.ndarray, floor: float) -> np.ndarray:
    if not is_hermitian(m):
        raise NotHermitianError(
            f"rate matrix is not Hermitian (deviation {np.max(np.abs(m - m.conj().T)):.3e})"
        )
    m = 0.5 * (m + m.conj().T)
    if m.size:
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < floor:
            raise NotPositiveError(f"rate matrix has eigenvalue {lo:.3e} below the floor {floor:g}")
    return m


@dataclass(frozen=True, eq=False)
class RateMatrix:
    """Hermitian positive semi-definite coefficient matrix over an operator basis."""

    basis: OperatorBasis
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        n = len(self.basis)
        if entries.shape != (n, n):
            raise DimensionError(f"rate matrix must be {n}x{n} for this basis, got {entries.shape}")
        entries = _symmetrized_psd(entries, PSD_FLOOR)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zeros(cls, basis: OperatorBasis) -> "RateMatrix":
        return cls(basis, np.zeros((len(basis), len(basis)), dtype=complex))

    @classmethod
    def clipped(cls, basis: OperatorBasis, entries: np.ndarray) -> "RateMatrix":
        """Build after clipping eigenvalues in ``[PSD_FLOOR, 0)`` to zero.

        Larger negative eigenvalues raise :class:`NotPositiveError`.
        """
        entries = _symmetrized_psd(np.asarray(entries, dtype=complex), PSD_FLOOR)
        w, v = np.linalg.eigh(entries)
        if w.size and w[0] < 0:
            entries = (v * np.clip(w, 0.0, None)) @ v.conj().T
        return cls(basis, entries)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def __add__(self, other: "RateMatrix") -> "RateMatrix":
        if not self.basis.same_as(other.basis):
            raise DimensionError("cannot add rate matrices over different bases")
        return RateMatrix(self.basis, self.entries + other.entries)

    def scaled(self, factor: float) -> "RateMatrix":
        if factor < 0:
            raise ValueError("rate matrices may only be scaled by non-negative factors")
        return RateMatrix(self.basis, factor * self.entries)


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(rho).reshape(-1, order="F")


def unvectorize(vec: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(vec.size)))
    return np.asarray(vec).reshape((d, d), order="F")


def liouvillian_hamiltonian(h: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> -i [H, rho]``."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"Hamiltonian must be square, got {h.shape}")
    if not is_hermitian(h):
        raise NotHermitianError("Hamiltonian is not Hermitian")
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def lindblad_superoperator(elements: np.ndarray, entries: np.ndarray) -> np.ndarray:
    """Dissipator superoperator for arbitrary coefficients, without validation.

    ``sum_nm G_nm (A_n rho A_m^dagger - 1/2 {A_m^dagger A_n, rho})``.
    Used directly when a deliberately non-physical generator is wanted.
    """
    elements = np.asarray(elements)
    n, d, _ = elements.shape
    g = np.asarray(entries, dtype=complex)
    flat = elements.reshape(n, d * d)
    # t[n, p, r] = sum_m G_nm conj(A_m)[p, r]
    t = (g @ flat.conj()).reshape(n, d, d)
    # jump[p, q, r, s] = sum_n t[n, p, r] A_n[q, s]  -> kron(conj(A_m), A_n) rows (p,q), cols (r,s)
    jump = (t.reshape(n, d * d).T @ flat).reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
    # K = sum_nm G_nm A_m^dagger A_n
    c = np.einsum("nm,mji->nij", g, elements.conj())
    k_op = np.einsum("nij,njk->ik", c, elements)
    eye = np.eye(d)
    return jump - 0.5 * (np.kron(eye, k_op) + np.kron(k_op.T, eye))


def dissipator(gamma: RateMatrix) -> np.ndarray:
    """Lindblad dissipator superoperator of a validated rate matrix."""
    return lindblad_superoperator(gamma.basis.elements, gamma.entries)


def diagonalize_rate_matrix(gamma: RateMatrix) -> list[tuple[float, np.ndarray]]:
    """Decay rates and jump operators of the diagonal Lindblad form.

    Returns ``(rate, L)`` pairs sorted by decreasing rate, where
    ``L = sum_n v^(n) A_n`` for the normalized eigenvector ``v``. Jump
    operators are orthonormal under :func:`frobenius_inner`.
    """
    w, v = np.linalg.eigh(gamma.entries)
    order = np.argsort(w)[::-1]
    out = []
    for i in order:
        rate = max(float(w[i]), 0.0)
        jump = np.tensordot(v[:, i], gamma.basis.elements, axes=1)
        out.append((rate, jump))
    return out


def rebuild_rate_matrix(pairs: Sequence[tuple[float, np.ndarray]], basis: OperatorBasis) -> np.ndarray:
    """Inverse of :func:`diagonalize_rate_matrix`: ``sum_i rate_i v_i v_i^dagger``."""
    coeffs = np.array([[frobenius_inner(a, jump) for a in basis.elements] for _, jump in pairs])
    rates = np.array([r for r, _ in pairs])
    return (coeffs.T * rates) @ coeffs.conj()


def superop_exp(generator: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(t * L)`` by scaling and squaring (Pade approximant)."""
    generator = np.asarray(generator, dtype=complex)
    if t < 0:
        raise ValueError("time must be non-negative")
    if generator.shape[0] > 4 ** max_qubits():
        raise DimensionError("superoperator exceeds the register cap")
    return scipy.linalg.expm(t * generator)


def superop_exp_eig(generator: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(t * L)`` through an eigendecomposition of ``L``.

    Independent cross-check of :func:`superop_exp`; only valid for
    diagonalizable generators with a well-conditioned eigenbasis.
    """
    w, v = np.linalg.eig(np.asarray(generator, dtype=complex))
    return (v * np.exp(t * w)) @ np.linalg.inv(v)


def unitary_channel(u: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> U rho U^dagger``."""
    u = np.asarray(u, dtype=complex)
    return np.kron(u.conj(), u)


def apply_superop(channel: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return unvectorize(channel @ vectorize(rho))


def choi_matrix(channel: np.ndarray) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) S(|i><j|)``."""
    channel = np.asarray(channel)
    d2 = channel.shape[0]
    d = int(round(np.sqrt(d2)))
    if channel.shape != (d2, d2) or d * d != d2:
        raise DimensionError(f"superoperator shape {channel.shape} is not (D^2, D^2)")
    qubits_for_dimension(d)
    t = channel.reshape((d, d, d, d), order="F")  # t[a, b, c, e] = S[a + b d, c + e d]
    return t.transpose(2, 0, 3, 1).reshape(d2, d2)


@dataclass(frozen=True)
class CPTPReport:
    trace_preserving: bool
    min_choi_eigenvalue: float
    trace_deviation: float

    @property
    def is_cptp(self) -> bool:
        return self.trace_preserving and self.min_choi_eigenvalue >= -CPTP_TOL


def choi_cptp_check(channel: np.ndarray, tol: float = CPTP_TOL) -> CPTPReport:
    """Trace preservation and complete positivity diagnostics of a channel."""
    choi = choi_matrix(channel)
    d = int(round(np.sqrt(channel.shape[0])))
    ident = vectorize(np.eye(d))
    deviation = float(np.max(np.abs(ident @ channel - ident)))
    herm = 0.5 * (choi + choi.conj().T)
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    return CPTPReport(deviation < tol, min_eig, deviation)


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit-trace and PSD within ``tol``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got {rho.shape}")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > tol:
        raise ValueError(f"density matrix is not Hermitian (deviation {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise ValueError(f"density matrix trace is {tr.real:.12g}, expected 1")
    lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if lo < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")


def basis_state(bits: str) -> np.ndarray:
    """Pure computational-basis density matrix, e.g. ``"0101"``."""
    if not bits or any(b not in "01" for b in bits):
        raise ValueError(f"invalid basis-state string {bits!r}")
    d = 2 ** len(bits)
    rho = np.zeros((d, d), dtype=complex)
    idx = int(bits, 2)
    rho[idx, idx] = 1.0
    return rho


def all_up(k: int) -> np.ndarray:
    """All spins polarized along +z, i.e. ``|0...0><0...0|``."""
    return basis_state("0" * k)


def embed_operator(op: np.ndarray, qubits: Sequence[int], k: int) -> np.ndarray:
    """Lift an operator on ``qubits`` (in the listed order) to a ``k``-qubit register."""
    qubits = list(qubits)
    m = len(qubits)
    op = np.asarray(op, dtype=complex)
    if op.shape != (2**m, 2**m):
        raise DimensionError(f"operator shape {op.shape} does not match {m} qubits")
    if len(set(qubits)) != m or any(not 0 <= q < k for q in qubits):
        raise DimensionError(f"invalid qubit list {qubits} for a {k}-qubit register")
    rest = [q for q in range(k) if q not in qubits]
    full = np.kron(op, np.eye(2 ** len(rest)))
    # axes currently ordered as qubits + rest; move them to register order
    order = qubits + rest
    perm = [order.index(q) for q in range(k)]
    t = full.reshape([2] * (2 * k))
    t = t.transpose(perm + [k + p for p in perm])
    return t.reshape(2**k, 2**k)


def pauli_decompose(op: np.ndarray) -> dict[str, complex]:
    """Coefficients ``c_P = (1/D) Tr[P op]`` over all Pauli strings incl. identity."""
    op = np.asarray(op, dtype=complex)
    k = qubits_for_dimension(op.shape[0])
    out = {}
    for label in ("".join(p) for p in itertools.product(PAULI_CHARS, repeat=k)):
        c = np.vdot(pauli_string_matrix(label), op) / op.shape[0]
        if abs(c) > 0:
            out[label] = complex(c)
    return out
