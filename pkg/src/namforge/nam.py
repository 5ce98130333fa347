"""Compile a noisy Trotter-step circuit into its noisy algorithm model.

The model is the static Lindbladian ``-i[H, .] + D[Gamma]`` whose exponential
over one Trotter step approximates the circuit. ``H`` is the sum of the
blocks' declared generators; ``Gamma`` is the sum of every noise event after
it has been hoisted out of its block, relabeled past the remaining SWAP
structure, and weighted by its gate-time ratio.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from .algebra import (
    RateMatrix,
    dissipator,
    embed_operator,
    is_hermitian,
    liouvillian_hamiltonian,
    pauli_basis,
    pauli_decompose,
    pauli_label_index,
    pauli_string_matrix,
)
from .circuit.model import Circuit, CircuitError, DecompositionBlock, NoiseEvent, validate_circuit
from .circuit.noise import independent_rates
from .commutation import (
    commute_noise_past_gate,
    embed_rate_entries,
    hoist_noise_from_block,
    remap_noise_past_block,
)

ALTERNATIVE_KINDS = ("damping", "dephasing", "depolarizing", "global_depolarizing", "uncommuted")


@dataclass(frozen=True)
class Contribution:
    """Where one term of the aggregated dissipator came from."""

    element: int
    op: int | None
    support: tuple[int, ...]
    gate_time_ratio: float
    trace: float
    hoisted: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "element": self.element,
            "op": self.op,
            "support": list(self.support),
            "gate_time_ratio": self.gate_time_ratio,
            "trace": self.trace,
            "hoisted": self.hoisted,
        }


@dataclass(frozen=True, eq=False)
class NoisyAlgorithmModel:
    qubit_count: int
    tau: float
    hamiltonian: np.ndarray = field(repr=False)
    trotter_correction: np.ndarray = field(repr=False)
    dissipator_gamma: RateMatrix = field(repr=False)
    contributions: tuple[Contribution, ...] = ()
    label: str = "nam"

    @property
    def dim(self) -> int:
        return 2**self.qubit_count

    def effective_hamiltonian(self, include_trotter_correction: bool = False) -> np.ndarray:
        if include_trotter_correction:
            return self.hamiltonian + self.trotter_correction
        return self.hamiltonian

    def liouvillian(self, include_trotter_correction: bool = False) -> np.ndarray:
        h = self.effective_hamiltonian(include_trotter_correction)
        return liouvillian_hamiltonian(h) + dissipator(self.dissipator_gamma)

    def with_dissipator(self, gamma: RateMatrix, label: str) -> "NoisyAlgorithmModel":
        return replace(self, dissipator_gamma=gamma, contributions=(), label=label)

    @property
    def noise_trace(self) -> float:
        return self.dissipator_gamma.trace

    def noise_to_coherence_ratio(self) -> float:
        """Dissipator trace over twice the largest Hamiltonian coupling (proxy for mu/phi)."""
        coeffs = [abs(c) for lab, c in pauli_decompose(self.hamiltonian).items() if set(lab) != {"I"}]
        if not coeffs:
            return float("inf") if self.noise_trace > 0 else 0.0
        return self.noise_trace / (2 * max(coeffs))


def trotter_correction(generators: Sequence[np.ndarray], tau: float) -> np.ndarray:
    """First-order BCH correction ``-(i/2) tau sum_{X<Y} [h_X, h_Y]``.

    ``generators`` are listed in matrix-product order: ``U = U_1 U_2 ...``,
    so the first one acts last in time.
    """
    if not generators:
        return np.zeros((1, 1), dtype=complex)
    d = np.asarray(generators[0]).shape[0]
    out = np.zeros((d, d), dtype=complex)
    running = np.zeros((d, d), dtype=complex)
    for h in generators:
        h = np.asarray(h, dtype=complex)
        # sum_{X<Y} [h_X, h_Y] = sum_Y [sum_{X<Y} h_X, h_Y]
        out += running @ h - h @ running
        running += h
    return -0.5j * tau * out


def _logical_labels(block: DecompositionBlock, logical_at: list[int]) -> list[int]:
    return [logical_at[p] for p in block.support]


def _advance_layout(logical_at: list[int], block: DecompositionBlock) -> list[int]:
    g = block.global_permutation(len(logical_at))
    out = list(logical_at)
    for q in range(len(logical_at)):
        out[g[q]] = logical_at[q]
    return out


def _move_to_end(ev: NoiseEvent, later: Sequence[DecompositionBlock], swap_remap: str) -> NoiseEvent:
    for blk in later:
        if not blk.is_permuting:
            continue
        if swap_remap == "permutation":
            ev = remap_noise_past_block(ev, blk)
        else:
            ev = commute_noise_past_gate(ev, blk.permutation_unitary(), blk.support)
    return ev


def _compile(circuit: Circuit, hoist: bool, swap_remap: str) -> NoisyAlgorithmModel:
    if swap_remap not in ("permutation", "unitary"):
        raise ValueError(f"swap_remap must be 'permutation' or 'unitary', got {swap_remap!r}")
    validate_circuit(circuit).raise_for_failures()
    k = circuit.qubit_count
    d = 2**k
    logical_at = list(range(k))
    generators: list[np.ndarray] = []
    placed: list[tuple[int, int | None, NoiseEvent, bool]] = []  # (element, op, event, hoisted)
    for i, el in enumerate(circuit.elements):
        if isinstance(el, NoiseEvent):
            placed.append((i, None, el, False))
            continue
        if el.small_angle and el.generator:
            generators.append(embed_operator(el.generator_matrix(), _logical_labels(el, logical_at), k))
        if hoist:
            _, events = hoist_noise_from_block(el)
        else:
            events = el.noise
        op_idx = [j for j, op in enumerate(el.ops) if isinstance(op, NoiseEvent)]
        for j, ev in zip(op_idx, events):
            placed.append((i, j, ev, hoist))
        logical_at = _advance_layout(logical_at, el)
    if logical_at != list(range(k)):
        raise CircuitError(f"net qubit permutation over one Trotter step must be the identity, got {logical_at}")

    blocks_after = {i: [el for el in circuit.elements[i + 1:] if isinstance(el, DecompositionBlock)]
                    for i in range(len(circuit.elements))}
    basis = pauli_basis(k)
    n = len(basis)
    total = np.zeros((n, n), dtype=complex)
    contributions = []
    register = list(range(k))
    for i, j, ev, hoisted in placed:
        moved = _move_to_end(ev, blocks_after[i], swap_remap)
        local = embed_rate_entries(moved.gamma.entries, moved.support, register)
        total += moved.gate_time_ratio * local
        contributions.append(Contribution(
            i, j, moved.support, moved.gate_time_ratio, moved.gate_time_ratio * moved.gamma.trace, hoisted
        ))

    h = sum(generators) if generators else np.zeros((d, d), dtype=complex)
    return NoisyAlgorithmModel(
        k,
        circuit.tau,
        np.asarray(h, dtype=complex),
        trotter_correction(generators[::-1], circuit.tau) if generators else np.zeros((d, d), dtype=complex),
        RateMatrix.clipped(basis, total),
        tuple(contributions),
        "nam" if hoist else "uncommuted",
    )


def build_noisy_algorithm_model(circuit: Circuit, swap_remap: str = "permutation") -> NoisyAlgorithmModel:
    """Compile ``circuit`` into its noisy algorithm model.

    ``swap_remap="unitary"`` moves noise past permuting blocks with the full
    commutation matrix of the block's permutation instead of relabeling
    qubits; both give the same model.
    """
    return _compile(circuit, True, swap_remap)


def uncommuted_model(circuit: Circuit) -> NoisyAlgorithmModel:
    """Baseline that sums the raw noise events without commuting them out of blocks."""
    return _compile(circuit, False, "permutation")


def trace_matched_alternative(kind: str, model: NoisyAlgorithmModel, original_circuit: Circuit | None = None) -> NoisyAlgorithmModel:
    """Replace the dissipator by a standard family with the same rate-matrix trace."""
    if kind == "global":
        kind = "global_depolarizing"
    if kind not in ALTERNATIVE_KINDS:
        raise ValueError(f"unknown alternative {kind!r}; expected one of {ALTERNATIVE_KINDS}")
    if kind == "uncommuted":
        if original_circuit is None:
            raise ValueError("the uncommuted baseline needs the original circuit")
        alt = uncommuted_model(original_circuit)
        return replace(model, dissipator_gamma=alt.dissipator_gamma, contributions=alt.contributions, label=kind)
    t = model.noise_trace
    if t <= 0:
        raise ValueError("cannot trace-match an alternative to a model with a zero-trace dissipator")
    k = model.qubit_count
    basis = pauli_basis(k)
    if kind in ("damping", "dephasing"):
        entries = independent_rates(kind, [2 * t / k] * k)
    elif kind == "depolarizing":
        entries = independent_rates(kind, [4 * t / (3 * k)] * k)
    else:
        gamma_dc = t * 4**k / (4**k - 1)
        entries = gamma_dc / 4**k * np.eye(len(basis), dtype=complex)
    return model.with_dissipator(RateMatrix(basis, entries), kind)


# -- serialization -----------------------------------------------------------

# entries below this fraction of the largest one are roundoff from the basis transforms
SERIAL_CUTOFF = 1e-14


def _pauli_map(op: np.ndarray) -> dict[str, float]:
    coeffs = pauli_decompose(op)
    if any(abs(c.imag) > 1e-12 for c in coeffs.values()):
        raise ValueError("operator is not Hermitian")
    scale = max((abs(c.real) for c in coeffs.values()), default=0.0)
    return {lab: c.real for lab, c in coeffs.items() if abs(c.real) > SERIAL_CUTOFF * scale}


def _from_pauli_map(terms: dict[str, float], k: int) -> np.ndarray:
    out = np.zeros((2**k, 2**k), dtype=complex)
    for lab, c in terms.items():
        if len(lab) != k:
            raise ValueError(f"Pauli string {lab!r} does not span {k} qubits")
        out += c * pauli_string_matrix(lab)
    return out


def model_to_dict(model: NoisyAlgorithmModel) -> dict[str, Any]:
    basis = pauli_basis(model.qubit_count)
    g = model.dissipator_gamma.entries
    rows, cols = np.nonzero(np.abs(g) > SERIAL_CUTOFF * np.abs(g).max(initial=0.0))
    return {
        "qubits": model.qubit_count,
        "tau": model.tau,
        "label": model.label,
        "hamiltonian": _pauli_map(model.hamiltonian),
        "trotter_correction": _pauli_map(model.trotter_correction),
        "dissipator": [
            {"row": basis.labels[r], "col": basis.labels[c], "re": float(g[r, c].real), "im": float(g[r, c].imag)}
            for r, c in zip(rows, cols)
        ],
        "dissipator_trace": model.noise_trace,
        "noise_to_coherence_ratio": model.noise_to_coherence_ratio(),
        "provenance": [c.to_dict() for c in model.contributions],
    }


def model_from_dict(doc: dict[str, Any]) -> NoisyAlgorithmModel:
    k = int(doc["qubits"])
    basis = pauli_basis(k)
    n = len(basis)
    g = np.zeros((n, n), dtype=complex)
    for e in doc["dissipator"]:
        g[pauli_label_index(e["row"]), pauli_label_index(e["col"])] = complex(e["re"], e["im"])
    h = _from_pauli_map(doc["hamiltonian"], k)
    dh = _from_pauli_map(doc.get("trotter_correction", {}), k)
    if not is_hermitian(h):
        raise ValueError("hamiltonian is not Hermitian")
    contributions = tuple(
        Contribution(c["element"], c["op"], tuple(c["support"]), c["gate_time_ratio"], c["trace"], c["hoisted"])
        for c in doc.get("provenance", [])
    )
    return NoisyAlgorithmModel(k, float(doc["tau"]), h, dh, RateMatrix(basis, g), contributions, doc.get("label", "nam"))


def serialize_model(model: NoisyAlgorithmModel, indent: int | None = 2) -> str:
    return json.dumps(model_to_dict(model), indent=indent)


def parse_model(text: str) -> NoisyAlgorithmModel:
    return model_from_dict(json.loads(text))
