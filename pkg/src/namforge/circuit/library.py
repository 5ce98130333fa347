"""Circuit generators: the chain TFIM Trotter step and a few small reference circuits."""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

import numpy as np

from .model import Circuit, CircuitError, DecompositionBlock, GateOp, NoiseEvent
from .noise import custom_noise, standard_noise


def _hadamard_noise(q: int, mu: float, rate_matrix: np.ndarray | None, tau: float) -> NoiseEvent:
    if rate_matrix is not None:
        return custom_noise(np.asarray(rate_matrix, dtype=complex) / tau, (q,))
    return standard_noise("damping", (q,), mu / tau)


def _zz_via_xx_block(a: int, b: int, J: float, tau: float, mu: float, rate_matrix) -> DecompositionBlock:
    """``H H . XX(2 J tau) . H H`` with noise after every Hadamard."""
    ops: list = []
    for _ in range(2):
        if ops:
            ops.append(GateOp("XX", (a, b), 2 * J * tau))
        for q in (a, b):
            ops.append(GateOp("H", (q,)))
            if mu or rate_matrix is not None:
                ops.append(_hadamard_noise(q, mu, rate_matrix, tau))
    return DecompositionBlock(tuple(ops), (a, b), generator={"ZZ": J})


def chain_bond_layers(k: int) -> list[list[tuple[int, int]]]:
    """Open-chain bonds split into an even and an odd brickwork layer."""
    even = [(i, i + 1) for i in range(0, k - 1, 2)]
    odd = [(i, i + 1) for i in range(1, k - 1, 2)]
    return [layer for layer in (even, odd) if layer]


def build_tfim_trotter_circuit(
    k: int,
    J_tau: float,
    g_tau: float,
    mu_H: float,
    tau: float = 1.0,
    idle_noise: bool = True,
    hadamard_rate_matrix: np.ndarray | None = None,
) -> Circuit:
    """One first-order Trotter step of ``H = J sum Z_i Z_{i+1} + g sum X_i`` on an open chain.

    Each Ising term is a Hadamard-wrapped XX block; the transverse field is
    an RX layer. Every Hadamard is followed by damping with ``gamma t_H =
    mu_H`` (or by ``hadamard_rate_matrix``, given as rate times duration).
    Qubits outside a Hadamard layer pick up the same damping as idle noise.
    The small-angle gates are noise-free.
    """
    if k < 2:
        raise CircuitError("the TFIM chain needs at least two qubits")
    if mu_H < 0:
        raise CircuitError("mu_H must be non-negative")
    J, g = J_tau / tau, g_tau / tau
    noisy = bool(mu_H) or hadamard_rate_matrix is not None
    elements: list = []
    for layer in chain_bond_layers(k):
        busy = {q for bond in layer for q in bond}
        idle = [q for q in range(k) if q not in busy] if idle_noise and noisy else []
        # two Hadamard layers per ZZ layer; idle qubits commute with the blocks
        elements.extend(_hadamard_noise(q, mu_H, hadamard_rate_matrix, tau) for q in idle)
        elements.extend(_zz_via_xx_block(a, b, J, tau, mu_H, hadamard_rate_matrix) for a, b in layer)
        elements.extend(_hadamard_noise(q, mu_H, hadamard_rate_matrix, tau) for q in idle)
    for q in range(k):
        elements.append(DecompositionBlock((GateOp("RX", (q,), 2 * g * tau),), (q,), generator={"X": g}))
    return Circuit(k, tau, tuple(elements))


def _halved(block: DecompositionBlock) -> DecompositionBlock:
    if not block.small_angle:
        return block
    ops = tuple(replace(op, angle=op.angle / 2) if isinstance(op, GateOp) and op.angle is not None else op
                for op in block.ops)
    return replace(block, ops=ops, generator={lab: c / 2 for lab, c in block.generator.items()})


def build_second_order_circuit(base: Circuit) -> Circuit:
    """Symmetric splitting: every element at half angle, then the same elements in reverse order.

    Noise events are copied unchanged into both halves.
    """
    half = [(_halved(el) if isinstance(el, DecompositionBlock) else el) for el in base.elements]
    return Circuit(base.qubit_count, base.trotter_step, tuple(half + half[::-1]))


# -- reference circuits --------------------------------------------------------

def zz_cnot_block(a: int, b: int, J: float, tau: float, noise: Sequence[tuple[int, NoiseEvent]] = ()) -> DecompositionBlock:
    """``CNOT . RZ_b(2 J tau) . CNOT``; ``noise`` inserts events after the given op positions."""
    ops: list = [GateOp("CNOT", (a, b)), GateOp("RZ", (b,), 2 * J * tau), GateOp("CNOT", (a, b))]
    for pos, ev in sorted(noise, key=lambda t: -t[0]):
        ops.insert(pos + 1, ev)
    return DecompositionBlock(tuple(ops), (a, b), generator={"ZZ": J})


def cnot_zz_circuit(J: float = 0.05, tau: float = 1.0, gamma: float = 1e-3) -> Circuit:
    """Two-qubit ZZ block with dephasing on the target after the first CNOT."""
    ev = standard_noise("dephasing", (1,), gamma / tau)
    return Circuit(2, tau, (zz_cnot_block(0, 1, J, tau, [(0, ev)]),))


def implicit_swap_circuit(phi: float = 0.2, gamma: float = 1e-3) -> Circuit:
    """``CNOT01, RZ1(phi), CNOT10, CNOT01``: a ZZ interaction followed by a SWAP.

    Run twice per step so that the qubit labels return home.
    """
    def block(noise_q):
        ops = (
            GateOp("CNOT", (0, 1)),
            standard_noise("damping", (noise_q,), gamma),
            GateOp("RZ", (1,), phi),
            GateOp("CNOT", (1, 0)),
            GateOp("CNOT", (0, 1)),
        )
        return DecompositionBlock(ops, (0, 1), (1, 0), generator={"ZZ": phi / 2})

    return Circuit(2, 1.0, (block(1), block(0)))


def swap_network_circuit(J: float = 0.05, gamma: float = 1e-3) -> Circuit:
    """Three qubits where the (0, 2) interaction is routed through an explicit SWAP block."""
    def swap_block():
        return DecompositionBlock(
            (
                standard_noise("depolarizing", (1,), gamma),
                GateOp("SWAP", (1, 2)),
                standard_noise("damping", (1,), gamma),
                standard_noise("dephasing", (2,), 2 * gamma),
            ),
            (1, 2),
            (1, 0),
            small_angle=False,
        )

    dephase = standard_noise("dephasing", (1,), gamma)
    elements = (
        zz_cnot_block(0, 1, J, 1.0, [(0, dephase)]),
        standard_noise("damping", (2,), gamma, 0.5),
        swap_block(),
        zz_cnot_block(0, 1, 2 * J, 1.0, [(1, standard_noise("damping", (0, 1), (gamma, 2 * gamma)))]),
        swap_block(),
    )
    return Circuit(3, 1.0, elements)


def cancellation_circuit(J: float = 0.05, mu: float = 1e-3, fictitious: bool = True) -> Circuit:
    """Two overlapping ZZ-via-XX blocks on (0, 1) and (1, 2) sharing a cancelled Hadamard pair.

    On hardware the middle Hadamards are not run; instead qubit 1 idles
    while qubits 0 and 2 run theirs. With ``fictitious=True`` the cancelled
    pair is restored as noise-free fictitious gates, with ``False`` as
    ordinary noise-free gates.
    """
    def nh(q):
        return standard_noise("damping", (q,), mu)

    a = DecompositionBlock((
        GateOp("H", (0,)), nh(0), GateOp("H", (1,)), nh(1),
        GateOp("XX", (0, 1), 2 * J),
        GateOp("H", (0,)), nh(0), nh(1),
        GateOp("H", (1,), fictitious=fictitious),
    ), (0, 1), generator={"ZZ": J})
    b = DecompositionBlock((
        GateOp("H", (1,), fictitious=fictitious),
        GateOp("H", (2,)), nh(2),
        GateOp("XX", (1, 2), 2 * J),
        GateOp("H", (1,)), nh(1), GateOp("H", (2,)), nh(2),
    ), (1, 2), generator={"ZZ": J})
    return Circuit(3, 1.0, (a, b))


def minimal_circuit() -> Circuit:
    """One qubit, ``tau = 0.1``, a single noise-free ``RX(0.2)`` with generator ``X``."""
    return Circuit(1, 0.1, (DecompositionBlock((GateOp("RX", (0,), 0.2),), (0,), generator={"X": 1.0}),))


__all__ = [
    "build_second_order_circuit",
    "build_tfim_trotter_circuit",
    "cancellation_circuit",
    "chain_bond_layers",
    "cnot_zz_circuit",
    "implicit_swap_circuit",
    "minimal_circuit",
    "swap_network_circuit",
    "zz_cnot_block",
]
