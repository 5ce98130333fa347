import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from namforge.algebra import (
    PAULI_MATRICES,
    DimensionError,
    RateMatrix,
    dissipator,
    embed_operator,
    lindblad_superoperator,
    pauli_basis,
    superop_exp,
    unitary_channel,
)
from namforge.circuit import DecompositionBlock, GateOp, NoiseEvent, standard_noise
from namforge.circuit.gates import CNOT, HADAMARD, SWAP, gate_matrix
from namforge.commutation import (
    NotUnitaryError,
    commutation_matrix,
    commute_noise_past_gate,
    commute_noise_past_unitary,
    conjugated_basis,
    embed_rate_entries,
    hoist_noise_from_block,
    omega_matrix,
    remap_noise_past_block,
    small_angle_commutation_correction,
    trim_support,
)

from conftest import random_psd, random_unitary

X = PAULI_MATRICES["X"]


def event_channel(ev, k, qubits=None):
    qubits = list(range(k)) if qubits is None else qubits
    entries = embed_rate_entries(ev.gamma.entries, ev.support, qubits)
    return superop_exp(dissipator(RateMatrix(pauli_basis(k), entries)), 1.0)


def block_channel(ops, support):
    k = len(support)
    ch = np.eye(4**k, dtype=complex)
    for op in ops:
        if isinstance(op, GateOp):
            u = embed_operator(op.unitary(), [support.index(q) for q in op.qubits], k)
            ch = unitary_channel(u) @ ch
        else:
            ch = event_channel(op, k, list(support)) @ ch
    return ch


def test_identity_swap_and_hadamard_matrices():
    b2 = pauli_basis(2)
    assert np.abs(commutation_matrix(np.eye(4), b2).entries - np.eye(15)).max() < 1e-15
    m = commutation_matrix(SWAP, b2).entries
    for a, c in [("XI", "IX"), ("XY", "YX"), ("ZZ", "ZZ"), ("IY", "YI")]:
        assert abs(m[b2.index(c), b2.index(a)] - 1) < 1e-15
    assert np.abs(np.abs(m).sum(axis=0) - 1).max() < 1e-15
    mh = commutation_matrix(HADAMARD, pauli_basis(1)).entries
    assert np.abs(mh - np.array([[0, 0, 1], [0, -1, 0], [1, 0, 0]])).max() < 1e-15


def test_non_unitary_rejected():
    with pytest.raises(NotUnitaryError):
        commutation_matrix(np.diag([1.0, 1.1]), pauli_basis(1))
    with pytest.raises(DimensionError):
        commutation_matrix(np.eye(4), pauli_basis(1))


def test_dephasing_past_rz_and_hadamard():
    ev = standard_noise("dephasing", (0,), 0.2)
    same = commute_noise_past_unitary(ev, gate_matrix("RZ", 0.4))
    assert np.abs(same.gamma.entries - ev.gamma.entries).max() < 1e-15
    moved = commute_noise_past_unitary(ev, HADAMARD)
    assert np.abs(moved.gamma.entries - np.diag([0.1, 0, 0])).max() < 1e-15


def test_damping_past_cnot_becomes_correlated():
    ev = standard_noise("damping", (1,), 0.3)
    moved = commute_noise_past_gate(ev, CNOT, (0, 1))
    assert moved.support == (0, 1)
    g = moved.gamma.entries
    off = [(i, j) for i in range(15) for j in range(15) if abs(g[i, j]) > 1e-12]
    labels = pauli_basis(2).labels
    assert any(labels[i][0] != "I" and labels[i][1] != "I" for i, _ in off)
    lhs = unitary_channel(CNOT) @ event_channel(ev.on((1,)), 2)
    rhs = event_channel(moved, 2) @ unitary_channel(CNOT)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_composition_rule(rng):
    b = pauli_basis(2)
    for _ in range(20):
        u1, u2 = random_unitary(rng, 4), random_unitary(rng, 4)
        m12 = commutation_matrix(u2 @ u1, b).entries
        assert np.abs(m12 - commutation_matrix(u2, b).entries @ commutation_matrix(u1, b).entries).max() < 1e-9


def test_conjugated_basis_labels_and_equivalence(rng):
    b1 = pauli_basis(1)
    cb = conjugated_basis(HADAMARD, b1)
    assert cb.labels == ("Z", "-Y", "X")
    assert conjugated_basis(np.eye(2), b1).labels == b1.labels
    b = pauli_basis(2)
    for _ in range(10):
        u = random_unitary(rng, 4)
        g = random_psd(rng, 15)
        cb = conjugated_basis(u, b)
        flat = cb.elements.reshape(15, -1)
        assert np.abs(flat.conj() @ flat.T / 4 - np.eye(15)).max() < 1e-12
        m = commutation_matrix(u, b)
        lhs = dissipator(m.apply(RateMatrix(b, g)))
        rhs = lindblad_superoperator(cb.elements, g)
        assert np.abs(lhs - rhs).max() < 1e-9


def test_trim_support_drops_identity_factors():
    ev = standard_noise("dephasing", (3,), 0.2)
    wide = NoiseEvent(RateMatrix(pauli_basis(2), embed_rate_entries(ev.gamma.entries, (3,), (1, 3))), (1, 3))
    t = trim_support(wide)
    assert t.support == (3,)
    assert np.abs(t.gamma.entries - ev.gamma.entries).max() == 0


def zz_block(noise):
    ops = [GateOp("CNOT", (0, 1)), GateOp("RZ", (1,), 0.2), GateOp("CNOT", (0, 1))]
    for pos, ev in sorted(noise, key=lambda t: -t[0]):
        ops.insert(pos + 1, ev)
    return DecompositionBlock(tuple(ops), (0, 1), generator={"ZZ": 0.1})


def test_hoist_single_event():
    ev = standard_noise("dephasing", (1,), 0.05)
    blk = zz_block([(0, ev)])
    clean, hoisted = hoist_noise_from_block(blk)
    assert all(isinstance(op, GateOp) for op in clean.ops) and len(hoisted) == 1
    u = CNOT @ embed_operator(gate_matrix("RZ", 0.2), [1], 2)
    expected = commutation_matrix(u, pauli_basis(2)).apply(
        RateMatrix(pauli_basis(2), embed_rate_entries(ev.gamma.entries, (1,), (0, 1))))
    got = embed_rate_entries(hoisted[0].gamma.entries, hoisted[0].support, (0, 1))
    assert np.abs(got - expected.entries).max() < 1e-14
    after = block_channel(list(clean.ops) + hoisted, [0, 1])
    assert np.abs(after - block_channel(blk.ops, [0, 1])).max() < 1e-9


def test_hoist_noise_free_and_two_events():
    blk = zz_block([])
    clean, hoisted = hoist_noise_from_block(blk)
    assert hoisted == [] and clean == blk
    blk = zz_block([(0, standard_noise("damping", (1,), 0.1)), (1, standard_noise("depolarizing", (0, 1), 0.05))])
    clean, hoisted = hoist_noise_from_block(blk)
    assert len(hoisted) == 2
    after = block_channel(list(clean.ops) + hoisted, [0, 1])
    assert np.abs(after - block_channel(blk.ops, [0, 1])).max() < 1e-9


gate_st = st.sampled_from(["H", "RX", "RZ", "CNOT", "CNOT10", "SWAP", "XX", "ZZ"])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(gate_st, st.floats(-3, 3), st.integers(0, 1)), min_size=1, max_size=6),
       st.lists(st.integers(0, 6), max_size=3), st.integers(0, 2**31 - 1))
def test_hoisting_soundness_random_blocks(gates, noise_pos, seed):
    rng = np.random.default_rng(seed)
    ops = []
    for name, ang, q in gates:
        if name == "CNOT10":
            ops.append(GateOp("CNOT", (1, 0)))
        elif name in ("CNOT", "SWAP"):
            ops.append(GateOp(name, (0, 1)))
        elif name in ("XX", "ZZ"):
            ops.append(GateOp(name, (0, 1), ang))
        elif name == "H":
            ops.append(GateOp("H", (q,)))
        else:
            ops.append(GateOp(name, (q,), ang))
    for p in sorted(noise_pos, reverse=True):
        support = [(0,), (1,), (0, 1)][rng.integers(3)]
        g = RateMatrix(pauli_basis(len(support)), random_psd(rng, 4 ** len(support) - 1, scale=0.05))
        ops.insert(min(p, len(ops)), NoiseEvent(g, support))
    blk = DecompositionBlock(tuple(ops), (0, 1))
    clean, hoisted = hoist_noise_from_block(blk)
    after = block_channel(list(clean.ops) + hoisted, [0, 1])
    assert np.abs(after - block_channel(blk.ops, [0, 1])).max() < 1e-9


def test_remap_identity_and_swap():
    ev = standard_noise("damping", (0,), 0.1)
    plain = zz_block([])
    assert remap_noise_past_block(ev, plain) == ev
    swap = DecompositionBlock((GateOp("SWAP", (0, 1)),), (0, 1), (1, 0), small_angle=False)
    moved = remap_noise_past_block(ev, swap)
    assert moved.support == (1,)
    assert np.abs(moved.gamma.entries - ev.gamma.entries).max() == 0


def test_remap_matches_full_swap_transform(rng):
    swap = DecompositionBlock((GateOp("SWAP", (0, 1)),), (0, 1), (1, 0), small_angle=False)
    for _ in range(10):
        g = RateMatrix(pauli_basis(2), random_psd(rng, 15, rank=2))
        ev = NoiseEvent(g, (0, 1))
        short = remap_noise_past_block(ev, swap)
        full = commute_noise_past_unitary(ev, SWAP)
        a = embed_rate_entries(short.gamma.entries, short.support, (0, 1))
        assert np.abs(a - full.gamma.entries).max() < 1e-13


def test_remap_three_qubit_cycle():
    blk = DecompositionBlock((GateOp("SWAP", (0, 1)), GateOp("SWAP", (1, 2))), (0, 1, 2), (2, 0, 1), small_angle=False)
    ev = standard_noise("dephasing", (0,), 0.1)
    assert remap_noise_past_block(ev, blk).support == (2,)
    ev2 = standard_noise("damping", (1, 2), (0.1, 0.2))
    moved = remap_noise_past_block(ev2, blk)
    full = commute_noise_past_gate(ev2, blk.permutation_unitary(), (0, 1, 2))
    a = embed_rate_entries(moved.gamma.entries, moved.support, (0, 1, 2))
    b = embed_rate_entries(full.gamma.entries, full.support, (0, 1, 2))
    assert np.abs(a - b).max() < 1e-15


def test_omega_is_gell_mann_seven():
    om = omega_matrix(-0.5 * X, pauli_basis(1))
    lam7 = np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]])
    assert np.abs(om - lam7).max() < 1e-15


def test_small_angle_correction_zero_when_commuting():
    g = RateMatrix(pauli_basis(1), np.diag([0.3, 0, 0]))
    delta = small_angle_commutation_correction(g, -0.5 * X, 0.1)
    assert np.abs(delta).max() < 1e-16


def test_small_angle_correction_second_order_residual(rng):
    b = pauli_basis(1)
    h = -0.5 * X
    g = RateMatrix(b, random_psd(rng, 3))
    res = []
    phis = [0.1, 0.05, 0.025]
    for phi in phis:
        exact = commutation_matrix(scipy.linalg.expm(-1j * phi * h), b).apply(g).entries
        approx = g.entries + small_angle_commutation_correction(g, h, phi)
        res.append(np.abs(exact - approx).max())
    slope = np.polyfit(np.log(phis), np.log(res), 1)[0]
    assert abs(slope - 2) < 0.1
    delta = small_angle_commutation_correction(g, h, 0.1)
    assert np.abs(delta - delta.conj().T).max() < 1e-15
    with pytest.raises(ValueError):
        small_angle_commutation_correction(g, np.array([[0, 1], [0, 0]]), 0.1)
