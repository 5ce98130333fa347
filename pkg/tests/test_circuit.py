import json
from importlib import resources

import numpy as np
import pytest
import scipy.linalg

from namforge.algebra import PAULI_MATRICES, RateMatrix, apply_superop, dissipator, pauli_basis, superop_exp
from namforge.circuit import (
    Circuit,
    CircuitError,
    CircuitParseError,
    CircuitValidationError,
    DecompositionBlock,
    GateOp,
    build_second_order_circuit,
    build_tfim_trotter_circuit,
    cancellation_circuit,
    circuit_to_dict,
    cnot_zz_circuit,
    global_depolarizing_lambda,
    implicit_swap_circuit,
    minimal_circuit,
    parse_circuit,
    serialize_circuit,
    standard_noise,
    swap_network_circuit,
    validate_circuit,
)
from namforge.circuit.gates import CNOT, gate_matrix, permutation_unitary, zz

X, Z = PAULI_MATRICES["X"], PAULI_MATRICES["Z"]


def fixture_text(name):
    return (resources.files("namforge") / "fixtures" / f"{name}.json").read_text()


def test_named_gates_unitary_and_zz_convention():
    for name, angle in [("RX", 0.3), ("RZ", -1.1), ("ZZ", 0.2), ("XX", 0.7), ("H", None), ("CNOT", None), ("SWAP", None)]:
        u = gate_matrix(name, angle)
        assert np.abs(u.conj().T @ u - np.eye(len(u))).max() < 1e-12
    phi = 0.37
    assert np.abs(zz(phi) - scipy.linalg.expm(-1j * phi / 2 * np.kron(Z, Z))).max() < 1e-14
    rz = gate_matrix("RZ", phi)
    assert np.abs(CNOT @ np.kron(np.eye(2), rz) @ CNOT - zz(phi)).max() < 1e-14


def test_permutation_unitary_moves_states():
    p = permutation_unitary((1, 2, 0))
    # |q0 q1 q2> = |1 0 0> ends as q0's bit on position 1: |0 1 0>
    e = np.zeros(8)
    e[0b100] = 1
    assert np.argmax(np.abs(p @ e)) == 0b010


def test_gate_op_errors():
    with pytest.raises(CircuitError):
        GateOp("RX", (0,))
    with pytest.raises(CircuitError):
        GateOp("CNOT", (0,))
    with pytest.raises(CircuitError):
        GateOp("FOO", (0,))
    with pytest.raises(CircuitError):
        GateOp("CUSTOM", (0,), matrix=np.array([[1, 1], [0, 1]]))


def test_standard_noise_rate_matrices_and_traces():
    g = 0.3
    deph = standard_noise("dephasing", (0,), g).gamma.entries
    assert np.abs(deph - np.diag([0, 0, g / 2])).max() < 1e-15
    damp = standard_noise("damping", (0,), g).gamma.entries
    assert np.abs(damp - g / 4 * np.array([[1, -1j, 0], [1j, 1, 0], [0, 0, 0]])).max() < 1e-15
    traces = {"damping": g / 2, "dephasing": g / 2, "depolarizing": 3 * g / 4}
    for kind, tr in traces.items():
        ev = standard_noise(kind, (0, 1), g)
        assert abs(ev.gamma.trace - 2 * tr) < 1e-15
        assert ev.gamma.eigenvalues().min() > -1e-15
    for k in (1, 2):
        ev = standard_noise("global_depolarizing", tuple(range(k)), g)
        assert abs(ev.gamma.trace - (4**k - 1) * g / 4**k) < 1e-15
    with pytest.raises(CircuitError):
        standard_noise("dephasing", (0,), -0.1)


def test_damping_reproduces_sigma_plus_form():
    from conftest import random_density

    rho = random_density(np.random.default_rng(3), 2)
    g = 0.8
    ev = standard_noise("damping", (0,), g)
    sp = np.array([[0, 1], [0, 0]], dtype=complex)
    sm = sp.T
    ref = g * (sp @ rho @ sm - 0.5 * (sm @ sp @ rho + rho @ sm @ sp))
    assert np.abs(apply_superop(dissipator(ev.gamma), rho) - ref).max() < 1e-15
    # relaxes to |0><0|
    out = apply_superop(superop_exp(dissipator(ev.gamma), 50.0), rho)
    assert abs(out[0, 0] - 1) < 1e-12


def test_global_depolarizing_discrete_equivalence():
    from conftest import random_density

    gamma_dc, tau = 0.9, 0.3
    ev = standard_noise("global_depolarizing", (0, 1), gamma_dc)
    rho = random_density(np.random.default_rng(5), 4)
    lam = global_depolarizing_lambda(gamma_dc, tau)
    out = apply_superop(superop_exp(dissipator(ev.gamma), tau), rho)
    assert np.abs(out - ((1 - lam) * rho + lam / 4 * np.eye(4))).max() < 1e-10


def test_parse_minimal_document():
    doc = {
        "qubits": 1,
        "trotter_step": 0.1,
        "elements": [{"kind": "block", "generator": {"X": 1.0},
                      "ops": [{"kind": "gate", "name": "RX", "qubits": [0], "angle": 0.2}]}],
    }
    c = parse_circuit(json.dumps(doc))
    assert c.qubit_count == 1 and len(c.blocks) == 1 and c.blocks[0].small_angle
    assert c.noise_events() == []


def test_parse_errors_locate_problem():
    with pytest.raises(CircuitParseError) as e:
        parse_circuit('{"qubits": 1,\n  "trotter_step": }')
    assert e.value.line == 2
    with pytest.raises(CircuitParseError) as e:
        parse_circuit(json.dumps({"qubits": 1, "trotter_step": 0.1, "elements": [], "bogus": 1}))
    assert "bogus" in str(e.value)
    bad = {"qubits": 1, "trotter_step": 0.1, "elements": [
        {"kind": "block", "ops": [{"kind": "gate", "name": "RX", "qubits": [0], "angel": 0.2}]}]}
    with pytest.raises(CircuitParseError) as e:
        parse_circuit(json.dumps(bad))
    assert "elements" in e.value.field
    noise_no_strength = {"qubits": 1, "trotter_step": 0.1, "elements": [
        {"kind": "noise", "model": "damping", "qubits": [0]}]}
    with pytest.raises(CircuitParseError):
        parse_circuit(json.dumps(noise_no_strength))


def test_fixture_chain_shape():
    c = parse_circuit(fixture_text("tfim_chain"))
    assert c.qubit_count == 4
    zz_blocks = [b for b in c.blocks if "ZZ" in "".join(b.generator)]
    assert len(zz_blocks) == 3
    rx_blocks = [b for b in c.blocks if b.generator.keys() == {"X"}]
    assert len(rx_blocks) == 4
    assert all(not b.noise for b in rx_blocks)
    # 4 hadamards per ZZ block, one damping event each, plus 2 idle events per idle qubit
    assert sum(len(b.noise) for b in zz_blocks) == 12
    assert len(c.free_noise) == 4


def test_fixture_with_fictitious_noise_is_rejected():
    with pytest.raises(CircuitValidationError) as e:
        parse_circuit(fixture_text("fictitious_noise_invalid"))
    assert any(r.check == "fictitious" for r in e.value.diagnostics.failures)


def test_validate_reference_blocks_pass():
    assert validate_circuit(cnot_zz_circuit()).ok
    assert validate_circuit(implicit_swap_circuit()).ok
    phi = 0.2
    swap_blk = implicit_swap_circuit(phi).blocks[0]
    assert swap_blk.permutation == (1, 0) and swap_blk.generator == {"ZZ": phi / 2}


def test_validate_detects_sigma_x_corruption():
    c = parse_circuit(fixture_text("zz_cnot_corrupted"), validate=False)
    diag = validate_circuit(c)
    bad = [r for r in diag.failures if r.check == "unitary"]
    assert len(bad) == 1 and bad[0].element == 0
    assert bad[0].deviation > 0.5


def test_validate_permutation_mismatch():
    blk = DecompositionBlock((GateOp("SWAP", (0, 1)),), (0, 1), (0, 1), small_angle=False)
    diag = validate_circuit(Circuit(2, 1.0, (blk,)))
    checks = {r.check for r in diag.failures}
    assert "permutation" in checks and "unitary" in checks


def test_validate_locality():
    ev = standard_noise("depolarizing", (0, 1, 2), 0.1)
    diag = validate_circuit(Circuit(3, 1.0, (ev,)))
    assert [r.check for r in diag.failures] == ["locality"]


def test_fictitious_isolated_and_non_cancelling():
    lone = DecompositionBlock((GateOp("H", (0,), fictitious=True), GateOp("RX", (0,), 0.1)), (0,), generator={})
    diag = validate_circuit(Circuit(1, 1.0, (lone,)))
    assert any("adjacent" in r.detail for r in diag.failures)
    pair = DecompositionBlock((GateOp("H", (0,), fictitious=True), GateOp("RX", (0,), 0.3, fictitious=True)), (0,))
    diag = validate_circuit(Circuit(1, 1.0, (pair,)))
    assert any("cancel" in r.detail for r in diag.failures)


def test_block_rejects_stray_qubits_and_bad_generator():
    with pytest.raises(CircuitError):
        DecompositionBlock((GateOp("H", (2,)),), (0, 1))
    with pytest.raises(CircuitError):
        DecompositionBlock((GateOp("H", (0,)),), (0,), generator={"ZZ": 1.0})
    with pytest.raises(CircuitError):
        DecompositionBlock((GateOp("SWAP", (0, 1)),), (0, 1), (1, 0), small_angle=False, generator={"ZZ": 1.0})


def test_circuit_bounds():
    with pytest.raises(CircuitError):
        Circuit(1, 1.0, (standard_noise("damping", (1,), 0.1),))
    with pytest.raises(CircuitError):
        Circuit(1, 0.0, ())


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_tfim_builder_validates(k):
    c = build_tfim_trotter_circuit(k, 0.1, 0.1, 1e-3)
    assert validate_circuit(c).ok
    assert len(c.blocks) == (k - 1) + k


def test_tfim_noise_free_and_tau_scaling():
    c0 = build_tfim_trotter_circuit(3, 0.1, 0.1, 0.0)
    assert c0.noise_events() == []
    c = build_tfim_trotter_circuit(2, 0.1, 0.1, 1e-3, tau=0.25)
    ev = c.noise_events()[0]
    # rate times step duration stays mu_H
    assert abs(ev.gamma.trace * c.tau - 1e-3 / 2) < 1e-15
    assert c.blocks[0].generator == {"ZZ": 0.4}


def test_roundtrip_serialization_of_generated_circuits():
    circuits = [
        build_tfim_trotter_circuit(4, 0.1, 0.1, 1e-3),
        build_tfim_trotter_circuit(3, 0.05, 0.2, 0.0),
        cnot_zz_circuit(), implicit_swap_circuit(), swap_network_circuit(),
        cancellation_circuit(), minimal_circuit(),
        build_second_order_circuit(build_tfim_trotter_circuit(2, 0.1, 0.1, 1e-3)),
    ]
    for c in circuits:
        again = parse_circuit(serialize_circuit(c))
        assert again == c
        assert circuit_to_dict(again) == circuit_to_dict(c)


def test_custom_rate_matrix_roundtrip():
    gamma = np.array([[0.1, 0.02j, 0], [-0.02j, 0.05, 0], [0, 0, 0.01]])
    c = build_tfim_trotter_circuit(2, 0.1, 0.1, 0.0, hadamard_rate_matrix=gamma)
    assert len(c.noise_events()) == 4
    again = parse_circuit(serialize_circuit(c))
    assert np.abs(again.noise_events()[0].gamma.entries - gamma).max() < 1e-15


def test_second_order_structure():
    a = DecompositionBlock((GateOp("RX", (0,), 0.2),), (0,), generator={"X": 0.5})
    b = DecompositionBlock((GateOp("RZ", (0,), 0.4),), (0,), generator={"Z": 1.0})
    c2 = build_second_order_circuit(Circuit(1, 0.2, (a, b)))
    names = [(blk.ops[0].name, blk.ops[0].angle) for blk in c2.blocks]
    assert names == [("RX", 0.1), ("RZ", 0.2), ("RZ", 0.2), ("RX", 0.1)]
    assert validate_circuit(c2).ok
    single = build_second_order_circuit(Circuit(1, 0.2, (a,)))
    u = np.eye(2)
    for blk in single.blocks:
        u = blk.gate_unitary() @ u
    assert np.abs(u - a.gate_unitary()).max() < 1e-14


def test_second_order_keeps_noise_in_both_halves():
    base = build_tfim_trotter_circuit(2, 0.1, 0.1, 1e-3)
    c2 = build_second_order_circuit(base)
    assert len(c2.noise_events()) == 2 * len(base.noise_events())
    assert validate_circuit(c2).ok
