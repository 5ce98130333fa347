"""Rewrite the packaged JSON fixtures from the circuit generators."""

import json
from pathlib import Path

from namforge.circuit import (
    build_tfim_trotter_circuit,
    cancellation_circuit,
    circuit_to_dict,
    cnot_zz_circuit,
    implicit_swap_circuit,
    minimal_circuit,
    swap_network_circuit,
)
from namforge.circuit.noise import standard_noise
from namforge.circuit.io import _noise_to_dict

OUT = Path(__file__).resolve().parents[1] / "src" / "namforge" / "fixtures"

DESCRIPTIONS = {
    "tfim_chain": "4-site TFIM Trotter step: Hadamard-wrapped XX blocks, RX layer, damping after Hadamards and on idle qubits",
    "zz_cnot": "ZZ interaction as CNOT . RZ . CNOT with dephasing after the first CNOT",
    "implicit_swap": "CNOT01 RZ1 CNOT10 CNOT01 = ZZ then SWAP, applied twice so labels return home",
    "minimal": "single RX(0.2) with generator X at tau = 0.1",
    "cancellation": "two ZZ-via-XX blocks sharing a cancelled Hadamard pair restored as fictitious gates",
    "cancellation_plain": "same as cancellation with the restored Hadamards as ordinary noise-free gates",
    "swap_network": "three qubits, (0, 2) interaction routed through explicit SWAP blocks",
    "zz_cnot_corrupted": "ZZ block with a stray RX(pi) so the product differs from the declaration by a sigma-x",
    "fictitious_noise_invalid": "cancellation circuit with noise attached to a fictitious Hadamard",
}


def main():
    docs = {
        "tfim_chain": circuit_to_dict(build_tfim_trotter_circuit(4, 0.1, 0.1, 1e-3)),
        "zz_cnot": circuit_to_dict(cnot_zz_circuit()),
        "implicit_swap": circuit_to_dict(implicit_swap_circuit()),
        "minimal": circuit_to_dict(minimal_circuit()),
        "cancellation": circuit_to_dict(cancellation_circuit()),
        "cancellation_plain": circuit_to_dict(cancellation_circuit(fictitious=False)),
        "swap_network": circuit_to_dict(swap_network_circuit()),
    }
    bad = circuit_to_dict(cnot_zz_circuit())
    bad["elements"][0]["ops"].append({"kind": "gate", "name": "RX", "qubits": [0], "angle": 3.141592653589793})
    docs["zz_cnot_corrupted"] = bad
    bad = circuit_to_dict(cancellation_circuit())
    ops = bad["elements"][1]["ops"]
    ops.insert(1, _noise_to_dict(standard_noise("damping", (1,), 1e-3)))
    docs["fictitious_noise_invalid"] = bad
    OUT.mkdir(parents=True, exist_ok=True)
    for name, doc in docs.items():
        doc = {"description": DESCRIPTIONS[name], **doc}
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        print("wrote", name)


if __name__ == "__main__":
    main()
