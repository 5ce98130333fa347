"""
Moving noise through large-angle gates
======================================

Noise that sits between the gates of a decomposition block is pushed to
the end of the block with the commutation matrix
``M_mn = (1/D) Tr[A_m^dag U A_n U^dag]``. This changes which Pauli
operators it acts along, but never its decay spectrum.
"""

import numpy as np

from namforge.algebra import RateMatrix, dissipator, pauli_basis, superop_exp, unitary_channel
from namforge.circuit import standard_noise
from namforge.circuit.gates import CNOT, HADAMARD
from namforge.circuit.library import cancellation_circuit, implicit_swap_circuit, swap_network_circuit
from namforge.commutation import commutation_matrix, embed_rate_entries, commute_noise_past_gate, commute_noise_past_unitary
from namforge.nam import build_noisy_algorithm_model

np.set_printoptions(precision=3, suppress=True)

# Hadamard swaps X and Z and flips Y
print(commutation_matrix(HADAMARD, pauli_basis(1)).entries.real)

# dephasing along z becomes dephasing along x
deph = standard_noise("dephasing", (0,), 0.2)
print(commute_noise_past_unitary(deph, HADAMARD).gamma.entries.real)

# %%
# Damping on the CNOT target spreads over both qubits, yet the channels agree.
damp = standard_noise("damping", (1,), 0.1)
moved = commute_noise_past_gate(damp, CNOT, (0, 1))
nonzero = [(a, b) for i, a in enumerate(moved.gamma.basis.labels)
           for j, b in enumerate(moved.gamma.basis.labels) if abs(moved.gamma.entries[i, j]) > 1e-12]
print("entries after the CNOT:", nonzero)
local = RateMatrix(pauli_basis(2), embed_rate_entries(damp.gamma.entries, (1,), (0, 1)))
lhs = unitary_channel(CNOT) @ superop_exp(dissipator(local), 1.0)
rhs = superop_exp(dissipator(moved.gamma), 1.0) @ unitary_channel(CNOT)
print("channel mismatch:", np.abs(lhs - rhs).max())
print("largest eigenvalue before and after:", damp.gamma.eigenvalues().max(), moved.gamma.eigenvalues().max())

# %%
# SWAP structure only relabels qubits. Both routes give the same model.
c = swap_network_circuit()
a = build_noisy_algorithm_model(c, swap_remap="permutation")
b = build_noisy_algorithm_model(c, swap_remap="unitary")
print("relabel vs full transform:", np.abs(a.dissipator_gamma.entries - b.dissipator_gamma.entries).max())

m = build_noisy_algorithm_model(implicit_swap_circuit())
print("implicit-swap support per event:", [ct.support for ct in m.contributions])

# %%
# Cancelled Hadamard pairs come back as noise-free fictitious gates so that
# both blocks keep their full decomposition.
fict = build_noisy_algorithm_model(cancellation_circuit(fictitious=True))
plain = build_noisy_algorithm_model(cancellation_circuit(fictitious=False))
print("fictitious vs plain:", np.abs(fict.dissipator_gamma.entries - plain.dissipator_gamma.entries).max())
