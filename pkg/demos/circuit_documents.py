"""
Writing, checking and compiling a circuit document
==================================================

Circuits travel as JSON. This walks through a two-qubit ZZ block built
from CNOTs, what the validator reports when the block is broken, and the
model document that ``namforge analyze`` writes.
"""

import json

from namforge.circuit import parse_circuit, serialize_circuit, validate_circuit
from namforge.circuit.library import cnot_zz_circuit
from namforge.nam import build_noisy_algorithm_model, serialize_model

circuit = cnot_zz_circuit(J=0.05, gamma=1e-3)
text = serialize_circuit(circuit)
print(text[:400], "...")

# %%
# A round trip through the text form gives the same circuit.
again = parse_circuit(text)
print("round trip equal:", serialize_circuit(again) == text)

# %%
# Break the block: add an RX(pi) to its op list. The declared generator no
# longer matches and the unitary check names the block.
doc = json.loads(text)
doc["elements"][0]["ops"].append({"kind": "gate", "name": "RX", "qubits": [0], "angle": 3.141592653589793})
broken = parse_circuit(json.dumps(doc), validate=False)
for r in validate_circuit(broken).failures:
    print(r.check, r.element, r.detail)

# %%
# The compiled model, as written by ``namforge analyze``.
print(serialize_model(build_noisy_algorithm_model(circuit))[:600], "...")
