"""
How the model error scales with the Trotter angle
=================================================

At fixed ratio ``mu / phi`` the first-order model error falls linearly in
``phi``. The symmetric second-order step removes the leading coherent
error, leaving ``phi^2``; noise then contributes ``mu`` on top, so the
model stays good as long as ``mu`` is small against ``phi^2``.
"""

import numpy as np

from namforge.circuit.library import build_second_order_circuit, build_tfim_trotter_circuit
from namforge.cli import loglog_slope, scaling_table
from namforge.nam import build_noisy_algorithm_model
from namforge.simulate import compare_trajectories, evolve_effective, evolve_exact_circuit, initial_state

phis = [0.2, 0.1, 0.05, 0.025]
rows = scaling_table(2, phis, mu_ratio=5e-3, total_time=20.0)
for r in rows:
    print(f"phi={r['phi']:.3f}  first={r['first_order']:.3e}  second={r['second_order']:.3e}")
print("slope, first order :", loglog_slope(phis, [r["first_order"] for r in rows]))
print("slope, second order:", loglog_slope(phis, [r["second_order"] for r in rows]))

# %%
# Second order with mu = phi^3: split the model error into its coherent
# part (same run at mu = 0) and the rest.
def run(c, n):
    rho0 = initial_state("all-up", 2)
    return (evolve_exact_circuit(c, rho0, n).values("X0"),
            evolve_effective(build_noisy_algorithm_model(c), rho0, n).values("X0"))

for phi in phis:
    tau = phi / 2
    n = int(round(20 / tau))
    ex0, nm0 = run(build_second_order_circuit(build_tfim_trotter_circuit(2, phi / 2, phi / 2, 0.0, tau=tau)), n)
    ex3, nm3 = run(build_second_order_circuit(build_tfim_trotter_circuit(2, phi / 2, phi / 2, phi**3, tau=tau)), n)
    coherent = np.abs(ex0 - nm0).max()
    noisy = np.abs((ex3 - ex0) - (nm3 - nm0)).max()
    print(f"phi={phi:.3f}  coherent {coherent:.2e}  noise-induced {noisy:.2e}  ratio {noisy / coherent:.3f}")
