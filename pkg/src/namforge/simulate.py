"""Exact noisy-circuit evolution, effective-model evolution and trajectory comparison."""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import (
    CPTP_TOL,
    RateMatrix,
    all_up,
    basis_state,
    check_density_matrix,
    choi_cptp_check,
    dissipator,
    embed_operator,
    pauli_basis,
    pauli_string_matrix,
    superop_exp,
    unitary_channel,
    vectorize,
    unvectorize,
)
from .circuit.model import Circuit, GateOp, NoiseEvent
from .commutation import embed_rate_entries
from .nam import NoisyAlgorithmModel

DRIFT_TOL = 1e-8
MAX_STEPS = 10_000
STEADY_FRACTION = 0.1


class SimulationError(RuntimeError):
    pass


@dataclass
class Trajectory:
    """States after each step, starting with the initial state at time 0."""

    tau: float
    states: list[np.ndarray] = field(repr=False)
    label: str = ""

    def __post_init__(self):
        if not self.states:
            raise ValueError("a trajectory holds at least the initial state")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def steps(self) -> np.ndarray:
        return np.arange(len(self.states))

    @property
    def times(self) -> np.ndarray:
        return self.steps * self.tau

    def values(self, observable: str) -> np.ndarray:
        k = int(round(math.log2(self.states[0].shape[0])))
        p = pauli_string_matrix(parse_observable(observable, k))
        return np.array([_real_trace(rho, p) for rho in self.states])


_SITE_TERM = re.compile(r"([XYZ])(\d+)")


def parse_observable(label: str, k: int) -> str:
    """Accept a full Pauli string (``"XIII"``) or site notation (``"X0"``, ``"Z1Z2"``)."""
    label = label.strip().upper()
    if len(label) == k and set(label) <= set("IXYZ"):
        return label
    terms = _SITE_TERM.findall(label)
    if not terms or "".join(p + s for p, s in terms) != label:
        raise ValueError(f"cannot parse observable {label!r} on {k} qubits")
    chars = ["I"] * k
    for p, s in terms:
        site = int(s)
        if site >= k or chars[site] != "I":
            raise ValueError(f"observable {label!r}: bad or repeated site {site}")
        chars[site] = p
    return "".join(chars)


def initial_state(spec: str, k: int) -> np.ndarray:
    """``"all-up"`` or a computational-basis bit string such as ``"0101"``."""
    if spec in ("all-up", "all_up", "up"):
        return all_up(k)
    if len(spec) != k or set(spec) - set("01"):
        raise ValueError(f"initial state {spec!r} is neither 'all-up' nor a {k}-bit string")
    return basis_state(spec)


def _real_trace(rho: np.ndarray, p: np.ndarray) -> float:
    val = np.trace(rho @ p)
    if abs(val.imag) > 1e-10:
        raise SimulationError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)


def expectation(rho: np.ndarray, observable: str) -> float:
    """``Tr[rho P]`` for a Pauli string or site-notation observable."""
    rho = np.asarray(rho, dtype=complex)
    k = int(round(math.log2(rho.shape[0])))
    if 2**k != rho.shape[0] or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix shape {rho.shape} is not 2^k square")
    return _real_trace(rho, pauli_string_matrix(parse_observable(observable, k)))


# -- channels ------------------------------------------------------------------

def noise_channel(ev: NoiseEvent, k: int, tau: float) -> np.ndarray:
    """Register-level ``exp(r tau D[Gamma])`` for one noise event."""
    entries = embed_rate_entries(ev.gamma.entries, ev.support, range(k))
    gen = dissipator(RateMatrix(pauli_basis(k), entries))
    return superop_exp(gen, ev.gate_time_ratio * tau)


def gate_channel(g: GateOp, k: int) -> np.ndarray:
    return unitary_channel(embed_operator(g.unitary(), g.qubits, k))


def circuit_step_superop(circuit: Circuit) -> np.ndarray:
    """Product of every gate and noise channel of one step, in circuit order."""
    k = circuit.qubit_count
    cache: dict[int, np.ndarray] = {}
    step = np.eye(4**k, dtype=complex)
    for _, op in circuit.flat_ops():
        key = id(op)
        if key not in cache:
            cache[key] = noise_channel(op, k, circuit.tau) if isinstance(op, NoiseEvent) else gate_channel(op, k)
        step = cache[key] @ step
    return step


def _check_drift(rho: np.ndarray, n: int) -> None:
    try:
        check_density_matrix(rho, DRIFT_TOL)
    except ValueError as exc:
        raise SimulationError(f"state left the density-matrix set at step {n}: {exc}") from exc


def _iterate(channel: np.ndarray, rho0: np.ndarray, n_steps: int, tau: float, label: str) -> Trajectory:
    if not 0 <= n_steps <= MAX_STEPS:
        raise ValueError(f"n_steps must be in [0, {MAX_STEPS}], got {n_steps}")
    rho0 = np.asarray(rho0, dtype=complex)
    if channel.shape[0] != rho0.size:
        raise ValueError(f"state of dimension {rho0.shape[0]} does not match the channel")
    check_density_matrix(rho0)
    states = [rho0]
    v = vectorize(rho0)
    for n in range(1, n_steps + 1):
        v = channel @ v
        rho = unvectorize(v)
        _check_drift(rho, n)
        states.append(rho)
    return Trajectory(tau, states, label)


def evolve_exact_circuit(circuit: Circuit, rho0: np.ndarray, n_steps: int) -> Trajectory:
    """Apply the circuit's gates and noise exactly as listed, ``n_steps`` times."""
    return _iterate(circuit_step_superop(circuit), rho0, n_steps, circuit.tau, "exact")


def effective_step_superop(model: NoisyAlgorithmModel, include_trotter_correction: bool = False) -> np.ndarray:
    channel = superop_exp(model.liouvillian(include_trotter_correction), model.tau)
    report = choi_cptp_check(channel, CPTP_TOL)
    if not report.is_cptp:
        raise SimulationError(
            f"effective step channel is not CPTP (min Choi eigenvalue {report.min_choi_eigenvalue:.3e}, "
            f"trace deviation {report.trace_deviation:.3e})"
        )
    return channel


def evolve_effective(
    model: NoisyAlgorithmModel, rho0: np.ndarray, n_steps: int, include_trotter_correction: bool = False
) -> Trajectory:
    """Repeated ``exp(tau L_eff)``."""
    return _iterate(effective_step_superop(model, include_trotter_correction), rho0, n_steps, model.tau, model.label)


# -- comparison and export -----------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    max_abs_dev: float
    rms_dev: float
    steady_state_dev: float

    def to_dict(self) -> dict[str, float]:
        return {"max_abs_dev": self.max_abs_dev, "rms_dev": self.rms_dev, "steady_state_dev": self.steady_state_dev}


def steady_window(n: int) -> int:
    return max(1, math.ceil(STEADY_FRACTION * n))


def compare_trajectories(a: Trajectory, b: Trajectory, observable: str) -> Metrics:
    if len(a) != len(b):
        raise ValueError(f"trajectory lengths differ: {len(a)} vs {len(b)}")
    if not math.isclose(a.tau, b.tau, rel_tol=1e-12):
        raise ValueError(f"trajectory step sizes differ: {a.tau} vs {b.tau}")
    va, vb = a.values(observable), b.values(observable)
    diff = va - vb
    w = steady_window(len(diff))
    return Metrics(
        float(np.abs(diff).max()),
        float(np.sqrt(np.mean(diff**2))),
        float(abs(va[-w:].mean() - vb[-w:].mean())),
    )


def fmt(x: float) -> str:
    return f"{x:.12g}"


def trajectory_csv(traj: Trajectory, observables: Sequence[str]) -> str:
    """CSV with columns ``step, time`` and one column per observable."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "time", *observables])
    cols = [traj.values(o) for o in observables]
    for n, t in zip(traj.steps, traj.times):
        w.writerow([int(n), fmt(t), *(fmt(c[n]) for c in cols)])
    return buf.getvalue()


def metrics_table(rows: Mapping[str, Mapping[str, Metrics]]) -> dict:
    """``{model: {observable: metrics}}`` as plain data."""
    return {name: {obs: m.to_dict() for obs, m in per.items()} for name, per in rows.items()}


def observable_panel(k: int) -> list[str]:
    """Single-site X and Z on every site plus nearest-neighbour ZZ."""
    out = [parse_observable(f"{p}{j}", k) for p in "XZ" for j in range(k)]
    out += [parse_observable(f"Z{j}Z{j + 1}", k) for j in range(k - 1)]
    return out


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


__all__ = [
    "Metrics",
    "SimulationError",
    "Trajectory",
    "circuit_step_superop",
    "compare_trajectories",
    "effective_step_superop",
    "evolve_effective",
    "evolve_exact_circuit",
    "expectation",
    "initial_state",
    "metrics_table",
    "noise_channel",
    "observable_panel",
    "parse_observable",
    "purity",
    "trajectory_csv",
]
