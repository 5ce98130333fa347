"""Circuit intermediate representation and its validator."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence, Union

import numpy as np
import scipy.linalg

from ..algebra import (
    DimensionError,
    RateMatrix,
    check_qubit_count,
    embed_operator,
    is_unitary,
    pauli_string_matrix,
)
from . import gates

UNITARY_TOL = 1e-9
MAX_NOISE_SUPPORT = 2


class CircuitError(ValueError):
    """Structural problem with a circuit or one of its elements."""


class CircuitValidationError(CircuitError):
    def __init__(self, diagnostics: "Diagnostics"):
        self.diagnostics = diagnostics
        lines = [f"{r.check} (element {r.element}): {r.detail}" for r in diagnostics.failures]
        super().__init__("circuit failed validation: " + "; ".join(lines))


@dataclass(frozen=True, eq=False)
class GateOp:
    name: str
    qubits: tuple[int, ...]
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)
    fictitious: bool = False

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.name not in gates.GATE_NAMES:
            raise CircuitError(f"unknown gate {self.name!r}")
        if len(set(self.qubits)) != len(self.qubits) or not self.qubits:
            raise CircuitError(f"gate {self.name} has invalid qubits {self.qubits}")
        if self.name == "CUSTOM":
            if self.matrix is None:
                raise CircuitError("CUSTOM gates need an explicit matrix")
            m = np.array(self.matrix, dtype=complex)
            if m.shape != (2 ** len(self.qubits),) * 2:
                raise CircuitError(f"CUSTOM matrix shape {m.shape} does not fit {len(self.qubits)} qubits")
            if not is_unitary(m, 1e-12):
                raise CircuitError("CUSTOM matrix is not unitary")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        else:
            if self.matrix is not None:
                raise CircuitError(f"only CUSTOM gates carry a matrix, not {self.name}")
            if len(self.qubits) != gates.ARITY[self.name]:
                raise CircuitError(f"gate {self.name} acts on {gates.ARITY[self.name]} qubit(s)")
            if (self.name in gates.PARAMETRIZED) != (self.angle is not None):
                raise CircuitError(f"gate {self.name}: angle given/missing inconsistently")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    def unitary(self) -> np.ndarray:
        """Gate matrix on ``self.qubits`` in the listed order."""
        if self.name == "CUSTOM":
            return self.matrix
        return gates.gate_matrix(self.name, self.angle)

    def __eq__(self, other):
        if not isinstance(other, GateOp):
            return NotImplemented
        same_matrix = (self.matrix is None and other.matrix is None) or (
            self.matrix is not None and other.matrix is not None and np.array_equal(self.matrix, other.matrix)
        )
        return (
            self.name == other.name
            and self.qubits == other.qubits
            and self.angle == other.angle
            and self.fictitious == other.fictitious
            and same_matrix
        )


@dataclass(frozen=True, eq=False)
class NoiseEvent:
    """A discrete Lindblad noise event ``exp(t_g L)`` on ``support``.

    ``gamma`` holds the rates over the Pauli basis of ``len(support)`` qubits,
    tensor factors in ``support`` order. The event lasts
    ``gate_time_ratio * tau``; only the products of rates and durations are
    physically meaningful. ``model`` and ``strength`` record how the event was
    built so that it serializes back to the same document.
    """

    gamma: RateMatrix
    support: tuple[int, ...]
    gate_time_ratio: float = 1.0
    model: str = "custom"
    strength: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(q) for q in self.support))
        if len(set(self.support)) != len(self.support) or not self.support:
            raise CircuitError(f"noise event has invalid support {self.support}")
        if self.gamma.basis.qubit_count != len(self.support):
            raise DimensionError(
                f"rate matrix acts on {self.gamma.basis.qubit_count} qubits but support is {self.support}"
            )
        if self.gate_time_ratio < 0:
            raise CircuitError("gate_time_ratio must be non-negative")
        object.__setattr__(self, "gate_time_ratio", float(self.gate_time_ratio))
        if self.strength is not None:
            object.__setattr__(self, "strength", tuple(float(s) for s in self.strength))

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.support

    def on(self, support: Sequence[int]) -> "NoiseEvent":
        """Same rates acting on relabeled qubits."""
        return replace(self, support=tuple(support))

    def with_gamma(self, gamma: RateMatrix, support: Sequence[int] | None = None) -> "NoiseEvent":
        """Transformed copy; the result no longer matches a named model."""
        return NoiseEvent(gamma, tuple(self.support if support is None else support), self.gate_time_ratio)

    def __eq__(self, other):
        if not isinstance(other, NoiseEvent):
            return NotImplemented
        return (
            self.support == other.support
            and self.gate_time_ratio == other.gate_time_ratio
            and self.model == other.model
            and self.strength == other.strength
            and np.array_equal(self.gamma.entries, other.gamma.entries)
        )


Op = Union[GateOp, NoiseEvent]


@dataclass(frozen=True)
class DecompositionBlock:
    """Gate sequence equal, without noise, to ``P exp(-i h tau)``.

    ``generator`` maps Pauli strings over ``support`` (in support order) to
    real coefficients of ``h``. ``permutation[j]`` is the local position the
    state of ``support[j]`` ends up on. A block with ``small_angle=False``
    must be a pure permutation (a SWAP block) and carries no generator.
    """

    ops: tuple[Op, ...]
    support: tuple[int, ...] = ()
    permutation: tuple[int, ...] = ()
    small_angle: bool = True
    generator: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        touched = sorted({q for op in ops for q in op.qubits})
        support = tuple(int(q) for q in self.support) if self.support else tuple(touched)
        if len(set(support)) != len(support):
            raise CircuitError(f"block support {support} repeats a qubit")
        stray = set(touched) - set(support)
        if stray:
            raise CircuitError(f"block ops touch qubits {sorted(stray)} outside support {support}")
        object.__setattr__(self, "support", support)
        perm = tuple(int(p) for p in self.permutation) if self.permutation else tuple(range(len(support)))
        if sorted(perm) != list(range(len(support))):
            raise CircuitError(f"permutation {perm} is not a bijection on {len(support)} support qubits")
        object.__setattr__(self, "permutation", perm)
        gen = {str(k): float(v) for k, v in dict(self.generator).items()}
        for label in gen:
            if len(label) != len(support) or any(c not in "IXYZ" for c in label):
                raise CircuitError(f"generator term {label!r} is not a Pauli string over {len(support)} qubits")
        if not self.small_angle and any(gen.values()):
            raise CircuitError("only small-angle blocks declare a generator")
        object.__setattr__(self, "generator", gen)

    @property
    def gates(self) -> list[GateOp]:
        return [op for op in self.ops if isinstance(op, GateOp)]

    @property
    def noise(self) -> list[NoiseEvent]:
        return [op for op in self.ops if isinstance(op, NoiseEvent)]

    @property
    def is_permuting(self) -> bool:
        return self.permutation != tuple(range(len(self.support)))

    def local(self, qubits: Sequence[int]) -> list[int]:
        return [self.support.index(q) for q in qubits]

    def gate_unitary(self) -> np.ndarray:
        """Noise-free product of the block's gates on its local support."""
        m = len(self.support)
        u = np.eye(2**m, dtype=complex)
        for g in self.gates:
            u = embed_operator(g.unitary(), self.local(g.qubits), m) @ u
        return u

    def generator_matrix(self) -> np.ndarray:
        m = len(self.support)
        h = np.zeros((2**m, 2**m), dtype=complex)
        for label, coeff in self.generator.items():
            h += coeff * pauli_string_matrix(label)
        return h

    def permutation_unitary(self) -> np.ndarray:
        return gates.permutation_unitary(self.permutation)

    def declared_unitary(self, tau: float) -> np.ndarray:
        return self.permutation_unitary() @ scipy.linalg.expm(-1j * tau * self.generator_matrix())

    def global_permutation(self, k: int) -> list[int]:
        """Register-level map ``q -> position`` induced by this block."""
        out = list(range(k))
        for j, q in enumerate(self.support):
            out[q] = self.support[self.permutation[j]]
        return out


Element = Union[DecompositionBlock, NoiseEvent]


@dataclass(frozen=True)
class Circuit:
    """One Trotter step: blocks interleaved with free (e.g. idle) noise."""

    qubit_count: int
    trotter_step: float
    elements: tuple[Element, ...]

    def __post_init__(self):
        check_qubit_count(self.qubit_count)
        if not self.trotter_step > 0:
            raise CircuitError("trotter_step must be positive")
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "trotter_step", float(self.trotter_step))
        for i, el in enumerate(elements):
            if not isinstance(el, (DecompositionBlock, NoiseEvent)):
                raise CircuitError(f"element {i} is neither a block nor a noise event")
            qs = el.support
            if any(not 0 <= q < self.qubit_count for q in qs):
                raise CircuitError(f"element {i} touches qubits {qs} outside [0, {self.qubit_count})")

    @property
    def tau(self) -> float:
        return self.trotter_step

    @property
    def blocks(self) -> list[DecompositionBlock]:
        return [el for el in self.elements if isinstance(el, DecompositionBlock)]

    @property
    def free_noise(self) -> list[NoiseEvent]:
        return [el for el in self.elements if isinstance(el, NoiseEvent)]

    def flat_ops(self) -> Iterator[tuple[int, Op]]:
        """All gates and noise events in execution order, tagged with element index."""
        for i, el in enumerate(self.elements):
            if isinstance(el, DecompositionBlock):
                for op in el.ops:
                    yield i, op
            else:
                yield i, el

    def noise_events(self) -> list[NoiseEvent]:
        return [op for _, op in self.flat_ops() if isinstance(op, NoiseEvent)]


@dataclass(frozen=True)
class CheckResult:
    check: str
    element: int | None
    passed: bool
    detail: str = ""
    deviation: float | None = None


@dataclass(frozen=True)
class Diagnostics:
    results: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def __iter__(self):
        return iter(self.results)

    def raise_for_failures(self) -> None:
        if not self.ok:
            raise CircuitValidationError(self)


def _phase_aligned_deviation(u: np.ndarray, v: np.ndarray) -> float:
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-12 else 1.0
    return float(np.max(np.abs(u - phase * v)))


def _check_unitary(i: int, block: DecompositionBlock, tau: float) -> CheckResult:
    u = block.gate_unitary()
    if block.small_angle:
        target, what = block.declared_unitary(tau), "P exp(-i h tau)"
    else:
        target, what = block.permutation_unitary(), "its permutation"
    dev = _phase_aligned_deviation(u, target)
    ok = dev <= UNITARY_TOL
    detail = f"gate product matches {what}" if ok else f"gate product differs from {what} by {dev:.3e}"
    return CheckResult("unitary", i, ok, detail, dev)


def _check_permutation(i: int, block: DecompositionBlock) -> CheckResult:
    swaps = [g for g in block.gates if g.name == "SWAP"]
    if not swaps:
        return CheckResult("permutation", i, True, "no explicit SWAP gates")
    # position of each local qubit's state after the explicit SWAPs
    where = list(range(len(block.support)))
    for g in swaps:
        a, b = block.local(g.qubits)
        where = [b if w == a else a if w == b else w for w in where]
    ok = tuple(where) == block.permutation
    detail = "declared permutation matches SWAP gates" if ok else (
        f"SWAP gates imply permutation {tuple(where)}, declared {block.permutation}"
    )
    return CheckResult("permutation", i, ok, detail)


def _check_locality(circuit: Circuit) -> list[CheckResult]:
    out = []
    for i, el in enumerate(circuit.elements):
        events = el.noise if isinstance(el, DecompositionBlock) else [el]
        bad = [e.support for e in events if len(e.support) > MAX_NOISE_SUPPORT]
        if bad:
            out.append(CheckResult("locality", i, False, f"noise supports {bad} exceed {MAX_NOISE_SUPPORT} qubits"))
        else:
            out.append(CheckResult("locality", i, True, "noise is local"))
    return out


def _check_fictitious(circuit: Circuit) -> list[CheckResult]:
    ops = list(circuit.flat_ops())
    results = []
    # noise directly following a fictitious gate on shared qubits
    for (i_prev, prev), (i_cur, cur) in zip(ops, ops[1:]):
        if isinstance(prev, GateOp) and prev.fictitious and isinstance(cur, NoiseEvent):
            if set(prev.qubits) & set(cur.support):
                results.append(CheckResult(
                    "fictitious", i_cur, False, f"noise on {cur.support} attached to fictitious {prev.name}{prev.qubits}"
                ))
    # fictitious gates must form noise-free runs whose product is the identity
    timelines: dict[int, list[int]] = {q: [] for q in range(circuit.qubit_count)}
    for pos, (_, op) in enumerate(ops):
        for q in op.qubits:
            timelines[q].append(pos)
    fict = {pos for pos, (_, op) in enumerate(ops) if isinstance(op, GateOp) and op.fictitious}
    parent = {p: p for p in fict}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    isolated = set()
    for p in fict:
        _, gate = ops[p]
        for q in gate.qubits:
            line = timelines[q]
            j = line.index(p)
            neighbours = [line[j + d] for d in (-1, 1) if 0 <= j + d < len(line) and line[j + d] in fict]
            if not neighbours:
                isolated.add(p)
            for nb in neighbours:
                parent[find(nb)] = find(p)
    for p in sorted(isolated):
        i, gate = ops[p]
        results.append(CheckResult(
            "fictitious", i, False,
            f"fictitious {gate.name}{gate.qubits} is not directly adjacent to a fictitious partner",
        ))
    groups: dict[int, list[int]] = {}
    for p in fict:
        groups.setdefault(find(p), []).append(p)
    for members in groups.values():
        members.sort()
        qubits = sorted({q for p in members for q in ops[p][1].qubits})
        u = np.eye(2 ** len(qubits), dtype=complex)
        for p in members:
            g = ops[p][1]
            u = embed_operator(g.unitary(), [qubits.index(q) for q in g.qubits], len(qubits)) @ u
        dev = _phase_aligned_deviation(u, np.eye(len(u)))
        owner = ops[members[0]][0]
        if dev > UNITARY_TOL:
            results.append(CheckResult("fictitious", owner, False, f"fictitious run does not cancel (deviation {dev:.3e})", dev))
        else:
            results.append(CheckResult("fictitious", owner, True, "fictitious gates cancel", dev))
    if not fict and not results:
        results.append(CheckResult("fictitious", None, True, "no fictitious gates"))
    return results


def validate_circuit(circuit: Circuit) -> Diagnostics:
    """Run the block, fictitious-gate, permutation and locality checks."""
    results: list[CheckResult] = []
    for i, el in enumerate(circuit.elements):
        if isinstance(el, DecompositionBlock):
            results.append(_check_unitary(i, el, circuit.tau))
            results.append(_check_permutation(i, el))
    results.extend(_check_fictitious(circuit))
    results.extend(_check_locality(circuit))
    return Diagnostics(tuple(results))
