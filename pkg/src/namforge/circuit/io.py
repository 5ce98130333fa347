"""JSON circuit documents.

A document looks like::

    {
      "qubits": 2,
      "trotter_step": 1.0,
      "elements": [
        {"kind": "block", "support": [0, 1], "small_angle": true,
         "generator": {"ZZ": 0.1}, "permutation": [0, 1],
         "ops": [
            {"kind": "gate", "name": "CNOT", "qubits": [0, 1]},
            {"kind": "noise", "model": "dephasing", "qubits": [1], "strength": 0.001},
            {"kind": "gate", "name": "RZ", "qubits": [1], "angle": 0.2},
            {"kind": "gate", "name": "CNOT", "qubits": [0, 1]}]},
        {"kind": "noise", "model": "damping", "qubits": [0], "strength": 0.001,
         "gate_time_ratio": 0.5}
      ]
    }

Top-level ``noise`` elements are free noise (for example idling). Complex
matrices (``rate_matrix`` and CUSTOM ``matrix``) are flat row-major lists of
``[re, im]`` pairs.
"""

from __future__ import annotations

import json
from typing import Any

import jsonschema
import numpy as np

from . import gates
from .model import (
    Circuit,
    CircuitError,
    DecompositionBlock,
    GateOp,
    NoiseEvent,
    validate_circuit,
)
from .noise import custom_noise, standard_noise

_COMPLEX_PAIRS = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
}
_QUBITS = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}

_GATE = {
    "type": "object",
    "properties": {
        "kind": {"const": "gate"},
        "name": {"enum": sorted(gates.GATE_NAMES)},
        "qubits": _QUBITS,
        "angle": {"type": "number"},
        "fictitious": {"type": "boolean"},
        "matrix": _COMPLEX_PAIRS,
    },
    "required": ["kind", "name", "qubits"],
    "additionalProperties": False,
}
_NOISE = {
    "type": "object",
    "properties": {
        "kind": {"const": "noise"},
        "model": {"enum": ["damping", "dephasing", "depolarizing", "custom"]},
        "qubits": _QUBITS,
        "strength": {
            "oneOf": [
                {"type": "number", "minimum": 0},
                {"type": "array", "items": {"type": "number", "minimum": 0}},
            ]
        },
        "rate_matrix": _COMPLEX_PAIRS,
        "gate_time_ratio": {"type": "number", "minimum": 0},
    },
    "required": ["kind", "model", "qubits"],
    "additionalProperties": False,
}
_BLOCK = {
    "type": "object",
    "properties": {
        "kind": {"const": "block"},
        "support": _QUBITS,
        "small_angle": {"type": "boolean"},
        "generator": {"type": "object", "additionalProperties": {"type": "number"}},
        "permutation": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "ops": {"type": "array", "items": {"oneOf": [_GATE, _NOISE]}},
    },
    "required": ["kind", "ops"],
    "additionalProperties": False,
}
SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "description": {"type": "string"},
        "qubits": {"type": "integer", "minimum": 1},
        "trotter_step": {"type": "number", "exclusiveMinimum": 0},
        "elements": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {"kind": {"enum": ["block", "noise"]}},
                "if": {"properties": {"kind": {"const": "block"}}},
                "then": _BLOCK,
                "else": _NOISE,
            },
        },
    },
    "required": ["qubits", "trotter_step", "elements"],
    "additionalProperties": False,
}
_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


class CircuitParseError(ValueError):
    """Syntax or schema problem in a circuit document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, field: str | None = None):
        self.line = line
        self.column = column
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if field:
            where.append(f"at {field}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)

    def to_dict(self) -> dict[str, Any]:
        return {"error": "parse", "message": str(self), "line": self.line, "column": self.column, "field": self.field}


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _complex_matrix(pairs, field: str) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in pairs])
    n = int(round(np.sqrt(flat.size)))
    if n * n != flat.size:
        raise CircuitParseError(f"matrix with {flat.size} entries is not square", field=field)
    return flat.reshape(n, n)


def _pairs(m: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m).reshape(-1)]


def _parse_gate(doc: dict, field: str) -> GateOp:
    matrix = _complex_matrix(doc["matrix"], field + ".matrix") if "matrix" in doc else None
    return GateOp(doc["name"], tuple(doc["qubits"]), doc.get("angle"), matrix, doc.get("fictitious", False))


def _parse_noise(doc: dict, field: str) -> NoiseEvent:
    qubits = tuple(doc["qubits"])
    ratio = doc.get("gate_time_ratio", 1.0)
    if "rate_matrix" in doc:
        return custom_noise(_complex_matrix(doc["rate_matrix"], field + ".rate_matrix"), qubits, ratio)
    if doc["model"] == "custom":
        raise CircuitParseError("custom noise needs a rate_matrix", field=field)
    if "strength" not in doc:
        raise CircuitParseError(f"{doc['model']} noise needs a strength", field=field)
    return standard_noise(doc["model"], qubits, doc["strength"], ratio)


def _parse_block(doc: dict, field: str) -> DecompositionBlock:
    ops = []
    for j, op in enumerate(doc["ops"]):
        f = f"{field}.ops[{j}]"
        try:
            ops.append(_parse_gate(op, f) if op["kind"] == "gate" else _parse_noise(op, f))
        except CircuitParseError:
            raise
        except (CircuitError, ValueError) as exc:
            raise CircuitParseError(str(exc), field=f) from exc
    return DecompositionBlock(
        tuple(ops),
        tuple(doc.get("support", ())),
        tuple(doc.get("permutation", ())),
        doc.get("small_angle", True),
        doc.get("generator", {}),
    )


def circuit_from_dict(doc: dict, validate: bool = True) -> Circuit:
    """Build a circuit from a decoded document; schema violations name the field."""
    err = jsonschema.exceptions.best_match(_VALIDATOR.iter_errors(doc))
    if err is not None:
        raise CircuitParseError(f"schema violation: {err.message}", field=_path(err.absolute_path))
    elements = []
    for i, el in enumerate(doc["elements"]):
        f = f"$.elements[{i}]"
        try:
            elements.append(_parse_block(el, f) if el["kind"] == "block" else _parse_noise(el, f))
        except CircuitParseError:
            raise
        except (CircuitError, ValueError) as exc:
            raise CircuitParseError(str(exc), field=f) from exc
    try:
        circuit = Circuit(doc["qubits"], doc["trotter_step"], tuple(elements))
    except (CircuitError, ValueError) as exc:
        raise CircuitParseError(str(exc), field="$") from exc
    if validate:
        validate_circuit(circuit).raise_for_failures()
    return circuit


def parse_circuit(text: str, validate: bool = True) -> Circuit:
    """Parse and (by default) validate a JSON circuit document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitParseError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from exc
    return circuit_from_dict(doc, validate)


def load_circuit(path, validate: bool = True) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read(), validate)


def _noise_to_dict(ev: NoiseEvent) -> dict:
    out: dict[str, Any] = {"kind": "noise", "qubits": list(ev.support)}
    if ev.model in ("damping", "dephasing", "depolarizing") and ev.strength is not None:
        out["model"] = ev.model
        s = list(ev.strength)
        out["strength"] = s[0] if len(set(s)) == 1 else s
    else:
        out["model"] = "custom"
        out["rate_matrix"] = _pairs(ev.gamma.entries)
    if ev.gate_time_ratio != 1.0:
        out["gate_time_ratio"] = ev.gate_time_ratio
    return out


def _gate_to_dict(g: GateOp) -> dict:
    out: dict[str, Any] = {"kind": "gate", "name": g.name, "qubits": list(g.qubits)}
    if g.angle is not None:
        out["angle"] = g.angle
    if g.matrix is not None:
        out["matrix"] = _pairs(g.matrix)
    if g.fictitious:
        out["fictitious"] = True
    return out


def circuit_to_dict(circuit: Circuit) -> dict:
    elements = []
    for el in circuit.elements:
        if isinstance(el, NoiseEvent):
            elements.append(_noise_to_dict(el))
            continue
        elements.append({
            "kind": "block",
            "support": list(el.support),
            "small_angle": el.small_angle,
            "generator": dict(el.generator),
            "permutation": list(el.permutation),
            "ops": [_gate_to_dict(op) if isinstance(op, GateOp) else _noise_to_dict(op) for op in el.ops],
        })
    return {"qubits": circuit.qubit_count, "trotter_step": circuit.trotter_step, "elements": elements}


def serialize_circuit(circuit: Circuit, indent: int | None = 2) -> str:
    return json.dumps(circuit_to_dict(circuit), indent=indent)


__all__ = [
    "SCHEMA",
    "CircuitParseError",
    "circuit_from_dict",
    "circuit_to_dict",
    "load_circuit",
    "parse_circuit",
    "serialize_circuit",
]
