"""``namforge`` command line: validate, analyze, simulate, compare, scaling.

Every command writes machine-readable output. Failures print a JSON error
report on stderr and exit nonzero (1 for a circuit that fails validation,
2 for any other error).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .circuit.io import CircuitParseError, parse_circuit
from .circuit.library import build_second_order_circuit, build_tfim_trotter_circuit
from .circuit.model import Circuit, CircuitValidationError, validate_circuit
from .nam import (
    NoisyAlgorithmModel,
    build_noisy_algorithm_model,
    model_from_dict,
    model_to_dict,
    parse_model,
    trace_matched_alternative,
)
from .simulate import (
    compare_trajectories,
    evolve_effective,
    evolve_exact_circuit,
    fmt,
    initial_state,
    metrics_table,
    parse_observable,
    trajectory_csv,
)

ALT_CHOICES = ("damping", "dephasing", "depolarizing", "global", "uncommuted")
COMMANDS = ("validate", "analyze", "simulate", "compare", "scaling")
FIXTURE_PREFIX = "fixture:"


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    output_dir: str | None = None
    n_steps: int = 500
    observables: list[str] = field(default_factory=lambda: ["X0"])
    initial_state: str = "all-up"
    alternative_kinds: list[str] = field(default_factory=lambda: list(ALT_CHOICES))
    seed: int = 0
    include_trotter_correction: bool = False
    from_model: str | None = None
    qubits: int = 2
    phis: list[float] = field(default_factory=lambda: [0.2, 0.1, 0.05, 0.025])
    mu_ratio: float = 5e-3
    total_time: float = 20.0

    def check(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.n_steps < 1:
            raise ValueError("--steps must be at least 1")
        needs_input = self.command in ("validate", "analyze", "compare") or (
            self.command == "simulate" and self.from_model is None
        )
        if needs_input and not self.input_path:
            raise ValueError(f"{self.command} needs --input")
        for p in (self.input_path, self.from_model):
            if p and not p.startswith(FIXTURE_PREFIX) and not Path(p).exists():
                raise FileNotFoundError(p)
        for kind in self.alternative_kinds:
            if kind not in ALT_CHOICES:
                raise ValueError(f"unknown alternative {kind!r}; choose from {ALT_CHOICES}")


class CommandFailed(Exception):
    def __init__(self, report: dict, status: int):
        super().__init__(report.get("message", ""))
        self.report = report
        self.status = status


def fixture_names() -> list[str]:
    root = resources.files("namforge") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def read_input(path: str) -> str:
    if path.startswith(FIXTURE_PREFIX):
        name = path[len(FIXTURE_PREFIX):]
        res = resources.files("namforge") / "fixtures" / f"{name}.json"
        if not res.is_file():
            raise FileNotFoundError(f"no packaged fixture {name!r}; available: {fixture_names()}")
        return res.read_text(encoding="utf-8")
    return Path(path).read_text(encoding="utf-8")


def _load(cfg: RunConfig, validate: bool = True) -> Circuit:
    try:
        return parse_circuit(read_input(cfg.input_path), validate)
    except CircuitParseError as exc:
        report = exc.to_dict()
        report["file"] = cfg.input_path
        raise CommandFailed(report, 2) from exc


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> str:
    path.write_text(text, encoding="utf-8")
    return str(path)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _rho0(cfg: RunConfig, k: int) -> np.ndarray:
    if cfg.initial_state == "random":
        rng = np.random.default_rng(cfg.seed)
        psi = rng.normal(size=2**k) + 1j * rng.normal(size=2**k)
        psi /= np.linalg.norm(psi)
        return np.outer(psi, psi.conj())
    return initial_state(cfg.initial_state, k)


def _compiled(circuit: Circuit) -> NoisyAlgorithmModel:
    # go through the document form so that a model reloaded with --from-model is bit-identical
    return model_from_dict(json.loads(json.dumps(model_to_dict(build_noisy_algorithm_model(circuit)))))


def cmd_validate(cfg: RunConfig) -> dict:
    circuit = _load(cfg, validate=False)
    diag = validate_circuit(circuit)
    report = {
        "file": cfg.input_path,
        "ok": diag.ok,
        "checks": [
            {"check": r.check, "element": r.element, "passed": r.passed, "detail": r.detail, "deviation": r.deviation}
            for r in diag
        ],
    }
    if cfg.output_dir:
        _write(_out_dir(cfg) / "validation.json", _dump(report))
    if not diag.ok:
        failing = sorted({r.check for r in diag.failures})
        raise CommandFailed({"error": "validation", "message": f"failed checks: {', '.join(failing)}",
                             "failed_checks": failing, "report": report}, 1)
    return report


def cmd_analyze(cfg: RunConfig) -> dict:
    model = build_noisy_algorithm_model(_load(cfg))
    doc = model_to_dict(model)
    if cfg.output_dir:
        _write(_out_dir(cfg) / "nam.json", _dump(doc))
    return doc


def cmd_simulate(cfg: RunConfig) -> dict:
    out = _out_dir(cfg)
    obs_in = cfg.observables
    files = {}
    if cfg.from_model:
        model = parse_model(read_input(cfg.from_model))
        circuit = None
    else:
        circuit = _load(cfg)
        model = _compiled(circuit)
    k = model.qubit_count
    observables = [parse_observable(o, k) for o in obs_in]
    rho0 = _rho0(cfg, k)
    if circuit is not None:
        exact = evolve_exact_circuit(circuit, rho0, cfg.n_steps)
        files["exact"] = _write(out / "exact.csv", trajectory_csv(exact, observables))
    nam = evolve_effective(model, rho0, cfg.n_steps, cfg.include_trotter_correction)
    files["nam"] = _write(out / "nam.csv", trajectory_csv(nam, observables))
    return {"files": files, "steps": cfg.n_steps, "observables": observables}


def cmd_compare(cfg: RunConfig) -> dict:
    circuit = _load(cfg)
    model = build_noisy_algorithm_model(circuit)
    k = circuit.qubit_count
    observables = [parse_observable(o, k) for o in cfg.observables]
    rho0 = _rho0(cfg, k)
    exact = evolve_exact_circuit(circuit, rho0, cfg.n_steps)
    models = {"nam": model}
    for kind in cfg.alternative_kinds:
        models[kind] = trace_matched_alternative(kind, model, circuit)
    rows = {}
    traces = {}
    for name, m in models.items():
        traj = evolve_effective(m, rho0, cfg.n_steps, cfg.include_trotter_correction)
        rows[name] = {o: compare_trajectories(exact, traj, o) for o in observables}
        traces[name] = m.noise_trace
    doc = {
        "file": cfg.input_path,
        "steps": cfg.n_steps,
        "initial_state": cfg.initial_state,
        "seed": cfg.seed,
        "dissipator_trace": traces,
        "metrics": metrics_table(rows),
    }
    if cfg.output_dir:
        _write(_out_dir(cfg) / "metrics.json", _dump(doc))
    return doc


def scaling_table(
    k: int, phis, mu_ratio: float, total_time: float, observable: str = "X0", initial: str = "all-up"
) -> list[dict]:
    """NAM-vs-exact error at fixed total time for first- and second-order TFIM steps.

    ``J = g = 1``, so ``tau = phi / 2`` and the noise per Hadamard is ``mu_ratio * phi``.
    """
    rows = []
    obs = parse_observable(observable, k)
    for phi in phis:
        tau = phi / 2
        n = int(round(total_time / tau))
        mu = mu_ratio * phi
        rho0 = initial_state(initial, k)
        row = {"phi": phi, "tau": tau, "mu": mu, "steps": n}
        base = build_tfim_trotter_circuit(k, phi / 2, phi / 2, mu, tau=tau)
        for name, c in (("first_order", base), ("second_order", build_second_order_circuit(base))):
            ex = evolve_exact_circuit(c, rho0, n)
            nm = evolve_effective(build_noisy_algorithm_model(c), rho0, n)
            row[name] = compare_trajectories(ex, nm, obs).max_abs_dev
        rows.append(row)
    return rows


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def cmd_scaling(cfg: RunConfig) -> dict:
    rows = scaling_table(cfg.qubits, cfg.phis, cfg.mu_ratio, cfg.total_time, cfg.observables[0], cfg.initial_state)
    phis = [r["phi"] for r in rows]
    doc = {
        "qubits": cfg.qubits,
        "mu_over_phi": cfg.mu_ratio,
        "total_time": cfg.total_time,
        "observable": parse_observable(cfg.observables[0], cfg.qubits),
        "rows": rows,
        "slope_first_order": loglog_slope(phis, [r["first_order"] for r in rows]) if len(rows) > 1 else None,
        "slope_second_order": loglog_slope(phis, [r["second_order"] for r in rows]) if len(rows) > 1 else None,
    }
    if cfg.output_dir:
        out = _out_dir(cfg)
        lines = ["phi,tau,mu,steps,first_order,second_order"]
        lines += [",".join([fmt(r["phi"]), fmt(r["tau"]), fmt(r["mu"]), str(r["steps"]),
                            fmt(r["first_order"]), fmt(r["second_order"])]) for r in rows]
        _write(out / "scaling.csv", "\n".join(lines) + "\n")
        _write(out / "scaling.json", _dump(doc))
    return doc


HANDLERS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "scaling": cmd_scaling,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="namforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="circuit JSON file, or fixture:<name> for a packaged fixture")
    common.add_argument("--out", help="output directory for artifacts")
    common.add_argument("--steps", type=int, default=500)
    common.add_argument("--observable", action="append", help="Pauli string (XIII) or site form (X0); repeatable")
    common.add_argument("--initial", default="all-up", help="all-up, a bit string such as 0101, or random")
    common.add_argument("--alt", action="append", choices=ALT_CHOICES, help="alternative model; repeatable")
    common.add_argument("--seed", type=int, default=0, help="seed for --initial random")
    common.add_argument("--include-trotter-correction", action="store_true")
    helps = {
        "validate": "check a circuit document",
        "analyze": "compile a circuit into its noisy algorithm model",
        "simulate": "write exact and effective trajectories as CSV",
        "compare": "metrics for the model and trace-matched alternatives",
        "scaling": "NAM error versus phi for first- and second-order TFIM steps",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "simulate":
            p.add_argument("--from-model", help="simulate a model document written by analyze")
        if name == "scaling":
            p.add_argument("--qubits", type=int, default=2)
            p.add_argument("--phi", type=float, action="append", help="coherent angle; repeatable")
            p.add_argument("--mu-ratio", type=float, default=5e-3)
            p.add_argument("--time", type=float, default=20.0, help="total simulated time")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        input_path=ns.input,
        output_dir=ns.out,
        n_steps=ns.steps,
        observables=ns.observable or ["X0"],
        initial_state=ns.initial,
        alternative_kinds=ns.alt or list(ALT_CHOICES),
        seed=ns.seed,
        include_trotter_correction=ns.include_trotter_correction,
        from_model=getattr(ns, "from_model", None),
        qubits=getattr(ns, "qubits", 2),
        phis=getattr(ns, "phi", None) or [0.2, 0.1, 0.05, 0.025],
        mu_ratio=getattr(ns, "mu_ratio", 5e-3),
        total_time=getattr(ns, "time", 20.0),
    )


def _error_report(exc: BaseException) -> tuple[dict, int]:
    if isinstance(exc, CommandFailed):
        return exc.report, exc.status
    if isinstance(exc, CircuitValidationError):
        failing = sorted({r.check for r in exc.diagnostics.failures})
        return {"error": "validation", "message": str(exc), "failed_checks": failing}, 1
    if isinstance(exc, FileNotFoundError):
        return {"error": "file", "message": f"no such file: {exc}"}, 2
    return {"error": type(exc).__name__, "message": str(exc)}, 2


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        cfg.check()
        result = HANDLERS[cfg.command](cfg)
    except Exception as exc:  # every failure becomes a JSON report
        report, status = _error_report(exc)
        report.setdefault("command", cfg.command)
        sys.stderr.write(json.dumps(report, sort_keys=True) + "\n")
        return status
    stdout.write(_dump(result))
    return 0


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
