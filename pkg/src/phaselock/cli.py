"""Command-line entry point: ``phaselock <command> ...``.

Every command writes its outputs plus a ``<command>_manifest.json`` recording
the resolved settings, SHA-256 hashes of the inputs and the output paths.
Errors are reported on stderr as one JSON object with a machine-readable code.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import BUNDLED_DATA, __version__, bundled_path
from .bifurcation import detect_bifurcations, export_diagram, sweep_tau
from .ddesim import (
    FullRun,
    classify_kind,
    compare,
    frequency_deviation,
    measure_period_and_phase,
    simulate_full_coupled,
)
from .errors import ConfigError, IoFailure, PhaselockError
from .oscillator import (
    InteractionFunction,
    compute_H,
    find_limit_cycle,
    load_oscillator_config,
    normalization_integral,
    solve_adjoint,
)
from .phasemodel import (
    PhaseConfig,
    find_all_locked,
    small_delay_solutions,
    write_solutions_csv,
)

def _resolve_input(name: str) -> Path:
    """A file path, or the stem of a bundled data file such as ``H_II``."""
    path = Path(name)
    if path.exists():
        return path
    if name in BUNDLED_DATA:
        return bundled_path(name)
    raise ConfigError(f"no such file or bundled data set: {name}", field="input")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _Run:
    """Collects inputs and outputs of one command and writes the manifest."""

    def __init__(self, command, out_dir: Path, settings: dict):
        self.command = command
        self.out_dir = out_dir
        self.settings = settings
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoFailure(f"cannot create {out_dir}: {exc}") from exc

    def input(self, name: str) -> Path:
        path = _resolve_input(name)
        self.inputs[name] = _sha256(path)
        return path

    def output(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out_dir / name

    def finish(self, extra=None):
        manifest = {
            "command": self.command,
            "config": self.settings,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "version": __version__,
        }
        if extra:
            manifest["results"] = extra
        path = self.out_dir / f"{self.command}_manifest.json"
        _write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return manifest


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _parse_floats(text: str, field: str, count=None):
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}", field=field) from exc
    if count is not None and len(values) != count:
        raise ConfigError(f"expected {count} numbers, got {len(values)}", field=field)
    return values


def _settings(args) -> dict:
    skip = {"func", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# -- commands ---------------------------------------------------------------------

def cmd_reduce(args) -> int:
    run = _Run("reduce", Path(args.out_dir), _settings(args))
    cfg = load_oscillator_config(run.input(args.model))
    vf = cfg.vector_field()
    lc = find_limit_cycle(vf, cfg.initial_guess(), cfg.t_transient, n_samples=args.n_samples)
    adj = solve_adjoint(vf, lc)
    h = compute_H(lc, adj, cfg.coupling_function(), n_phi=args.n_phi, K=args.K)
    out = run.output(args.out)
    try:
        h.save(out)
    except OSError as exc:
        raise IoFailure(f"cannot write {out}: {exc}") from exc
    report = {
        "period": lc.period,
        "Omega": lc.Omega,
        "normalization": normalization_integral(vf, lc, adj),
        "a": h.a.tolist(),
        "b": h.b.tolist(),
    }
    if cfg.expected_period is not None:
        rel = abs(lc.period - cfg.expected_period) / cfg.expected_period
        report["expected_period"] = cfg.expected_period
        report["period_check"] = "pass" if rel <= 0.01 else "fail"
    _write_text(run.output("reduce_report.json"), json.dumps(report, indent=2) + "\n")
    run.finish({"period": lc.period, "Omega": lc.Omega})
    print(f"T = {lc.period:.6f}  Omega = {lc.Omega:.6f}")
    for k, (ak, bk) in enumerate(zip(h.a, np.append(np.nan, h.b))):
        print(f"  k={k}  a={ak: .8f}" + ("" if k == 0 else f"  b={bk: .8f}"))
    return 0


def _phase_config(args) -> PhaseConfig:
    return PhaseConfig(args.epsilon, args.omega, getattr(args, "tau", 0.0) or 0.0)


def cmd_solve(args) -> int:
    run = _Run("solve", Path(args.out_dir), _settings(args))
    h = InteractionFunction.load(run.input(args.h_file))
    cfg = _phase_config(args)
    if args.small_delay:
        sols = small_delay_solutions(cfg, h)
    else:
        sols = find_all_locked(cfg, h, n_samples=args.n_samples, grid=(args.grid, args.grid))
    write_solutions_csv(run.output(args.out), sols)
    run.finish({"solutions": len(sols)})
    for s in sols:
        print(f"{s.kind.value:10s} psi={s.psi:.6f} omega={s.omega: .6f} {s.stable.value}")
    return 0


def cmd_sweep(args) -> int:
    run = _Run("sweep", Path(args.out_dir), _settings(args))
    h = InteractionFunction.load(run.input(args.h_file))
    cfg = PhaseConfig(args.epsilon, args.omega, 0.0)
    branches = sweep_tau((args.tau_min, args.tau_max), args.step, cfg, h, model=args.model,
                         workers=args.threads)
    bifs = detect_bifurcations(branches, cfg, h) if args.model == "delay" else []
    export_diagram(branches, bifs, run.output(f"{args.out}.csv"), "csv")
    export_diagram(branches, bifs, run.output(f"{args.out}.svg"), "svg")
    run.finish({"branches": len(branches), "events": len(bifs)})
    for e in bifs:
        flags = f" [{', '.join(e.flags)}]" if e.flags else ""
        print(f"{e.kind.value:22s} tau*={e.tau_star:.8f} psi*={e.psi_star:.6f} "
              f"omega*={e.omega_star: .6f}{flags}")
    return 0


def _model_and_omega(run, args):
    cfg = load_oscillator_config(run.input(args.model))
    vf = cfg.vector_field()
    if args.omega is not None:
        return cfg, vf, args.omega
    lc = find_limit_cycle(vf, cfg.initial_guess(), cfg.t_transient)
    return cfg, vf, lc.Omega


def cmd_simulate(args) -> int:
    run = _Run("simulate", Path(args.out_dir), _settings(args))
    cfg, vf, Omega = _model_and_omega(run, args)
    history = _parse_floats(args.history, "history", 2 * vf.dimension)
    pcfg = PhaseConfig(args.epsilon, Omega, args.tau)
    traj = simulate_full_coupled(vf, cfg.coupling_function(), pcfg, history,
                                 t_end=args.t_end, dt=args.dt)
    names = ["v1", "w1", "v2", "w2"] if vf.dimension == 2 else None
    out = run.output(args.out)
    try:
        traj.to_csv(out, names, every=args.every)
    except OSError as exc:
        raise IoFailure(f"cannot write {out}: {exc}") from exc
    results = {"Omega": Omega}
    try:
        T, psi = measure_period_and_phase(traj)
        results.update(period=T, psi=psi, omega=frequency_deviation(T, args.epsilon),
                       kind=classify_kind(psi).value)
    except PhaselockError as exc:
        results["locking"] = exc.code
    run.finish(results)
    print(json.dumps(results, sort_keys=True))
    return 0


def _load_histories(path: Path, dimension: int):
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON ({exc})", field=str(path)) from exc
    if not isinstance(data, list):
        raise ConfigError("expected a list of {tau, history} objects", field="$")
    out = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or "tau" not in item or "history" not in item:
            raise ConfigError("needs keys 'tau' and 'history'", field=f"[{i}]")
        hist = item["history"]
        if not isinstance(hist, list) or len(hist) != 2 * dimension:
            raise ConfigError(f"needs {2 * dimension} numbers", field=f"[{i}].history")
        out.append((float(item["tau"]), [float(v) for v in hist]))
    return out


def _random_histories(taus, n_per_tau, seed, vf, cfg):
    """Points on the uncoupled cycle at random phases for each oscillator."""
    rng = np.random.default_rng(seed)
    lc = find_limit_cycle(vf, cfg.initial_guess(), cfg.t_transient)
    out = []
    for tau in taus:
        for _ in range(n_per_tau):
            p1, p2 = rng.uniform(0, 2 * np.pi, 2)
            out.append((tau, np.concatenate([lc(p1), lc(p2)]).tolist()))
    return out


def cmd_compare(args) -> int:
    run = _Run("compare", Path(args.out_dir), _settings(args))
    cfg, vf, Omega = _model_and_omega(run, args)
    h = InteractionFunction.load(run.input(args.h_file))
    taus = _parse_floats(args.tau_list, "tau-list")
    if args.histories:
        jobs = _load_histories(run.input(args.histories), vf.dimension)
    else:
        jobs = _random_histories(taus, args.n_random, args.seed, vf, cfg)
    g = cfg.coupling_function()
    full_runs, rows = [], []
    for tau, hist in jobs:
        pcfg = PhaseConfig(args.epsilon, Omega, tau)
        traj = simulate_full_coupled(vf, g, pcfg, hist, t_end=args.t_end)
        try:
            T, psi = measure_period_and_phase(traj)
        except PhaselockError:
            continue
        kind = classify_kind(psi)
        full_runs.append(FullRun(tau, kind, frequency_deviation(T, args.epsilon)))
    phase = []
    for tau in sorted(set(taus) | {r.tau for r in full_runs}):
        phase.extend(s for s in find_all_locked(PhaseConfig(args.epsilon, Omega, tau), h)
                     if s.is_stable)
    records = compare(phase, [r for r in full_runs if r.kind.value != "OutOfPhase"])
    lines = ["tau,kind,omega_phase,omega_full,E_N"]
    for r in records:
        lines.append(f"{r.tau!r},{r.psi_kind.value},{r.omega_phase!r},{r.omega_full!r},{r.E_N!r}")
        rows.append(lines[-1])
    _write_text(run.output(args.out), "\n".join(lines) + "\n")
    run.finish({"records": len(records)})
    print("\n".join(lines))
    return 0


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phaselock", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"phaselock {__version__}")
    p.add_argument("--out-dir", default=".", help="directory for all outputs")
    p.add_argument("--seed", type=int, default=0, help="seed for random initial-condition scans")
    p.add_argument("--threads", type=int, default=1, help="worker processes for parallel solves")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", help="limit cycle, adjoint and interaction function")
    r.add_argument("--model", required=True, help="oscillator JSON or bundled name")
    r.add_argument("--K", type=int, default=4)
    r.add_argument("--n-samples", type=int, default=1024)
    r.add_argument("--n-phi", type=int, default=256)
    r.add_argument("--out", default="H.json")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", help="all locked solutions at one delay")
    s.add_argument("--h-file", required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--omega", type=float, required=True, help="natural frequency Omega")
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--small-delay", action="store_true", help="treat the delay as a phase shift")
    s.add_argument("--n-samples", type=int, default=4096)
    s.add_argument("--grid", type=int, default=256)
    s.add_argument("--out", default="solutions.csv")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="branches and bifurcations over a delay range")
    w.add_argument("--h-file", required=True)
    w.add_argument("--epsilon", type=float, required=True)
    w.add_argument("--omega", type=float, required=True)
    w.add_argument("--tau-min", type=float, required=True)
    w.add_argument("--tau-max", type=float, required=True)
    w.add_argument("--step", type=float, required=True)
    w.add_argument("--model", choices=("delay", "small"), default="delay")
    w.add_argument("--out", default="diagram")
    w.set_defaults(func=cmd_sweep)

    m = sub.add_parser("simulate", help="integrate the delay-coupled pair")
    m.add_argument("--model", required=True)
    m.add_argument("--epsilon", type=float, required=True)
    m.add_argument("--tau", type=float, required=True)
    m.add_argument("--history", required=True, help='constant history "v1,w1,v2,w2"')
    m.add_argument("--omega", type=float, default=None, help="override the measured Omega")
    m.add_argument("--t-end", type=float, default=400 * 2 * np.pi)
    m.add_argument("--dt", type=float, default=None)
    m.add_argument("--every", type=int, default=1, help="write every n-th node")
    m.add_argument("--out", default="traj.csv")
    m.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="phase-model versus full-model frequencies")
    c.add_argument("--model", required=True)
    c.add_argument("--h-file", required=True)
    c.add_argument("--epsilon", type=float, required=True)
    c.add_argument("--tau-list", required=True)
    c.add_argument("--histories", default=None, help="JSON list of {tau, history}")
    c.add_argument("--n-random", type=int, default=4, help="random histories per tau")
    c.add_argument("--omega", type=float, default=None)
    c.add_argument("--t-end", type=float, default=400 * 2 * np.pi)
    c.add_argument("--out", default="comparison.csv")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "tau_min", None) is not None and not args.tau_min < args.tau_max:
            raise ConfigError("must be below --tau-max", field="tau-min")
        return args.func(args)
    except PhaselockError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 1
    except ValueError as exc:
        print(json.dumps({"error": "invalid_argument", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
