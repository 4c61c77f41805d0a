"""Run driver: configuration, CFL time-step control, the time loop, output
files, and the mesh-convergence orchestrator. Also the command-line entry
point (``run``, ``converge``, ``reference`` subcommands)."""

from __future__ import annotations

import argparse
import sys
import time as _time
from dataclasses import dataclass, field, replace

import numpy as np

from . import cch as cch_mod
from . import diagnostics as diag
from . import problems as problems_mod
from . import sgh as sgh_mod
from .errors import ConfigError, MeshTangled, SolverFailure
from .eos import IdealGas
from .mesh import CchState, SghState
from .problems import ProblemSpec

__all__ = ["RunConfig", "RunResult", "compute_dt", "run",
           "run_convergence", "ConvergenceTable", "main", "console_main"]

FIELDS = ("rho", "u", "p", "eps")
_MAX_STEPS = 10_000_000


@dataclass(frozen=True)
class RunConfig:
    problem: str | ProblemSpec
    method: str = "sgh"
    n_cells: int = 100
    sgh_mode: str = "predictor_only"
    cch_solver: str = "quadratic"
    cfl: float = 0.3
    dt_init: float | None = None      # default: 1e-4 x first CFL candidate
    dt_max: float = float("inf")
    dt_growth: float = 1.01
    t_end: float | None = None        # default: the problem's end time
    out: str | None = None
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self):
        if self.method not in ("sgh", "cch"):
            raise ConfigError(f"method must be sgh or cch, got {self.method!r}")
        if self.sgh_mode not in sgh_mod.MODES:
            raise ConfigError(f"unknown sgh_mode {self.sgh_mode!r}")
        if self.cch_solver not in cch_mod.SOLVERS:
            raise ConfigError(f"unknown cch_solver {self.cch_solver!r}")
        if not 0.0 < self.cfl <= 0.9:
            raise ConfigError(f"cfl must be in (0, 0.9], got {self.cfl}")
        if self.n_cells < 2:
            raise ConfigError(f"n_cells must be >= 2, got {self.n_cells}")
        if self.dt_growth < 1.0:
            raise ConfigError(f"dt_growth must be >= 1, got {self.dt_growth}")
        if self.t_end is not None and self.t_end < 0.0:
            raise ConfigError(f"t_end must be nonnegative, got {self.t_end}")


@dataclass
class RunResult:
    problem: ProblemSpec
    config: RunConfig
    mesh: object
    state: object
    ledger: diag.ConservationLedger
    monitor: diag.EntropyMonitor
    steps: int
    t_final: float
    wall_time: float
    status: str = "success"


def _velocity_jumps(state) -> np.ndarray:
    """Per-cell velocity variation used to harden the CFL bound."""
    if isinstance(state, SghState):
        return np.abs(state.node_u[1:] - state.node_u[:-1])
    d = np.abs(np.diff(state.u))
    du = np.zeros_like(state.u)
    if len(d):
        du[:-1] = np.maximum(du[:-1], d)
        du[1:] = np.maximum(du[1:], d)
    return du


def _cfl_candidate(state, mesh, cfl: float) -> float:
    widths = mesh.cell_volumes
    du = _velocity_jumps(state)
    return cfl * float(np.min(widths / (state.c + du)))


def compute_dt(state, mesh, cfl: float, dt_prev: float | None,
               dt_max: float, dt_growth: float, time_remaining: float) -> float:
    """CFL-limited step, clamped by growth rate, dt_max, and remaining time."""
    dt = _cfl_candidate(state, mesh, cfl)
    if dt_prev is not None:
        dt = min(dt, dt_growth * dt_prev)
    dt = min(dt, dt_max, time_remaining)
    if not dt > 0.0:
        raise SolverFailure(f"nonpositive time step {dt}")
    return dt


def resolve_problem(problem: str | ProblemSpec) -> ProblemSpec:
    if isinstance(problem, ProblemSpec):
        return problem
    if isinstance(problem, str):
        try:
            if problem.startswith("@"):
                with open(problem[1:], "r", encoding="utf-8") as fh:
                    return ProblemSpec.from_json(fh.read())
            return problems_mod.by_name(problem)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError(f"cannot resolve problem from {problem!r}")


def _positivity_floors(state) -> tuple[float, float]:
    # blow-up detector: well below any physically reachable value
    return 1e-14 * float(np.min(state.eps)), 1e-14 * float(np.min(state.rho))


def run(config: RunConfig) -> RunResult:
    """Time-march a problem to its end time with per-step audits.

    Raises SolverFailure (with step and time context) if the scheme breaks
    down; mesh tangling is reported through the MeshTangled subclass.
    """
    problem = resolve_problem(config.problem)
    gas = IdealGas(problem.gamma)
    mesh, state = problems_mod.build_initial(problem, config.n_cells, config.method)
    t_end = problem.t_end if config.t_end is None else float(config.t_end)

    ledger = diag.ConservationLedger.open(mesh, state)
    monitor = diag.EntropyMonitor(problem.gamma)
    monitor.open(state)
    eps_floor, rho_floor = _positivity_floors(state)
    snapshots = sorted(t for t in config.snapshot_times if 0.0 < t < t_end)

    t = 0.0
    steps = 0
    dt_prev: float | None = None
    started = _time.perf_counter()
    time_scale = max(t_end, 1.0)
    try:
        while t_end - t > 1e-14 * time_scale:
            if steps >= _MAX_STEPS:
                raise SolverFailure(f"exceeded {_MAX_STEPS} steps")
            remaining = t_end - t
            if snapshots:
                remaining = min(remaining, snapshots[0] - t)
            dt = compute_dt(state, mesh, config.cfl, dt_prev, config.dt_max,
                            config.dt_growth, remaining)
            if dt_prev is None:
                dt = min(dt, (config.dt_init if config.dt_init is not None
                              else 1e-4 * dt))
            assert dt <= _cfl_candidate(state, mesh, config.cfl) * (1.0 + 1e-12)

            before = state
            if config.method == "sgh":
                mesh, state, report = sgh_mod.step(
                    state, mesh, gas, dt, problem.bc_left, problem.bc_right,
                    mode=config.sgh_mode)
                scale = before.p * np.abs(report.du)
                expansion = report.du >= 0.0 if config.sgh_mode == "predictor_only" else None
            else:
                mesh, state, report = cch_mod.step(
                    state, mesh, gas, dt, problem.bc_left, problem.bc_right,
                    solver=config.cch_solver)
                us = report.nodal.u_star
                scale = before.p * (np.abs(before.u - us[:-1]) + np.abs(us[1:] - before.u))
                expansion = None

            t += dt
            dt_prev = dt
            steps += 1
            diag.audit_step(ledger, mesh, before, state, report.boundary, dt)
            monitor.update(report.entropy_production, scale, expansion)
            if np.any(state.eps <= eps_floor) or np.any(state.rho <= rho_floor):
                bad = int(np.argmin(state.eps))
                raise SolverFailure("positivity floor hit", cell=bad)
            if snapshots and t >= snapshots[0] * (1.0 - 1e-14):
                snapshots.pop(0)
                if config.out:
                    _write_outputs(config, problem, mesh, state, tag=f"_t{t:.9g}")
    except SolverFailure as failure:
        raise failure.with_context(step=steps + 1, time=t) from None

    wall = _time.perf_counter() - started
    result = RunResult(problem, config, mesh, state, ledger, monitor,
                       steps, t, wall)
    if config.out:
        _write_outputs(config, problem, mesh, state)
        _write_summary(config, result)
    return result


# -- output files --------------------------------------------------------------

def _run_stem(config: RunConfig, problem: ProblemSpec) -> str:
    return f"{problem.name}_{config.method}_N{config.n_cells}"


def _cell_velocity(state) -> np.ndarray:
    if isinstance(state, CchState):
        return state.u
    return 0.5 * (state.node_u[:-1] + state.node_u[1:])


def _write_outputs(config: RunConfig, problem: ProblemSpec, mesh, state, tag=""):
    import os

    os.makedirs(config.out, exist_ok=True)
    stem = os.path.join(config.out, _run_stem(config, problem) + tag)
    u_cell = _cell_velocity(state)
    if isinstance(state, CchState):
        e_total = state.E
    else:
        e_total = state.eps + 0.5 * u_cell ** 2
    with open(stem + ".csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,rho,u,p,eps,e_total\n")
        for row in zip(mesh.cell_centers, state.rho, u_cell, state.p, state.eps, e_total):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    if isinstance(state, SghState):
        with open(stem + ".nodes", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x,u\n")
            for row in zip(mesh.node_x, state.node_u):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _write_summary(config: RunConfig, result: RunResult):
    import os

    stem = os.path.join(config.out, _run_stem(config, result.problem))
    led = result.ledger
    lines = {
        "status": result.status,
        "problem": result.problem.name,
        "method": config.method,
        "n_cells": config.n_cells,
        "steps": result.steps,
        "t_final": f"{result.t_final:.17g}",
        "wall_time_s": f"{result.wall_time:.6f}",
        "mass_initial": f"{led.mass0:.17g}",
        "mass_final": f"{led.mass:.17g}",
        "mass_drift": f"{led.mass_drift:.17g}",
        "momentum_drift": f"{led.momentum - led.momentum0:.17g}",
        "boundary_impulse": f"{led.boundary_impulse:.17g}",
        "momentum_residual_rel": f"{led.momentum_residual_rel:.6e}",
        "energy_drift": f"{led.energy - led.energy0:.17g}",
        "boundary_work": f"{led.boundary_work:.17g}",
        "energy_residual_rel": f"{led.energy_residual_rel:.6e}",
        "entropy_worst_normalized": f"{result.monitor.worst_normalized:.6e}",
        "entropy_violations": result.monitor.violations,
        "audit_violations": len(led.violations),
    }
    with open(stem + ".summary", "w", encoding="utf-8", newline="\n") as fh:
        for k, v in lines.items():
            fh.write(f"{k}={v}\n")


# -- convergence studies --------------------------------------------------------

@dataclass
class ConvergenceTable:
    problem: str
    method: str
    rows: list = field(default_factory=list)   # (N, {field: error})
    orders: dict = field(default_factory=dict)

    def format(self) -> str:
        header = "N," + ",".join(f"l1_{f}" for f in FIELDS)
        out = [header]
        for n, errs in self.rows:
            out.append(f"{n}," + ",".join(f"{errs[f]:.8e}" for f in FIELDS))
        if any(v is not None for v in self.orders.values()):
            out.append("order," + ",".join(
                "" if self.orders.get(f) is None else f"{self.orders[f]:.4f}"
                for f in FIELDS))
        return "\n".join(out) + "\n"


def run_convergence(config: RunConfig, n_list, n_reference: int = 3200) -> ConvergenceTable:
    """Independent runs over a list of resolutions, with L1 errors against the
    problem's reference solution and the fitted convergence order."""
    problem = resolve_problem(config.problem)
    t_end = problem.t_end if config.t_end is None else float(config.t_end)
    table = ConvergenceTable(problem.name, config.method)

    reference_cache = None
    if problem.reference == "self_converged":
        reference_cache = problems_mod._self_reference_run(problem, t_end, n_reference)

    for n in n_list:
        cfg = replace(config, n_cells=int(n), out=None)
        try:
            result = run(cfg)
        except SolverFailure as failure:
            raise SolverFailure(
                f"convergence run N={n} failed: {failure.reason}",
                step=failure.step, time=failure.time, cell=failure.cell) from failure
        centers = result.mesh.cell_centers
        if reference_cache is None:
            ref = problems_mod.sample_reference(problem, centers, result.t_final)
        else:
            rx, rfields = reference_cache
            ref = {f: np.interp(centers, rx, rfields[f]) for f in FIELDS}
        num = {"rho": result.state.rho, "u": _cell_velocity(result.state),
               "p": result.state.p, "eps": result.state.eps}
        vols = result.mesh.cell_volumes
        errs = {f: diag.l1_error(num[f], ref[f], vols) for f in FIELDS}
        table.rows.append((int(n), errs))

    if len(table.rows) >= 2:
        ns = [r[0] for r in table.rows]
        for f in FIELDS:
            errors = [r[1][f] for r in table.rows]
            try:
                table.orders[f] = diag.convergence_order(ns, errors)
            except ValueError:
                table.orders[f] = None
    else:
        table.orders = {f: None for f in FIELDS}
    return table


# -- command line ----------------------------------------------------------------

def _load_config_file(path: str) -> dict:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values

_CONFIG_PARSERS = {
    "problem": str, "method": str, "n_cells": int, "sgh_mode": str,
    "cch_solver": str, "cfl": float, "dt_init": float, "dt_max": float,
    "dt_growth": float, "t_end": float, "out": str,
    "snapshot_times": lambda s: tuple(float(v) for v in s.split(",") if v.strip()),
}


def _config_from_sources(file_path: str | None, overrides: dict) -> RunConfig:
    values: dict = {}
    if file_path:
        raw = _load_config_file(file_path)
        for key, text in raw.items():
            if key not in _CONFIG_PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                values[key] = _CONFIG_PARSERS[key](text)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {text!r}") from exc
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "problem" not in values:
        raise ConfigError("no problem specified (flag --problem or config file)")
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


_MODE_ALIASES = {"predictor": "predictor_only", "pc": "predictor_corrector",
                 "predictor_only": "predictor_only",
                 "predictor_corrector": "predictor_corrector"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unihydro",
        description="1D Lagrangian compressible-flow solver (staggered-grid "
                    "and cell-centered methods)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--problem", help="problem name or @spec.json")
        p.add_argument("--method", choices=("sgh", "cch"))
        p.add_argument("--cfl", type=float)
        p.add_argument("--solver", choices=cch_mod.SOLVERS,
                       help="nodal solver for the cell-centered method")
        p.add_argument("--mode", choices=tuple(_MODE_ALIASES),
                       help="time integration mode for the staggered method")
        p.add_argument("--t-end", type=float, dest="t_end")
        p.add_argument("--dt-init", type=float, dest="dt_init")
        p.add_argument("--dt-max", type=float, dest="dt_max")
        p.add_argument("--dt-growth", type=float, dest="dt_growth")
        p.add_argument("--out", help="output directory")

    p_run = sub.add_parser("run", help="run a single simulation")
    add_common(p_run)
    p_run.add_argument("--cells", type=int, dest="n_cells")
    p_run.add_argument("--snapshots", help="comma-separated snapshot times")

    p_conv = sub.add_parser("converge", help="mesh-convergence study")
    add_common(p_conv)
    p_conv.add_argument("--cells", required=True,
                        help="comma-separated resolutions, e.g. 50,100,200")

    p_ref = sub.add_parser("reference", help="write a reference profile")
    p_ref.add_argument("--problem", required=True)
    p_ref.add_argument("--t", type=float, required=True)
    p_ref.add_argument("--points", type=int, required=True)
    p_ref.add_argument("--out", required=True, help="output csv file")
    return parser


def _overrides_from_args(args) -> dict:
    overrides = {
        "problem": args.problem,
        "method": args.method,
        "cfl": args.cfl,
        "cch_solver": args.solver,
        "sgh_mode": _MODE_ALIASES[args.mode] if args.mode else None,
        "t_end": args.t_end,
        "dt_init": args.dt_init,
        "dt_max": args.dt_max,
        "dt_growth": args.dt_growth,
        "out": args.out,
    }
    if getattr(args, "n_cells", None) is not None:
        overrides["n_cells"] = args.n_cells
    if getattr(args, "snapshots", None):
        overrides["snapshot_times"] = tuple(
            float(v) for v in args.snapshots.split(",") if v.strip())
    return overrides


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = _config_from_sources(args.config, _overrides_from_args(args))
            result = run(config)
            led = result.ledger
            print(f"{result.problem.name} {config.method} N={config.n_cells}: "
                  f"{result.steps} steps to t={result.t_final:.9g} "
                  f"in {result.wall_time:.3f}s; "
                  f"momentum residual {led.momentum_residual_rel:.2e}, "
                  f"energy residual {led.energy_residual_rel:.2e}")
            return 0
        if args.command == "converge":
            config = _config_from_sources(args.config, _overrides_from_args(args))
            n_list = [int(v) for v in args.cells.split(",") if v.strip()]
            table = run_convergence(config, n_list)
            text = table.format()
            print(text, end="")
            if config.out:
                import os
                os.makedirs(config.out, exist_ok=True)
                path = os.path.join(config.out,
                                    f"{table.problem}_{table.method}_convergence.csv")
                with open(path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)
            return 0
        # reference
        problem = resolve_problem(args.problem)
        x = np.linspace(problem.domain[0], problem.domain[1], args.points)
        ref = problems_mod.sample_reference(problem, x, args.t)
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x,rho,u,p,eps\n")
            for row in zip(x, ref["rho"], ref["u"], ref["p"], ref["eps"]):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except MeshTangled as exc:
        print(f"mesh tangling: {exc}", file=sys.stderr)
        return 2
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


def console_main():  # pragma: no cover - thin wrapper
    sys.exit(main())
