"""Benchmark problem definitions, boundary conditions, and reference solutions.

Six standard compressible-flow tests (Sod, Lax, double rarefaction, planar
blast wave, shock/density-wave interaction, LeBlanc) plus an exact Riemann
reference for the pure Riemann problems and a high-resolution self-reference
for the rest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import mesh as mesh_mod
from . import riemann
from .eos import IdealGas

__all__ = [
    "BoundaryCondition", "Region", "ProblemSpec",
    "sod", "lax", "double_rarefaction", "sedov", "shu_osher", "leblanc",
    "by_name", "PROBLEM_NAMES", "build_initial",
    "exact_riemann_star", "sample_reference",
]

_BC_KINDS = ("transmissive", "wall", "prescribed_velocity", "prescribed_pressure")

# whitelist for density expressions in problem definitions / config files
_EXPR_NAMES = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "abs": np.abs,
               "sqrt": np.sqrt, "pi": np.pi}


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary treatment: transmissive, wall, or prescribed velocity/pressure."""

    kind: str
    value: float | None = None

    def __post_init__(self):
        if self.kind not in _BC_KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind.startswith("prescribed"):
            if self.value is None or not np.isfinite(self.value):
                raise ValueError(f"{self.kind} needs a finite value")

    @classmethod
    def transmissive(cls):
        return cls("transmissive")

    @classmethod
    def wall(cls):
        return cls("wall")

    @classmethod
    def prescribed_velocity(cls, u: float):
        return cls("prescribed_velocity", float(u))

    @classmethod
    def prescribed_pressure(cls, p: float):
        return cls("prescribed_pressure", float(p))


@dataclass(frozen=True)
class Region:
    """Piecewise initial data on [x_lo, x_hi): constant, except that the
    density may be an expression of x (e.g. "1 + 0.2*sin(5*x)")."""

    x_lo: float
    x_hi: float
    rho: float
    u: float
    p: float | None = None
    e: float | None = None        # specific internal energy, alternative to p
    rho_expr: str | None = None

    def __post_init__(self):
        if (self.p is None) == (self.e is None):
            raise ValueError("region needs exactly one of p or e")

    def density(self, x: np.ndarray) -> np.ndarray:
        if self.rho_expr is None:
            return np.full_like(x, self.rho, dtype=float)
        return np.asarray(eval(self.rho_expr, {"__builtins__": {}},
                               dict(_EXPR_NAMES, x=x)), dtype=float)

    def pressure(self, rho: np.ndarray, gamma: float) -> np.ndarray:
        if self.p is not None:
            return np.full_like(rho, self.p, dtype=float)
        return (gamma - 1.0) * rho * self.e


@dataclass(frozen=True)
class ProblemSpec:
    """A complete benchmark definition, serializable to/from plain JSON."""

    name: str
    domain: tuple[float, float]
    t_end: float
    gamma: float
    regions: tuple[Region, ...]
    bc_left: BoundaryCondition
    bc_right: BoundaryCondition
    reference: str                       # "exact_riemann" or "self_converged"
    center_energy: float | None = None   # total energy deposited at the center

    def __post_init__(self):
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")
        if self.reference not in ("exact_riemann", "self_converged"):
            raise ValueError(f"unknown reference kind {self.reference!r}")
        lo, hi = self.domain
        if not (self.regions and self.regions[0].x_lo == lo
                and self.regions[-1].x_hi == hi):
            raise ValueError("regions must tile the domain")
        for a, b in zip(self.regions[:-1], self.regions[1:]):
            if a.x_hi != b.x_lo:
                raise ValueError("regions must tile the domain without gaps")

    # -- initial data sampling ---------------------------------------------

    def _region_index(self, x: np.ndarray) -> np.ndarray:
        edges = np.array([r.x_lo for r in self.regions[1:]])
        return np.searchsorted(edges, x, side="right")

    def primitives_at(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Pointwise (rho, u, p); membership is [x_lo, x_hi), last region closed."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = self._region_index(x)
        rho = np.empty_like(x)
        u = np.empty_like(x)
        p = np.empty_like(x)
        for i, region in enumerate(self.regions):
            m = idx == i
            if not np.any(m):
                continue
            rho[m] = region.density(x[m])
            u[m] = region.u
            p[m] = region.pressure(rho[m], self.gamma)
        return rho, u, p

    def velocity_at_nodes(self, xn: np.ndarray) -> np.ndarray:
        """Node velocities; a node sitting exactly on a region interface takes
        the average of the two adjacent region velocities."""
        u = self.primitives_at(xn)[1]
        width = self.domain[1] - self.domain[0]
        for left, right in zip(self.regions[:-1], self.regions[1:]):
            on_edge = np.abs(xn - left.x_hi) <= 1e-12 * width
            u[on_edge] = 0.5 * (left.u + right.u)
        return u

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "domain": list(self.domain),
            "t_end": self.t_end,
            "gamma": self.gamma,
            "regions": [{k: v for k, v in vars(r).items() if v is not None}
                        for r in self.regions],
            "bc_left": {"kind": self.bc_left.kind, "value": self.bc_left.value},
            "bc_right": {"kind": self.bc_right.kind, "value": self.bc_right.value},
            "reference": self.reference,
            "center_energy": self.center_energy,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemSpec":
        return cls(
            name=d["name"],
            domain=tuple(d["domain"]),
            t_end=d["t_end"],
            gamma=d["gamma"],
            regions=tuple(Region(**r) for r in d["regions"]),
            bc_left=BoundaryCondition(**d["bc_left"]),
            bc_right=BoundaryCondition(**d["bc_right"]),
            reference=d["reference"],
            center_energy=d.get("center_energy"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ProblemSpec":
        return cls.from_dict(json.loads(text))


# -- the six benchmarks -----------------------------------------------------

def sod() -> ProblemSpec:
    """Mild shock tube: right shock, contact, left rarefaction."""
    return ProblemSpec(
        name="sod", domain=(0.0, 1.0), t_end=0.2, gamma=1.4,
        regions=(Region(0.0, 0.5, rho=1.0, u=0.0, p=1.0),
                 Region(0.5, 1.0, rho=0.125, u=0.0, p=0.1)),
        bc_left=BoundaryCondition.transmissive(),
        bc_right=BoundaryCondition.transmissive(),
        reference="exact_riemann")


def lax() -> ProblemSpec:
    """Shock tube with a large contact jump."""
    return ProblemSpec(
        name="lax", domain=(0.0, 1.0), t_end=0.16, gamma=1.4,
        regions=(Region(0.0, 0.5, rho=0.445, u=0.698, p=3.528),
                 Region(0.5, 1.0, rho=0.5, u=0.0, p=0.571)),
        bc_left=BoundaryCondition.transmissive(),
        bc_right=BoundaryCondition.transmissive(),
        reference="exact_riemann")


def double_rarefaction() -> ProblemSpec:
    """Two outward rarefactions leaving a near-vacuum center."""
    return ProblemSpec(
        name="double_rarefaction", domain=(0.0, 1.0), t_end=0.15, gamma=1.4,
        regions=(Region(0.0, 0.5, rho=1.0, u=-2.0, p=0.4),
                 Region(0.5, 1.0, rho=1.0, u=2.0, p=0.4)),
        bc_left=BoundaryCondition.prescribed_velocity(-2.0),
        bc_right=BoundaryCondition.prescribed_velocity(2.0),
        reference="exact_riemann")


def sedov() -> ProblemSpec:
    """Planar blast wave: a huge energy deposit in the center cell(s)."""
    return ProblemSpec(
        name="sedov", domain=(-2.0, 2.0), t_end=0.001, gamma=1.4,
        regions=(Region(-2.0, 2.0, rho=1.0, u=0.0, e=1e-12),),
        bc_left=BoundaryCondition.transmissive(),
        bc_right=BoundaryCondition.transmissive(),
        reference="self_converged",
        center_energy=3.2e6)


def shu_osher() -> ProblemSpec:
    """A strong shock running into a sinusoidal density field."""
    return ProblemSpec(
        name="shu_osher", domain=(-5.0, 5.0), t_end=1.8, gamma=1.4,
        regions=(Region(-5.0, -4.0, rho=3.857143, u=2.629369, p=10.333333),
                 Region(-4.0, 5.0, rho=1.0, u=0.0, p=1.0,
                        rho_expr="1 + 0.2*sin(5*x)")),
        bc_left=BoundaryCondition.transmissive(),
        bc_right=BoundaryCondition.transmissive(),
        reference="self_converged")


def leblanc() -> ProblemSpec:
    """Extreme shock tube: strong left rarefaction, huge contact, right shock."""
    return ProblemSpec(
        name="leblanc", domain=(0.0, 9.0), t_end=6.0, gamma=5.0 / 3.0,
        regions=(Region(0.0, 3.0, rho=1.0, u=0.0, p=2.0 / 3.0 * 1e-1),
                 Region(3.0, 9.0, rho=1e-3, u=0.0, p=2.0 / 3.0 * 1e-10)),
        bc_left=BoundaryCondition.transmissive(),
        bc_right=BoundaryCondition.transmissive(),
        reference="exact_riemann")


_REGISTRY = {
    "sod": sod, "lax": lax, "double_rarefaction": double_rarefaction,
    "sedov": sedov, "shu_osher": shu_osher, "leblanc": leblanc,
}
PROBLEM_NAMES = tuple(_REGISTRY)


def by_name(name: str) -> ProblemSpec:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; known: {PROBLEM_NAMES}") from None


# -- initial state construction ----------------------------------------------

def build_initial(problem: ProblemSpec, n_cells: int, method: str):
    """Mesh and initial state for a problem, including the center deposit.

    For an even cell count the deposit is split over the two central cells so
    mirror-symmetric data stays exactly symmetric.
    """
    gas = IdealGas(problem.gamma)
    grid, state = mesh_mod.build(problem.domain, n_cells, problem.primitives_at,
                                 kind=method, gas=gas)
    if method == "sgh":
        state.node_u[:] = problem.velocity_at_nodes(grid.node_x)

    if problem.center_energy is not None:
        if n_cells % 2 == 0:
            targets = (n_cells // 2 - 1, n_cells // 2)
        else:
            targets = (n_cells // 2,)
        share = problem.center_energy / len(targets)
        for j in targets:
            state.eps[j] = share / grid.cell_mass[j]
        state.p[:] = gas.pressure(state.rho, state.eps)
        state.c[:] = gas.sound_speed(state.rho, state.p)
        if method == "cch":
            state.E[:] = state.eps + 0.5 * state.u ** 2
    return grid, state


# -- reference solutions ------------------------------------------------------

def exact_riemann_star(left, right, gamma: float) -> riemann.RiemannSolution:
    """Exact star state for primitive (rho, u, p) triples.

    The result unpacks as ``p_star, u_star = exact_riemann_star(...)`` and
    carries the vacuum flag and sampling methods.
    """
    lstate = left if isinstance(left, riemann.PrimitiveState) else riemann.PrimitiveState(*left)
    rstate = right if isinstance(right, riemann.PrimitiveState) else riemann.PrimitiveState(*right)
    return riemann.solve(lstate, rstate, gamma)


def _riemann_solution(problem: ProblemSpec) -> tuple[float, riemann.RiemannSolution]:
    if len(problem.regions) != 2:
        raise ValueError(f"{problem.name}: not a two-state Riemann problem")
    lreg, rreg = problem.regions
    x0 = lreg.x_hi
    left = riemann.PrimitiveState(lreg.rho, lreg.u, float(lreg.pressure(np.array([lreg.rho]), problem.gamma)[0]))
    right = riemann.PrimitiveState(rreg.rho, rreg.u, float(rreg.pressure(np.array([rreg.rho]), problem.gamma)[0]))
    return x0, riemann.solve(left, right, problem.gamma)


def _self_reference_run(problem: ProblemSpec, t: float, n_reference: int):
    """High-resolution cell-centered run used as a converged reference."""
    from . import cli  # deferred: cli imports this module

    config = cli.RunConfig(problem=problem, method="cch", cch_solver="quadratic",
                           n_cells=n_reference, t_end=t)
    result = cli.run(config)
    centers = result.mesh.cell_centers
    s = result.state
    return centers, {"rho": s.rho, "u": s.u, "p": s.p, "eps": s.eps}


def sample_reference(problem: ProblemSpec, x_points, t: float,
                     n_reference: int = 3200) -> dict[str, np.ndarray]:
    """Reference primitive profiles (rho, u, p, eps) at the given positions."""
    x = np.atleast_1d(np.asarray(x_points, dtype=float))
    if t > problem.t_end * (1.0 + 1e-12):
        raise ValueError(f"t={t} beyond problem t_end={problem.t_end}")
    gamma = problem.gamma
    if t <= 0.0:
        rho, u, p = problem.primitives_at(x)
    elif problem.reference == "exact_riemann":
        x0, solution = _riemann_solution(problem)
        rho, u, p = solution.sample((x - x0) / t)
    elif problem.reference == "self_converged":
        centers, fields = _self_reference_run(problem, t, n_reference)
        rho = np.interp(x, centers, fields["rho"])
        u = np.interp(x, centers, fields["u"])
        p = np.interp(x, centers, fields["p"])
    else:  # pragma: no cover - enum checked at construction
        raise ValueError(f"unsupported reference {problem.reference!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        eps = np.where(rho > 0.0, p / ((gamma - 1.0) * np.where(rho > 0.0, rho, 1.0)), 0.0)
    return {"rho": rho, "u": u, "p": p, "eps": eps}
