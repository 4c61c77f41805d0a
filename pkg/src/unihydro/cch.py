"""Cell-centered Lagrangian stepper.

Every node gets a single star velocity and star pressure from a force balance
of the two adjacent cells (acoustic or quadratic solver); a forward-Euler
update then advances momentum, total energy, and the node positions. Sharing
one star state per node is what makes the interior fluxes cancel exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closure
from . import mesh as mesh_mod
from .closure import ACOUSTIC, QUADRATIC, NodalSolution
from .diagnostics import BoundaryFlux, entropy_production_cch
from .eos import IdealGas
from .errors import SolverFailure
from .mesh import CchState, Mesh1D
from .problems import BoundaryCondition

__all__ = ["NodalField", "CchStepReport", "solve_all_nodes", "step"]

SOLVERS = ("acoustic", "quadratic")


@dataclass(eq=False)
class NodalField:
    """Star states for all N+1 nodes (struct of arrays)."""

    u_star: np.ndarray
    p_star_left: np.ndarray    # from the left cell's one-sided relation
    p_star_right: np.ndarray   # from the right cell's one-sided relation
    order: np.ndarray          # ACOUSTIC or QUADRATIC per node

    @property
    def p_star(self) -> np.ndarray:
        """Single nodal star pressure shared by both neighbors."""
        return 0.5 * (self.p_star_left + self.p_star_right)

    def solution(self, j: int) -> NodalSolution:
        return NodalSolution(float(self.u_star[j]), float(self.p_star_left[j]),
                             float(self.p_star_right[j]),
                             "quadratic" if self.order[j] == QUADRATIC else "acoustic")


@dataclass(frozen=True)
class CchStepReport:
    dt_used: float
    nodal: NodalField
    entropy_production: np.ndarray
    boundary: BoundaryFlux


def _one_sided_star(rho, c, p, u, u_star, gamma: float, side: str, solver: str):
    """Star pressure at a boundary node with a prescribed velocity.

    ``side`` says which side of the cell the node sits on. The quadratic form
    is kept only when the one-sided admissibility bound holds, so the
    boundary entropy contribution stays nonnegative.
    """
    z = rho * c
    d = u_star - u
    sgn = 1.0 if side == "left" else -1.0
    linear = p + sgn * z * d
    if solver == "acoustic":
        return linear, ACOUSTIC
    k = 0.5 * (gamma + 1.0)
    if z * d * d >= k * rho * abs(d) ** 3:
        return linear + k * rho * d * d, QUADRATIC
    return linear, ACOUSTIC


def _boundary_node(bc: BoundaryCondition, rho, c, p, u, gamma: float,
                   solver: str, side: str):
    """(u_star, ps_left, ps_right, order) for one boundary node."""
    if bc.kind == "transmissive":
        # identical ghost state: the star state is the cell state exactly
        return u, p, p, ACOUSTIC
    if bc.kind == "wall" or bc.kind == "prescribed_velocity":
        ub = 0.0 if bc.kind == "wall" else float(bc.value)
        ps, order = _one_sided_star(rho, c, p, u, ub, gamma, side, solver)
        return ub, ps, ps, order
    # prescribed pressure: invert the linear one-sided relation for u*
    z = rho * c
    sgn = 1.0 if side == "left" else -1.0
    ub = u + sgn * (float(bc.value) - p) / z
    return ub, float(bc.value), float(bc.value), ACOUSTIC


def solve_all_nodes(state: CchState, gas: IdealGas, bc_left: BoundaryCondition,
                    bc_right: BoundaryCondition, solver: str = "quadratic") -> NodalField:
    """Star states at every node: force-balance solve inside, boundary rules
    at the two ends."""
    if solver not in SOLVERS:
        raise ValueError(f"unknown nodal solver {solver!r}; expected one of {SOLVERS}")
    n_nodes = len(state.rho) + 1
    u_star = np.empty(n_nodes)
    psl = np.empty(n_nodes)
    psr = np.empty(n_nodes)
    order = np.zeros(n_nodes, dtype=np.int8)

    rl, cl, pl, ul = state.rho[:-1], state.c[:-1], state.p[:-1], state.u[:-1]
    rr, cr, pr, ur = state.rho[1:], state.c[1:], state.p[1:], state.u[1:]
    u_ac, p_ac = closure._acoustic_kernel(rl, cl, pl, ul, rr, cr, pr, ur)
    if solver == "acoustic":
        u_star[1:-1] = u_ac
        psl[1:-1] = p_ac
        psr[1:-1] = p_ac
    else:
        u_q, ps_l, ps_r, accepted = closure._quadratic_kernel(
            rl, cl, pl, ul, rr, cr, pr, ur, gas.gamma, u_ac, p_ac)
        u_star[1:-1] = u_q
        psl[1:-1] = ps_l
        psr[1:-1] = ps_r
        order[1:-1] = np.where(accepted, QUADRATIC, ACOUSTIC)

    u_star[0], psl[0], psr[0], order[0] = _boundary_node(
        bc_left, state.rho[0], state.c[0], state.p[0], state.u[0],
        gas.gamma, solver, side="left")
    u_star[-1], psl[-1], psr[-1], order[-1] = _boundary_node(
        bc_right, state.rho[-1], state.c[-1], state.p[-1], state.u[-1],
        gas.gamma, solver, side="right")
    return NodalField(u_star, psl, psr, order)


def step(state: CchState, mesh: Mesh1D, gas: IdealGas, dt: float,
         bc_left: BoundaryCondition, bc_right: BoundaryCondition,
         solver: str = "quadratic"):
    """One forward-Euler step of the conservative update."""
    nodal = solve_all_nodes(state, gas, bc_left, bc_right, solver)
    ps = nodal.p_star
    us = nodal.u_star
    m = mesh.cell_mass

    u_new = state.u + (dt / m) * (ps[:-1] - ps[1:])
    E_new = state.E + (dt / m) * (ps[:-1] * us[:-1] - ps[1:] * us[1:])
    new_mesh = mesh_mod.update_geometry(mesh, us, dt)
    rho_new = m / new_mesh.cell_volumes
    eps_new = E_new - 0.5 * u_new ** 2

    if not np.all(np.isfinite(eps_new)):
        raise SolverFailure("non-finite internal energy",
                            cell=int(np.argmin(np.isfinite(eps_new))))
    if np.any(eps_new <= 0.0):
        raise SolverFailure("nonpositive internal energy",
                            cell=int(np.argmin(eps_new)))

    p_new = np.asarray(gas.pressure(rho_new, eps_new))
    c_new = np.asarray(gas.sound_speed(rho_new, p_new))
    new_state = CchState(rho_new, u_new, E_new, eps_new, p_new, c_new)

    production = entropy_production_cch(state.p, state.u, us,
                                        nodal.p_star_right, nodal.p_star_left)
    flux = BoundaryFlux(impulse_left=dt * ps[0], impulse_right=-dt * ps[-1],
                        work_left=dt * ps[0] * us[0], work_right=-dt * ps[-1] * us[-1])
    report = CchStepReport(dt, nodal, production, flux)
    return new_mesh, new_state, report
