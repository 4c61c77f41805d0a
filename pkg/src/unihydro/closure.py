"""Pressure-velocity closure shared by the staggered and cell-centered methods.

A quadratic Taylor expansion of the pressure in the specific-volume change
(valid to third order on both the shock adiabat and the isentrope) is turned
into a pressure-velocity relation through the sound-crossing time of a cell.
For the staggered method this yields a per-cell star pressure with a
linear-plus-quadratic compression term; for the cell-centered method a nodal
force balance gives either a linear (acoustic) solve or a quadratic solve with
an admissibility test and acoustic fallback.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import ThermoState

__all__ = [
    "CellFace", "NodalSolution",
    "taylor_pressure", "sgh_star_pressure", "cch_acoustic", "cch_quadratic",
]

ACOUSTIC = 0
QUADRATIC = 1


@dataclass(frozen=True)
class CellFace:
    """Cell state seen by a node: density, sound speed, pressure, velocity."""

    rho: float
    c: float
    p: float
    u: float

    def __post_init__(self):
        if not (self.rho > 0.0 and self.c > 0.0):
            raise ValueError(f"cell face needs rho > 0 and c > 0, got {self}")


@dataclass(frozen=True)
class NodalSolution:
    """Star velocity and the star pressure as seen from each adjacent cell.

    The two pressures agree exactly for the acoustic solve and up to
    root-finder error when the quadratic branch is accepted.
    """

    u_star: float
    p_star_left: float
    p_star_right: float
    order: str  # "acoustic" or "quadratic"

    @property
    def p_star(self) -> float:
        return 0.5 * (self.p_star_left + self.p_star_right)


def taylor_pressure(delta_tau, ref: ThermoState, gamma: float):
    """Quadratic expansion of pressure in the specific-volume change.

    p = P0 - rho0^2 c0^2 dtau + ((gamma+1)/2) rho0^3 c0^2 dtau^2
    """
    dtau = np.asarray(delta_tau, dtype=float)
    rho0 = ref.rho
    lin = rho0 * rho0 * ref.c * ref.c
    quad = 0.5 * (gamma + 1.0) * rho0 ** 3 * ref.c * ref.c
    return ref.p - lin * dtau + quad * dtau * dtau


def sgh_star_pressure(rho, c, p, du, gamma: float):
    """Star pressure of a cell with velocity jump du across it.

    Compression (du < 0) follows the quadratic expansion expressed through
    du = rho c dtau; expansion and uniform flow keep the cell pressure, which
    makes smooth-flow entropy production exactly zero.
    """
    rho = np.asarray(rho, dtype=float)
    c = np.asarray(c, dtype=float)
    p = np.asarray(p, dtype=float)
    du = np.asarray(du, dtype=float)
    compressed = p - rho * c * du + 0.5 * (gamma + 1.0) * rho * du * du
    return np.where(du < 0.0, compressed, p)


def _acoustic_kernel(rl, cl, pl, ul, rr, cr, pr, ur):
    """Impedance-weighted star state from the linear one-sided relations.

    Perturbation form of u* = (zl ul + zr ur + pl - pr)/(zl + zr) and of the
    matching star pressure: exact (no rounding) for identical inputs, and
    bitwise symmetric under a mirror swap of the two sides.
    """
    zl = rl * cl
    zr = rr * cr
    zsum = zl + zr
    u_star = 0.5 * (ul + ur) + (0.5 * (zr - zl) * (ur - ul) + (pl - pr)) / zsum
    dl = u_star - ul
    dr = u_star - ur
    p_star = 0.5 * ((pl - zl * dl) + (pr + zr * dr))
    return u_star, p_star


def _quadratic_kernel(rl, cl, pl, ul, rr, cr, pr, ur, gamma, u_ac, p_ac):
    """Quadratic nodal force balance with admissibility test.

    Returns (u_star, p_star_left_side, p_star_right_side, accepted_mask);
    rejected entries carry the acoustic fallback values.
    """
    k = 0.5 * (gamma + 1.0)
    zl = rl * cl
    zr = rr * cr
    A = k * (rl - rr)
    B = -((gamma + 1.0) * (rl * ul - rr * ur) + zl + zr)
    C = k * (rl * ul * ul - rr * ur * ur) + (pl - pr) + zl * ul + zr * ur
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B)) and np.all(np.isfinite(C))):
        raise FloatingPointError("non-finite nodal force-balance coefficients")

    tol_a = 1e-12 * k * np.maximum(rl, rr)
    linear = np.abs(A) < tol_a
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = B * B - 4.0 * A * C
        sq = np.sqrt(np.where(disc > 0.0, disc, 0.0))
        # numerically stable quadratic roots
        q = -0.5 * (B + np.where(B >= 0.0, 1.0, -1.0) * sq)
        safe_a = np.where(A != 0.0, A, 1.0)
        safe_q = np.where(q != 0.0, q, 1.0)
        root_a = np.where(A != 0.0, q / safe_a, np.inf)
        root_b = np.where(q != 0.0, C / safe_q, np.inf)
        safe_b = np.where(B != 0.0, B, 1.0)
        u_lin = np.where(B != 0.0, -C / safe_b, np.nan)

    picked = np.where(np.abs(root_a - u_ac) <= np.abs(root_b - u_ac), root_a, root_b)
    u_try = np.where(linear, u_lin, picked)
    solvable = np.where(linear, B != 0.0, disc > 0.0) & np.isfinite(u_try)

    dl = u_try - ul
    dr = u_try - ur
    admissible = ((zl * dl * dl >= k * rl * np.abs(dl) ** 3)
                  & (zr * dr * dr >= k * rr * np.abs(dr) ** 3))
    accepted = solvable & admissible

    u_star = np.where(accepted, u_try, u_ac)
    dl = u_star - ul
    dr = u_star - ur
    ps_left = np.where(accepted, pl - zl * dl + k * rl * dl * dl, p_ac)
    ps_right = np.where(accepted, pr + zr * dr + k * rr * dr * dr, p_ac)
    return u_star, ps_left, ps_right, accepted


def cch_acoustic(left: CellFace, right: CellFace) -> NodalSolution:
    """Linear nodal solve: force balance of the one-sided acoustic relations."""
    u_star, p_star = _acoustic_kernel(left.rho, left.c, left.p, left.u,
                                      right.rho, right.c, right.p, right.u)
    return NodalSolution(float(u_star), float(p_star), float(p_star), "acoustic")


def cch_quadratic(left: CellFace, right: CellFace, gamma: float,
                  fallback: NodalSolution) -> NodalSolution:
    """Quadratic nodal solve; falls back to the supplied acoustic solution.

    The root closest to the acoustic velocity is kept only when the
    discriminant is positive and both one-sided admissibility bounds
    z (u*-u)^2 >= ((gamma+1)/2) rho |u*-u|^3 hold.
    """
    u_star, psl, psr, accepted = _quadratic_kernel(
        left.rho, left.c, left.p, left.u,
        right.rho, right.c, right.p, right.u,
        gamma, fallback.u_star, fallback.p_star)
    order = "quadratic" if bool(accepted) else "acoustic"
    return NodalSolution(float(u_star), float(psl), float(psr), order)
