"""Runtime audits: conservation ledger, entropy monitoring, error norms.

The steppers report their boundary fluxes each step; the ledger checks that
total momentum and energy drift only by the accumulated boundary impulse and
work, and that total mass never changes at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import CchState, Mesh1D, SghState

__all__ = [
    "BoundaryFlux", "ConservationLedger", "EntropyMonitor",
    "totals", "audit_step",
    "entropy_production_sgh", "entropy_production_cch",
    "l1_error", "convergence_order", "crossing_position", "count_extrema",
]

ENTROPY_TOL = 1e-12


@dataclass(frozen=True)
class BoundaryFlux:
    """Signed per-step contributions of the two boundaries to the totals."""

    impulse_left: float = 0.0
    impulse_right: float = 0.0
    work_left: float = 0.0
    work_right: float = 0.0


def totals(mesh: Mesh1D, state) -> tuple[float, float, float]:
    """(mass, momentum, total energy) of a state on its mesh."""
    mass = float(np.sum(mesh.cell_mass))
    if isinstance(state, SghState):
        return mass, state.total_momentum(mesh), state.total_energy(mesh)
    if isinstance(state, CchState):
        return mass, state.total_momentum(mesh), state.total_energy(mesh)
    raise TypeError(f"unknown state type {type(state).__name__}")


@dataclass
class ConservationLedger:
    mass0: float
    momentum0: float
    energy0: float
    mass: float = 0.0
    momentum: float = 0.0
    energy: float = 0.0
    impulse_left: float = 0.0
    impulse_right: float = 0.0
    work_left: float = 0.0
    work_right: float = 0.0
    momentum_scale: float = 0.0
    energy_scale: float = 0.0
    steps: int = 0
    violations: list = field(default_factory=list)
    tolerance: float = 1e-9

    @classmethod
    def open(cls, mesh: Mesh1D, state) -> "ConservationLedger":
        m, p, e = totals(mesh, state)
        ledger = cls(mass0=m, momentum0=p, energy0=e, mass=m, momentum=p, energy=e)
        ledger._update_scales(mesh, state)
        return ledger

    def _update_scales(self, mesh: Mesh1D, state):
        u = state.node_u if isinstance(state, SghState) else state.u
        mom = float(np.sum(mesh.cell_mass) * np.max(np.abs(u), initial=0.0))
        self.momentum_scale = max(self.momentum_scale, mom,
                                  abs(self.impulse_left) + abs(self.impulse_right))
        self.energy_scale = max(self.energy_scale, abs(self.energy),
                                abs(self.work_left) + abs(self.work_right))

    # -- residuals ----------------------------------------------------------

    @property
    def mass_drift(self) -> float:
        return self.mass - self.mass0

    @property
    def boundary_impulse(self) -> float:
        return self.impulse_left + self.impulse_right

    @property
    def boundary_work(self) -> float:
        return self.work_left + self.work_right

    @property
    def momentum_residual(self) -> float:
        return (self.momentum - self.momentum0) - self.boundary_impulse

    @property
    def energy_residual(self) -> float:
        return (self.energy - self.energy0) - self.boundary_work

    @property
    def momentum_residual_rel(self) -> float:
        return abs(self.momentum_residual) / max(self.momentum_scale, 1e-300)

    @property
    def energy_residual_rel(self) -> float:
        return abs(self.energy_residual) / max(self.energy_scale, 1e-300)


def audit_step(ledger: ConservationLedger, mesh: Mesh1D, state_before, state_after,
               boundary: BoundaryFlux, dt: float) -> ConservationLedger:
    """Fold one step into the ledger and record any tolerance violation."""
    n_after = len(state_after.rho)
    if n_after != mesh.n_cells:
        raise ValueError(f"state/mesh shape mismatch: {n_after} vs {mesh.n_cells}")
    ledger.impulse_left += boundary.impulse_left
    ledger.impulse_right += boundary.impulse_right
    ledger.work_left += boundary.work_left
    ledger.work_right += boundary.work_right
    ledger.mass, ledger.momentum, ledger.energy = totals(mesh, state_after)
    ledger.steps += 1
    ledger._update_scales(mesh, state_after)
    if (ledger.mass_drift != 0.0
            or ledger.momentum_residual_rel > ledger.tolerance
            or ledger.energy_residual_rel > ledger.tolerance):
        ledger.violations.append({
            "step": ledger.steps,
            "mass_drift": ledger.mass_drift,
            "momentum_residual_rel": ledger.momentum_residual_rel,
            "energy_residual_rel": ledger.energy_residual_rel,
        })
    return ledger


# -- entropy ------------------------------------------------------------------

def entropy_production_sgh(p, p_star, du):
    """Per-cell dissipation rate (P - P*)(u_right - u_left).

    Exactly zero wherever the velocity divergence is nonnegative, because the
    star pressure equals the cell pressure there.
    """
    return (np.asarray(p, float) - np.asarray(p_star, float)) * np.asarray(du, float)


def entropy_production_cch(p, u, u_star, p_star_right_side, p_star_left_side):
    """Per-cell dissipation rate from the two nodal star states.

    ``p_star_right_side[j]`` is the star pressure at node j as computed from
    the cell on its right; ``p_star_left_side[j]`` from the cell on its left.
    Each cell therefore pairs with the expressions written in its own state,
    for which the sign is guaranteed by the nodal admissibility test.
    """
    p = np.asarray(p, float)
    u = np.asarray(u, float)
    return ((p - p_star_right_side[:-1]) * (u - u_star[:-1])
            + (p - p_star_left_side[1:]) * (u_star[1:] - u))


class EntropyMonitor:
    """Tracks per-step entropy production and the ln(P tau^gamma) monitor."""

    def __init__(self, gamma: float, capture_history: bool = False):
        self.gamma = gamma
        self.capture_history = capture_history
        self.history: list[np.ndarray] = []
        self.worst_normalized = 0.0
        self.violations = 0
        self.expansion_abs_max = 0.0
        self.steps = 0
        self.s_initial: np.ndarray | None = None

    @staticmethod
    def _monitor(p, rho, gamma):
        return np.log(p) - gamma * np.log(rho)

    def open(self, state):
        self.s_initial = self._monitor(state.p, state.rho, self.gamma)

    def monitor_values(self, state) -> np.ndarray:
        """ln(P tau^gamma), the ideal-gas entropy up to affine constants."""
        return self._monitor(state.p, state.rho, self.gamma)

    def update(self, production: np.ndarray, scale: np.ndarray,
               expansion_mask: np.ndarray | None = None):
        scale = np.asarray(scale, float)
        floor = -ENTROPY_TOL * scale
        bad = production < floor
        self.violations += int(np.count_nonzero(bad))
        with np.errstate(divide="ignore", invalid="ignore"):
            normalized = np.where(scale > 0.0, production / np.where(scale > 0.0, scale, 1.0), 0.0)
        worst = float(np.min(normalized, initial=0.0))
        self.worst_normalized = min(self.worst_normalized, worst)
        if expansion_mask is not None and np.any(expansion_mask):
            self.expansion_abs_max = max(
                self.expansion_abs_max,
                float(np.max(np.abs(production[expansion_mask]))))
        if self.capture_history:
            self.history.append(np.array(production, copy=True))
        self.steps += 1


# -- error norms and profile features ------------------------------------------

def l1_error(numerical, reference, cell_volumes) -> float:
    """Volume-weighted L1 difference, normalized by total volume."""
    q = np.asarray(numerical, float)
    r = np.asarray(reference, float)
    v = np.asarray(cell_volumes, float)
    return float(np.sum(v * np.abs(q - r)) / np.sum(v))


def convergence_order(n_values, errors) -> float:
    """Least-squares order: minus the slope of log(error) against log(N)."""
    n = np.asarray(n_values, float)
    e = np.asarray(errors, float)
    if np.any(e <= 0.0):
        raise ValueError("errors must be positive for a log-log fit")
    slope = np.polyfit(np.log(n), np.log(e), 1)[0]
    return float(-slope)


def crossing_position(x, q, level, window=None, which="last") -> float:
    """x where the profile crosses ``level``, linearly interpolated.

    ``window`` restricts the search to (x_lo, x_hi); ``which`` selects the
    first or last crossing.
    """
    x = np.asarray(x, float)
    q = np.asarray(q, float)
    if window is not None:
        m = (x >= window[0]) & (x <= window[1])
        x, q = x[m], q[m]
    d = q - level
    sign_change = d[:-1] * d[1:] <= 0.0
    idx = np.flatnonzero(sign_change & (d[:-1] != d[1:]))
    if len(idx) == 0:
        raise ValueError(f"profile never crosses level {level}")
    i = idx[-1] if which == "last" else idx[0]
    t = d[i] / (d[i] - d[i + 1])
    return float(x[i] + t * (x[i + 1] - x[i]))


def count_extrema(q, min_prominence: float) -> int:
    """Number of local maxima with at least the given prominence.

    Prominence of a peak is its height above the higher of the two minima
    separating it from taller terrain (or the array ends).
    """
    q = np.asarray(q, float)
    n = len(q)
    count = 0
    for i in range(1, n - 1):
        if not (q[i] > q[i - 1] and q[i] >= q[i + 1]):
            continue
        left_min = q[i]
        j = i - 1
        while j >= 0 and q[j] <= q[i]:
            left_min = min(left_min, q[j])
            j -= 1
        right_min = q[i]
        j = i + 1
        while j < n and q[j] <= q[i]:
            right_min = min(right_min, q[j])
            j += 1
        if q[i] - max(left_min, right_min) >= min_prominence:
            count += 1
    return count
