"""1D Lagrangian grid: node coordinates and the frozen cell/node/sub-cell masses.

Masses are fixed at build time and shared (read-only) across all steps; density
is always recovered as mass / current volume, which conserves mass exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import IdealGas
from .errors import MeshTangled

__all__ = [
    "Mesh1D", "SghState", "CchState",
    "build", "cell_volume", "characteristic_time", "update_geometry",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(eq=False)
class Mesh1D:
    """Node positions plus constant Lagrangian masses.

    node_mass[j] = subcell_mass_right[j-1] + subcell_mass_left[j] for interior
    nodes; the boundary nodes carry a single sub-cell mass.
    """

    node_x: np.ndarray            # N+1 node positions
    cell_mass: np.ndarray         # N cell masses
    node_mass: np.ndarray         # N+1 dual-cell masses
    subcell_mass_left: np.ndarray   # N left sub-cell masses
    subcell_mass_right: np.ndarray  # N right sub-cell masses

    @property
    def n_cells(self) -> int:
        return len(self.cell_mass)

    @property
    def cell_volumes(self) -> np.ndarray:
        return self.node_x[1:] - self.node_x[:-1]

    @property
    def cell_centers(self) -> np.ndarray:
        return 0.5 * (self.node_x[:-1] + self.node_x[1:])

    def density(self) -> np.ndarray:
        """Cell density from frozen mass and current volume."""
        return self.cell_mass / self.cell_volumes

    def validate(self):
        if np.any(np.diff(self.node_x) <= 0.0):
            raise MeshTangled("tangled mesh: node ordering violated")
        for name in ("cell_mass", "node_mass", "subcell_mass_left", "subcell_mass_right"):
            if np.any(getattr(self, name) <= 0.0):
                raise ValueError(f"{name} must be strictly positive")

    def replace_nodes(self, node_x: np.ndarray) -> "Mesh1D":
        """New mesh with moved nodes; masses are shared, not copied."""
        return Mesh1D(np.asarray(node_x, dtype=float), self.cell_mass,
                      self.node_mass, self.subcell_mass_left, self.subcell_mass_right)

    @classmethod
    def from_nodes(cls, node_x, cell_rho=1.0) -> "Mesh1D":
        """Mesh with masses computed from a per-cell density (scalar or array)."""
        node_x = np.asarray(node_x, dtype=float)
        centers = 0.5 * (node_x[:-1] + node_x[1:])
        rho = np.broadcast_to(np.asarray(cell_rho, dtype=float), centers.shape)
        m_left = rho * (centers - node_x[:-1])
        m_right = rho * (node_x[1:] - centers)
        cell_mass = m_left + m_right
        node_mass = np.empty(len(node_x))
        node_mass[0] = m_left[0]
        node_mass[-1] = m_right[-1]
        node_mass[1:-1] = m_right[:-1] + m_left[1:]
        return cls(node_x, _frozen(cell_mass), _frozen(node_mass),
                   _frozen(m_left), _frozen(m_right))


@dataclass(eq=False)
class SghState:
    """Staggered fields: velocity at nodes, thermodynamics in cells."""

    node_u: np.ndarray  # N+1
    rho: np.ndarray     # N
    eps: np.ndarray     # N specific internal energy
    p: np.ndarray       # N
    c: np.ndarray       # N

    def copy(self) -> "SghState":
        return SghState(self.node_u.copy(), self.rho.copy(), self.eps.copy(),
                        self.p.copy(), self.c.copy())

    def total_momentum(self, mesh: Mesh1D) -> float:
        return float(np.sum(mesh.node_mass * self.node_u))

    def total_energy(self, mesh: Mesh1D) -> float:
        internal = np.sum(mesh.cell_mass * self.eps)
        kinetic = 0.5 * np.sum(mesh.node_mass * self.node_u ** 2)
        return float(internal + kinetic)


@dataclass(eq=False)
class CchState:
    """Cell-centered conserved fields; eps = E - u^2/2 is kept consistent."""

    rho: np.ndarray
    u: np.ndarray
    E: np.ndarray       # specific total energy
    eps: np.ndarray
    p: np.ndarray
    c: np.ndarray

    def copy(self) -> "CchState":
        return CchState(self.rho.copy(), self.u.copy(), self.E.copy(),
                        self.eps.copy(), self.p.copy(), self.c.copy())

    def total_momentum(self, mesh: Mesh1D) -> float:
        return float(np.sum(mesh.cell_mass * self.u))

    def total_energy(self, mesh: Mesh1D) -> float:
        return float(np.sum(mesh.cell_mass * self.E))


def _symmetric_linspace(a: float, b: float, n_points: int) -> np.ndarray:
    """Uniform nodes that are bitwise mirror-symmetric about the midpoint.

    Keeps mirror-symmetric problems exactly symmetric in floating point.
    """
    mid = 0.5 * (a + b)
    offsets = np.linspace(a, b, n_points) - mid
    return mid + 0.5 * (offsets - offsets[::-1])


def build(domain, n_cells: int, init, kind: str, gas: IdealGas):
    """Uniform mesh plus initial state from a pointwise primitive sampler.

    ``init(x) -> (rho, u, p)`` is evaluated at cell centers for thermodynamic
    fields and masses; for the staggered state the node velocities are sampled
    at node positions.
    """
    a, b = float(domain[0]), float(domain[1])
    if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
        raise ValueError(f"domain must be a nonempty interval, got ({a}, {b})")
    if n_cells < 2:
        raise ValueError(f"need at least 2 cells, got {n_cells}")
    if kind not in ("sgh", "cch"):
        raise ValueError(f"unknown state kind {kind!r}")

    node_x = _symmetric_linspace(a, b, n_cells + 1)
    centers = 0.5 * (node_x[:-1] + node_x[1:])
    rho_c, u_c, p_c = (np.broadcast_to(np.asarray(q, dtype=float), centers.shape).copy()
                       for q in init(centers))
    for name, q in (("rho", rho_c), ("u", u_c), ("p", p_c)):
        if not np.all(np.isfinite(q)):
            raise ValueError(f"non-finite initial {name}")
    if np.any(rho_c <= 0.0):
        raise ValueError("initial density must be positive")
    if np.any(p_c < 0.0):
        raise ValueError("initial pressure must be nonnegative")

    m_left = rho_c * (centers - node_x[:-1])
    m_right = rho_c * (node_x[1:] - centers)
    cell_mass = m_left + m_right
    node_mass = np.empty(n_cells + 1)
    node_mass[0] = m_left[0]
    node_mass[-1] = m_right[-1]
    node_mass[1:-1] = m_right[:-1] + m_left[1:]
    mesh = Mesh1D(node_x, _frozen(cell_mass), _frozen(node_mass),
                  _frozen(m_left), _frozen(m_right))
    mesh.validate()

    eps_c = np.asarray(gas.internal_energy(rho_c, p_c), dtype=float)
    c_c = np.asarray(gas.sound_speed(rho_c, p_c), dtype=float)
    if kind == "sgh":
        node_u = np.broadcast_to(np.asarray(init(node_x)[1], dtype=float),
                                 node_x.shape).copy()
        if not np.all(np.isfinite(node_u)):
            raise ValueError("non-finite initial node velocity")
        state = SghState(node_u, rho_c, eps_c, p_c, c_c)
    else:
        E = eps_c + 0.5 * u_c ** 2
        state = CchState(rho_c, u_c, E, eps_c, p_c, c_c)
    return mesh, state


def cell_volume(mesh: Mesh1D, j: int) -> float:
    """Volume of cell j; fatal on a degenerate or inverted cell."""
    if not 0 <= j < mesh.n_cells:
        raise IndexError(f"cell index {j} out of range")
    v = mesh.node_x[j + 1] - mesh.node_x[j]
    if v <= 0.0:
        raise MeshTangled("tangled mesh", cell=j)
    return float(v)


def characteristic_time(length, sound_speed):
    """Sound-crossing time l/c of a cell."""
    length = np.asarray(length, dtype=float)
    sound_speed = np.asarray(sound_speed, dtype=float)
    if np.any(length <= 0.0):
        raise ValueError("characteristic length must be positive")
    if np.any(sound_speed <= 0.0):
        raise ValueError("sound speed must be positive")
    return length / sound_speed


def update_geometry(mesh: Mesh1D, u_star: np.ndarray, dt: float) -> Mesh1D:
    """Move every node by its own star velocity; reject crossings."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    new_x = mesh.node_x + np.asarray(u_star, dtype=float) * dt
    if np.any(new_x[1:] - new_x[:-1] <= 0.0):
        bad = int(np.argmax(new_x[1:] - new_x[:-1] <= 0.0))
        raise MeshTangled("mesh tangling", cell=bad)
    return mesh.replace_nodes(new_x)
