"""Exact Riemann solver for the 1D Euler equations with an ideal gas.

Used only to build reference solutions; the time steppers never call it.
Newton iteration on the standard pressure function with a two-rarefaction
initial guess, explicit vacuum detection, and self-similar sampling of the
full wave fan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PrimitiveState", "RiemannSolution", "solve"]


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    u: float
    p: float

    def __post_init__(self):
        if not (self.rho > 0.0 and self.p >= 0.0):
            raise ValueError(f"invalid state {self}")

    def sound_speed(self, gamma: float) -> float:
        return np.sqrt(gamma * self.p / self.rho)


def _f_side(p, state: PrimitiveState, c, gamma):
    """Velocity change across the wave connecting ``state`` to pressure p."""
    if p > state.p:  # shock
        a = 2.0 / ((gamma + 1.0) * state.rho)
        b = (gamma - 1.0) / (gamma + 1.0) * state.p
        return (p - state.p) * np.sqrt(a / (p + b))
    # rarefaction
    return (2.0 * c / (gamma - 1.0)) * ((p / state.p) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)


def _df_side(p, state: PrimitiveState, c, gamma):
    if p > state.p:
        a = 2.0 / ((gamma + 1.0) * state.rho)
        b = (gamma - 1.0) / (gamma + 1.0) * state.p
        root = np.sqrt(a / (p + b))
        return root * (1.0 - 0.5 * (p - state.p) / (p + b))
    return (p / state.p) ** (-(gamma + 1.0) / (2.0 * gamma)) / (state.rho * c)


def _two_rarefaction_guess(left, right, cl, cr, gamma):
    z = (gamma - 1.0) / (2.0 * gamma)
    num = cl + cr - 0.5 * (gamma - 1.0) * (right.u - left.u)
    den = cl / left.p ** z + cr / right.p ** z
    return (num / den) ** (1.0 / z)


@dataclass(frozen=True)
class RiemannSolution:
    """Star state plus enough context to sample the self-similar solution."""

    left: PrimitiveState
    right: PrimitiveState
    gamma: float
    p_star: float
    u_star: float
    vacuum: bool
    residual: float
    iterations: int

    def __iter__(self):
        # allows: p_star, u_star = solution
        return iter((self.p_star, self.u_star))

    # -- sampling ---------------------------------------------------------

    def sample(self, xi):
        """Primitive profile (rho, u, p) at similarity coordinates xi = x/t."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        rho = np.empty_like(xi)
        u = np.empty_like(xi)
        p = np.empty_like(xi)
        for i, s in enumerate(xi):
            rho[i], u[i], p[i] = self._sample_one(float(s))
        return rho, u, p

    def _sample_one(self, s: float):
        g = self.gamma
        left, right = self.left, self.right
        cl = left.sound_speed(g)
        cr = right.sound_speed(g)
        if self.vacuum:
            return self._sample_vacuum(s, cl, cr)
        if s < self.u_star:
            return self._sample_side(s, left, cl, sign=+1.0)
        return self._sample_side(s, right, cr, sign=-1.0)

    def _sample_side(self, s, state, c, sign):
        """Sample left (sign=+1) or right (sign=-1) of the contact.

        Works in a mirrored frame where the wave always moves to the left;
        velocities are mirrored in and out with ``sign``.
        """
        g = self.gamma
        ps, us = self.p_star, self.u_star
        sr = sign * s
        ur = sign * state.u
        usr = sign * us
        if ps > state.p:  # shock wave
            ms = np.sqrt((g + 1.0) / (2.0 * g) * ps / state.p + (g - 1.0) / (2.0 * g))
            shock_speed = ur - c * ms
            if sr <= shock_speed:
                return state.rho, state.u, state.p
            rho_star = state.rho * ((ps / state.p + (g - 1.0) / (g + 1.0))
                                    / ((g - 1.0) / (g + 1.0) * ps / state.p + 1.0))
            return rho_star, us, ps
        # rarefaction fan between head and tail
        c_star = c * (ps / state.p) ** ((g - 1.0) / (2.0 * g))
        head = ur - c
        tail = usr - c_star
        if sr <= head:
            return state.rho, state.u, state.p
        if sr >= tail:
            rho_star = state.rho * (ps / state.p) ** (1.0 / g)
            return rho_star, us, ps
        cf = (2.0 / (g + 1.0)) * (c + 0.5 * (g - 1.0) * (ur - sr))
        uf = (2.0 / (g + 1.0)) * (c + 0.5 * (g - 1.0) * ur + sr)
        rho_f = state.rho * (cf / c) ** (2.0 / (g - 1.0))
        p_f = state.p * (cf / c) ** (2.0 * g / (g - 1.0))
        return rho_f, sign * uf, p_f

    def _sample_vacuum(self, s, cl, cr):
        g = self.gamma
        left, right = self.left, self.right
        s_head_l = left.u - cl
        s_tail_l = left.u + 2.0 * cl / (g - 1.0)   # vacuum front from the left
        s_head_r = right.u + cr
        s_tail_r = right.u - 2.0 * cr / (g - 1.0)  # vacuum front from the right
        if s <= s_head_l:
            return left.rho, left.u, left.p
        if s < s_tail_l:
            cf = (2.0 / (g + 1.0)) * (cl + 0.5 * (g - 1.0) * (left.u - s))
            uf = (2.0 / (g + 1.0)) * (cl + 0.5 * (g - 1.0) * left.u + s)
            return (left.rho * (cf / cl) ** (2.0 / (g - 1.0)), uf,
                    left.p * (cf / cl) ** (2.0 * g / (g - 1.0)))
        if s <= s_tail_r:
            return 0.0, 0.5 * (s_tail_l + s_tail_r), 0.0
        if s < s_head_r:
            cf = (2.0 / (g + 1.0)) * (cr - 0.5 * (g - 1.0) * (right.u - s))
            uf = (2.0 / (g + 1.0)) * (-cr + 0.5 * (g - 1.0) * right.u + s)
            return (right.rho * (cf / cr) ** (2.0 / (g - 1.0)), uf,
                    right.p * (cf / cr) ** (2.0 * g / (g - 1.0)))
        return right.rho, right.u, right.p


def solve(left: PrimitiveState, right: PrimitiveState, gamma: float,
          tol: float = 1e-12, max_iter: int = 100) -> RiemannSolution:
    """Exact star state of the Riemann problem (left | right).

    Raises RuntimeError with the residual if Newton fails to converge within
    ``max_iter`` iterations.
    """
    cl = left.sound_speed(gamma)
    cr = right.sound_speed(gamma)

    # vacuum generation: the two rarefactions separate completely
    if 2.0 * (cl + cr) / (gamma - 1.0) <= right.u - left.u:
        return RiemannSolution(left, right, gamma, p_star=0.0,
                               u_star=0.5 * (left.u + right.u), vacuum=True,
                               residual=0.0, iterations=0)

    du = right.u - left.u
    p = max(_two_rarefaction_guess(left, right, cl, cr, gamma), 1e-300)
    converged = False
    for it in range(1, max_iter + 1):
        f = _f_side(p, left, cl, gamma) + _f_side(p, right, cr, gamma) + du
        df = _df_side(p, left, cl, gamma) + _df_side(p, right, cr, gamma)
        step = f / df
        p_new = p - step
        if p_new <= 0.0:
            p_new = 0.5 * p  # keep the iterate positive
        change = abs(p_new - p) / max(p_new, 1e-300)
        p = p_new
        if change < max(tol, 1e-15):
            converged = True
            break
    f = _f_side(p, left, cl, gamma) + _f_side(p, right, cr, gamma) + du
    if not converged:
        raise RuntimeError(
            f"Riemann pressure iteration failed after {max_iter} iterations, "
            f"residual {abs(f):.3e}")
    u_star = 0.5 * (left.u + right.u) + 0.5 * (
        _f_side(p, right, cr, gamma) - _f_side(p, left, cl, gamma))
    return RiemannSolution(left, right, gamma, p_star=float(p), u_star=float(u_star),
                           vacuum=False, residual=float(abs(f)), iterations=it)
