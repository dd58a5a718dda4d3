"""Exact Riemann solver for two stiffened gases meeting at an interface.

Each side carries its own (gamma, B).  In the shifted pressure q = P + B a
stiffened gas has ideal-gas sound speed, enthalpy, isentrope, and shock
relations, and the left and right waves never cross the contact, so the
classical single-gas wave functions apply side by side with q in place of P.
The contact matches P and u, not q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


@dataclass(frozen=True)
class RiemannState:
    """One half of a Riemann initial condition, primitive variables."""

    rho: float
    u: float
    P: float
    gamma: float
    B: float

    @property
    def q(self) -> float:
        return self.P + self.B

    @property
    def c(self) -> float:
        return float(np.sqrt(self.gamma * self.q / self.rho))

    def validate(self) -> None:
        if self.rho <= 0.0:
            raise ValueError("nonpositive density")
        if self.q <= 0.0:
            raise ValueError("nonpositive shifted pressure P + B")
        if self.gamma <= 1.0:
            raise ValueError("gamma must exceed 1")


def _wave_function(p: float, s: RiemannState) -> tuple[float, float]:
    """Velocity change across the wave on one side and its p-derivative.

    Shock branch for p > s.P, rarefaction branch otherwise, both expressed
    in the shifted pressure.
    """
    g = s.gamma
    q = p + s.B
    if p > s.P:
        a = 2.0 / ((g + 1.0) * s.rho)
        b = (g - 1.0) / (g + 1.0) * s.q
        root = np.sqrt(a / (q + b))
        f = (q - s.q) * root
        df = root * (1.0 - 0.5 * (q - s.q) / (q + b))
    else:
        f = 2.0 * s.c / (g - 1.0) * ((q / s.q) ** ((g - 1.0) / (2.0 * g)) - 1.0)
        df = (q / s.q) ** (-(g + 1.0) / (2.0 * g)) / (s.rho * s.c)
    return f, df


def _star_density(p: float, s: RiemannState) -> float:
    g = s.gamma
    r = (p + s.B) / s.q
    if p > s.P:
        m = (g - 1.0) / (g + 1.0)
        return s.rho * (r + m) / (m * r + 1.0)
    return s.rho * r ** (1.0 / g)


def star_state(left: RiemannState, right: RiemannState) -> tuple[float, float, float, float]:
    """Solve for the star region.

    Returns
    -------
    p_star, u_star, rho_star_left, rho_star_right
    """
    left.validate()
    right.validate()
    du = right.u - left.u

    def depression(p):
        return _wave_function(p, left)[0] + _wave_function(p, right)[0] + du

    # both shifted pressures must stay positive
    p_floor = max(-left.B, -right.B)
    scale = max(abs(left.P), abs(right.P), left.q, right.q)
    p_lo = p_floor + 1e-14 * (scale - p_floor)
    if depression(p_lo) >= 0.0:
        raise ValueError("vacuum forms between the states")
    p_hi = max(left.P, right.P) + scale
    for _ in range(200):
        if depression(p_hi) > 0.0:
            break
        p_hi = p_floor + 4.0 * (p_hi - p_floor)
    else:
        raise ValueError("failed to bracket the star pressure")
    p_star = brentq(depression, p_lo, p_hi, xtol=1e-30, rtol=4 * np.finfo(float).eps)
    u_star = 0.5 * (left.u + right.u) + 0.5 * (
        _wave_function(p_star, right)[0] - _wave_function(p_star, left)[0]
    )
    return p_star, u_star, _star_density(p_star, left), _star_density(p_star, right)


def sample(left: RiemannState, right: RiemannState, xi: np.ndarray):
    """Self-similar solution at speeds xi = x / t.

    Returns (rho, u, P, Y) arrays; Y is 1 on the left-material side of the
    contact and 0 on the right-material side.
    """
    xi = np.asarray(xi, dtype=float)
    p_star, u_star, rl_star, rr_star = star_state(left, right)
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    P = np.empty_like(xi)

    on_left = xi <= u_star
    Y = np.where(on_left, 1.0, 0.0)

    # left wave
    s = left
    g = s.gamma
    if p_star > s.P:
        sh = s.u - s.c * np.sqrt(
            (g + 1.0) / (2.0 * g) * (p_star + s.B) / s.q + (g - 1.0) / (2.0 * g)
        )
        pre = on_left & (xi < sh)
        post = on_left & ~pre
        rho[pre], u[pre], P[pre] = s.rho, s.u, s.P
        rho[post], u[post], P[post] = rl_star, u_star, p_star
    else:
        c_star = s.c * ((p_star + s.B) / s.q) ** ((g - 1.0) / (2.0 * g))
        head = s.u - s.c
        tail = u_star - c_star
        pre = on_left & (xi < head)
        fan = on_left & (xi >= head) & (xi < tail)
        post = on_left & (xi >= tail)
        rho[pre], u[pre], P[pre] = s.rho, s.u, s.P
        rho[post], u[post], P[post] = rl_star, u_star, p_star
        cf = 2.0 / (g + 1.0) * (s.c + 0.5 * (g - 1.0) * (s.u - xi[fan]))
        u[fan] = 2.0 / (g + 1.0) * (s.c + 0.5 * (g - 1.0) * s.u + xi[fan])
        rho[fan] = s.rho * (cf / s.c) ** (2.0 / (g - 1.0))
        P[fan] = s.q * (rho[fan] / s.rho) ** g - s.B

    # right wave, mirrored
    s = right
    g = s.gamma
    if p_star > s.P:
        sh = s.u + s.c * np.sqrt(
            (g + 1.0) / (2.0 * g) * (p_star + s.B) / s.q + (g - 1.0) / (2.0 * g)
        )
        pre = ~on_left & (xi > sh)
        post = ~on_left & ~pre
        rho[pre], u[pre], P[pre] = s.rho, s.u, s.P
        rho[post], u[post], P[post] = rr_star, u_star, p_star
    else:
        c_star = s.c * ((p_star + s.B) / s.q) ** ((g - 1.0) / (2.0 * g))
        head = s.u + s.c
        tail = u_star + c_star
        pre = ~on_left & (xi > head)
        fan = ~on_left & (xi <= head) & (xi > tail)
        post = ~on_left & (xi <= tail)
        rho[pre], u[pre], P[pre] = s.rho, s.u, s.P
        rho[post], u[post], P[post] = rr_star, u_star, p_star
        cf = 2.0 / (g + 1.0) * (s.c - 0.5 * (g - 1.0) * (s.u - xi[fan]))
        u[fan] = 2.0 / (g + 1.0) * (-s.c + 0.5 * (g - 1.0) * s.u + xi[fan])
        rho[fan] = s.rho * (cf / s.c) ** (2.0 / (g - 1.0))
        P[fan] = s.q * (rho[fan] / s.rho) ** g - s.B

    return rho, u, P, Y


def solution_at(left: RiemannState, right: RiemannState, x, t: float, x0: float = 0.0):
    """Exact solution at points x and time t > 0 for a jump initially at x0."""
    if t <= 0.0:
        raise ValueError("need t > 0 for the self-similar solution")
    return sample(left, right, (np.asarray(x, dtype=float) - x0) / t)
