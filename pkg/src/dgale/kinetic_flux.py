"""Kinetic half-moment numerical flux on a moving edge.

The flux is built in the edge-local frame moving with the grid: with unit
normal n, tangent s = (-n_y, n_x) and grid velocity xdot, the relative
velocity splits into ut = (u - xdot).n and vt = (u - xdot).s.  Half-moments
of a Maxwellian centered at ut (width set by the slower sound speed through
lam = min(1/c_L^2, 1/c_R^2)) weight the left and right traces: positive
particle velocities carry left-state quantities, negative ones right-state
quantities.  Pressure enters through explicit correction terms so the flux
is exactly consistent for equal traces at any lam.

All functions are vectorized over arbitrary leading shapes; one dimension
is the special case n = (+-1, 0), v = vg = 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

_SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class EdgeTrace:
    """Primitive traces and frame data at edge quadrature points.

    rho, u, v, P, Y per side; nx, ny the unit normal out of the left side;
    ug, vg the grid velocity.  Arrays broadcast together.
    """

    rho_l: np.ndarray
    u_l: np.ndarray
    v_l: np.ndarray
    P_l: np.ndarray
    Y_l: np.ndarray
    rho_r: np.ndarray
    u_r: np.ndarray
    v_r: np.ndarray
    P_r: np.ndarray
    Y_r: np.ndarray
    nx: np.ndarray
    ny: np.ndarray
    ug: np.ndarray
    vg: np.ndarray


@dataclass(frozen=True)
class KineticMoments:
    u0p: np.ndarray  # in [0, 1]
    u0m: np.ndarray
    u1p: np.ndarray
    u1m: np.ndarray
    lam: np.ndarray


def kinetic_moments(ut_l, ut_r, c_l, c_r):
    """Half-moments of the edge Maxwellian from the two normal velocities."""
    ut_l = np.asarray(ut_l, dtype=float)
    ut_r = np.asarray(ut_r, dtype=float)
    c_l = np.asarray(c_l, dtype=float)
    c_r = np.asarray(c_r, dtype=float)
    for a in (ut_l, ut_r, c_l, c_r):
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite input to kinetic_moments")
    lam = np.minimum(1.0 / (c_l * c_l), 1.0 / (c_r * c_r))
    sq = np.sqrt(lam)
    u0p = 0.5 * erfc(-sq * ut_l)
    u0m = 0.5 * erfc(sq * ut_r)
    gauss_l = 0.5 * np.exp(-lam * ut_l * ut_l) / (_SQRT_PI * sq)
    gauss_r = 0.5 * np.exp(-lam * ut_r * ut_r) / (_SQRT_PI * sq)
    u1p = ut_l * u0p + gauss_l
    u1m = ut_r * u0m - gauss_r
    return KineticMoments(u0p, u0m, u1p, u1m, lam)


def xi_flux(trace: EdgeTrace, eos):
    """xi = xi_L(+) + xi_R(-) in the rotated moving frame.

    Returns (xi, moments) with xi of shape (4,) + broadcast shape; the
    moments are reused by the species flux so both see one upwind split.
    """
    t = trace
    # relative velocity in the local frame
    ut_l = (t.u_l - t.ug) * t.nx + (t.v_l - t.vg) * t.ny
    ut_r = (t.u_r - t.ug) * t.nx + (t.v_r - t.vg) * t.ny
    vt_l = -(t.u_l - t.ug) * t.ny + (t.v_l - t.vg) * t.nx
    vt_r = -(t.u_r - t.ug) * t.ny + (t.v_r - t.vg) * t.nx
    c_l = eos.sound_speed(t.rho_l, t.P_l, t.Y_l)
    c_r = eos.sound_speed(t.rho_r, t.P_r, t.Y_r)
    mom = kinetic_moments(ut_l, ut_r, c_l, c_r)

    # frame total energy: rho*e + kinetic energy of the relative motion
    kap_l, chi_l = eos.kappa_chi(t.Y_l)
    kap_r, chi_r = eos.kappa_chi(t.Y_r)
    Et_l = kap_l * t.P_l + chi_l + 0.5 * t.rho_l * (ut_l * ut_l + vt_l * vt_l)
    Et_r = kap_r * t.P_r + chi_r + 0.5 * t.rho_r * (ut_r * ut_r + vt_r * vt_r)

    xi1 = mom.u1p * t.rho_l + mom.u1m * t.rho_r
    xi2 = (mom.u1p * t.rho_l * ut_l + t.P_l * mom.u0p
           + mom.u1m * t.rho_r * ut_r + t.P_r * mom.u0m)
    xi3 = mom.u1p * t.rho_l * vt_l + mom.u1m * t.rho_r * vt_r
    xi4 = (mom.u1p * Et_l + 0.5 * t.P_l * (mom.u1p + ut_l * mom.u0p)
           + mom.u1m * Et_r + 0.5 * t.P_r * (mom.u1m + ut_r * mom.u0m))
    return np.stack(np.broadcast_arrays(xi1, xi2, xi3, xi4)), mom


def assemble_H(xi, nx, ny, ug, vg):
    """Rotate xi back to the lab frame and add the grid-motion transport."""
    xi1, xi2, xi3, xi4 = xi
    H = np.empty_like(xi)
    H[0] = xi1
    H[1] = ug * xi1 + nx * xi2 - ny * xi3
    H[2] = vg * xi1 + ny * xi2 + nx * xi3
    H[3] = (0.5 * (ug * ug + vg * vg) * xi1
            + (ug * nx + vg * ny) * xi2
            + (vg * nx - ug * ny) * xi3 + xi4)
    return H


def species_flux(Y_l, Y_r, mom: KineticMoments):
    """Upwind edge value of Y*(u - xdot).n by the same half-moment split.

    Positive-velocity particles carry Y_l, negative ones Y_r, mirroring the
    mass flux xi1 term by term.  That matching is what keeps kappa(Y) and
    chi(Y) moving in lockstep with the kappa/chi content of the energy flux,
    so constant-pressure states survive the full discrete update.
    """
    return mom.u1p * Y_l + mom.u1m * Y_r


def nok_edge_flux(trace: EdgeTrace, eos):
    """Full edge flux: (H for the 4-system, species edge value, moments)."""
    xi, mom = xi_flux(trace, eos)
    H = assemble_H(xi, trace.nx, trace.ny, trace.ug, trace.vg)
    FY = species_flux(trace.Y_l, trace.Y_r, mom)
    return H, FY, mom


def riemann_edge_velocity(un_l, un_r, c_l, c_r):
    """Normal flow speed at an edge from the half-moment split, xdot = 0.

    un_l, un_r are the normal projections of the cell velocities either
    side.  Equal states return their common normal velocity exactly.
    """
    mom = kinetic_moments(un_l, un_r, c_l, c_r)
    return mom.u1p + mom.u1m
