"""Three-stage TVD Runge-Kutta advance on a moving mesh.

Vertices, per-element volume factors, and weighted moments step through the
same convex combinations, so a state that is constant in the primitives
stays constant while the mesh deforms underneath it.  The grid velocity is
frozen for the whole step; the stage meshes all lie on the straight path
x + s*dt*xdot, and the final combination lands on s = 1 exactly.
"""

import numpy as np

from .eos import PositivityError
from .limiter import LimiterConfig, limit
from .mesh import MeshError
from .mesh_motion import MotionParams, predict_correct
from .residual import residual


class StepRejected(RuntimeError):
    """A stage produced an invalid mesh or state at the attempted dt."""


def cell_volumes(mesh, verts):
    """Per-element volume factor: cell size in 1D, detJ (= 2|K|) in 2D."""
    if mesh.dim == 1:
        return mesh.cell_sizes(verts)
    return mesh.jacobians(verts)[1]


def volume_rate(mesh, verts, xdot):
    """Time derivative of the volume factor for vertices moving at xdot."""
    if mesh.dim == 1:
        return np.diff(xdot)
    p = verts[mesh.elements]
    v = xdot[mesh.elements]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    e1, e2 = v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]
    return (e1[:, 0] * d2[:, 1] - e1[:, 1] * d2[:, 0]
            + d1[:, 0] * e2[:, 1] - d1[:, 1] * e2[:, 0])


def compute_dt(disc, W, Y, verts, xdot, eos, cfl, t=None, t_stop=None):
    """CFL time step from cell-mean wave speeds and the grid velocity.

    Optionally capped so t + dt lands exactly on t_stop.
    """
    mesh = disc.mesh
    rho = W[:, 0, 0]
    u = W[:, 1, 0] / rho
    v = W[:, 2, 0] / rho
    P = eos.pressure(rho, W[:, 1, 0], W[:, 2, 0], W[:, 3, 0], Y[:, 0])
    c = eos.sound_speed(rho, P, Y[:, 0])
    if mesh.dim == 1:
        xd = 0.5 * (xdot[:-1] + xdot[1:])
        speed = np.abs(u - xd) + c
        r = 0.5 * mesh.cell_sizes(verts)
    else:
        xd = xdot[mesh.elements].mean(axis=1)
        speed = np.hypot(u - xd[:, 0], v - xd[:, 1]) + c
        r = mesh.inradii(verts)
    dt = cfl * float(np.min(r / speed))
    if not np.isfinite(dt) or dt <= 0.0:
        raise RuntimeError("nonpositive or non-finite time step")
    if t_stop is not None:
        dt = min(dt, t_stop - t)
        if dt <= 0.0:
            raise RuntimeError("already at or past the stop time")
    return dt


def _stage_combine(disc, a_old, Vold, Wold, Yold, b, V, W, Y, RW, RY,
                   dt, Vnew):
    """a*(old moments) + b*(moments + dt*rates), back to coefficients."""
    mh = disc.basis.mhat
    Wn = (a_old * Vold[:, None, None] * Wold
          + b * (V[:, None, None] * W + dt * RW / mh)) / Vnew[:, None, None]
    Yn = (a_old * Vold[:, None] * Yold
          + b * (V[:, None] * Y + dt * RY / mh)) / Vnew[:, None]
    return Wn, Yn


def rk3_step(disc, W, Y, verts, xdot, dt, eos, lim_cfg=LimiterConfig(),
             residual_fn=residual):
    """One SSP-RK3 step; returns (W, Y, verts, troubled_count) at t + dt.

    Raises StepRejected if any stage tangles the mesh, drives a volume
    factor nonpositive, or loses positivity of the traces.
    """
    mesh = disc.mesh
    # straight-path forms of the stage combinations, so xdot = 0 keeps the
    # vertices bit for bit and the last stage lands on x + dt*xdot exactly
    x1 = verts + dt * xdot
    x2 = verts + (0.5 * dt) * xdot
    x3 = x1
    if not (mesh.check_valid(x1) and mesh.check_valid(x2)):
        raise StepRejected("stage mesh tangled")

    V0 = cell_volumes(mesh, verts)
    V1 = V0 + dt * volume_rate(mesh, verts, xdot)
    V2 = 0.75 * V0 + 0.25 * (V1 + dt * volume_rate(mesh, x1, xdot))
    if np.min(V1) <= 0.0 or np.min(V2) <= 0.0:
        raise StepRejected("stage volume factor nonpositive")

    troubled = 0
    try:
        RW, RY = residual_fn(disc, W, Y, verts, xdot, eos)
        W1, Y1 = _stage_combine(disc, 0.0, V0, W, Y,
                                1.0, V0, W, Y, RW, RY, dt, V1)
        W1, Y1, n = limit(disc, W1, Y1, eos, lim_cfg, x1)
        troubled += n

        RW, RY = residual_fn(disc, W1, Y1, x1, xdot, eos)
        W2, Y2 = _stage_combine(disc, 0.75, V0, W, Y,
                                0.25, V1, W1, Y1, RW, RY, dt, V2)
        W2, Y2, n = limit(disc, W2, Y2, eos, lim_cfg, x2)
        troubled += n

        V3 = V0 / 3.0 + (2.0 / 3.0) * (V2 + dt * volume_rate(mesh, x2, xdot))
        if np.min(V3) <= 0.0:
            raise StepRejected("stage volume factor nonpositive")
        RW, RY = residual_fn(disc, W2, Y2, x2, xdot, eos)
        W3, Y3 = _stage_combine(disc, 1.0 / 3.0, V0, W, Y,
                                2.0 / 3.0, V2, W2, Y2, RW, RY, dt, V3)
        W3, Y3, n = limit(disc, W3, Y3, eos, lim_cfg, x3)
        troubled += n
    except PositivityError as exc:
        raise StepRejected(str(exc)) from exc
    return W3, Y3, x3, troubled


def advance_one_step(disc, W, Y, verts, eos, dt, mode,
                     motion=MotionParams(), lim_cfg=LimiterConfig(),
                     max_halvings=10):
    """Mesh motion plus rk3_step with step-halving retries.

    Returns (W, Y, verts, xdot, dt_used, troubled).  The inputs are never
    mutated, so a rejected attempt leaves the caller's state intact.
    """
    for _ in range(max_halvings + 1):
        try:
            _, xdot = predict_correct(disc, verts, W, Y, eos, dt, mode,
                                      motion)
            Wn, Yn, xn, ntr = rk3_step(disc, W, Y, verts, xdot, dt, eos,
                                       lim_cfg)
            return Wn, Yn, xn, xdot, dt, ntr
        except (StepRejected, MeshError, PositivityError):
            dt *= 0.5
    raise RuntimeError("time step rejected after %d halvings" % max_halvings)
