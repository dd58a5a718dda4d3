"""Run orchestration: time loop, snapshot writers, study harnesses.

The evolve() core advances one configured problem and keeps a per-step
log; run() wraps it with artifact output (delimited snapshots, mesh
trajectories, optional VTK).  convergence_study() and compare_modes()
reuse evolve() without touching the filesystem.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .integrator import advance_one_step, cell_volumes, compute_dt
from .limiter import LimiterConfig, limit
from .mesh import MeshError
from .mesh_motion import MotionParams
from .problems import get_problem, project_initial
from .residual import Discretization

_T_EPS = 1e-12


class NumericalFailure(RuntimeError):
    """A run died mid-flight; .record holds the machine-readable report."""

    def __init__(self, message, record):
        super().__init__(message)
        self.record = record


@dataclass
class RunArtifacts:
    config: RunConfig
    disc: Discretization
    W: np.ndarray
    Y: np.ndarray
    verts: np.ndarray
    t: float
    log: list
    files: list


def setup(config: RunConfig):
    """Resolve the config, build mesh and space, project and pre-limit."""
    cfg = config.resolve()
    pb = get_problem(cfg.problem)
    mesh = pb.build_mesh(cfg.n)
    disc = Discretization(mesh, cfg.degree)
    W, Y = project_initial(disc, mesh, pb)
    lim = LimiterConfig(m_tvb=cfg.m_tvb)
    # discontinuous data can project to negative point values; one limiter
    # pass restores admissible traces without touching cell means
    W, Y, _ = limit(disc, W, Y, cfg.eos, lim, mesh.vertices)
    return cfg, pb, mesh, disc, W, Y, lim


def _point_primitives(disc, W, Y, eos):
    vals = np.moveaxis(disc.eval_volume(W), 1, 0)
    return eos.primitive_from_conserved(vals, disc.eval_volume(Y), check=False)


def evolve(config: RunConfig, on_step=None, stop_times=(), prepared=None):
    """Advance to t_final; returns (cfg, pb, disc, W, Y, verts, log).

    on_step(t, W, Y, verts) fires after every accepted step; stop_times
    are extra instants the stepper must land on exactly; prepared takes
    the tuple from setup() to skip redoing projection.
    """
    cfg, pb, mesh, disc, W, Y, lim = prepared if prepared is not None else setup(config)
    eos = cfg.eos
    motion = MotionParams(tau=cfg.tau, beta=cfg.beta)
    verts = mesh.vertices.copy()
    xdot_est = np.zeros_like(verts)
    t, step = 0.0, 0
    log = []

    # preservation diagnostics only make sense from constant initial fields
    rho0, u0, v0, P0 = _point_primitives(disc, W, Y, eos)
    p_ref = float(P0.flat[0]) if np.ptp(P0) <= 1e-12 * max(1.0, abs(P0.flat[0])) else None
    u_ref = float(u0.flat[0]) if np.ptp(u0) <= 1e-12 * max(1.0, abs(u0.flat[0])) else None

    stops = sorted(s for s in set(stop_times) if 0.0 < s < cfg.t_final)
    stops.append(cfg.t_final)
    horizon = max(cfg.t_final, 1.0)

    try:
        for t_stop in stops:
            while t < t_stop - _T_EPS * horizon:
                dt = compute_dt(disc, W, Y, verts, xdot_est, eos, cfg.cfl,
                                t=t, t_stop=t_stop)
                if dt < 1e-13 * horizon:
                    raise RuntimeError(f"time step collapsed to {dt:.3e}")
                W, Y, verts, xdot, dt_used, ntr = advance_one_step(
                    disc, W, Y, verts, eos, dt, cfg.mesh_mode, motion, lim)
                t += dt_used
                xdot_est = xdot
                step += 1
                rec = {"step": step, "t": t, "dt": dt_used,
                       "min_volume": float(cell_volumes(mesh, verts).min()),
                       "troubled": int(ntr)}
                if p_ref is not None or u_ref is not None:
                    _, uu, vv, pp = _point_primitives(disc, W, Y, eos)
                    if p_ref is not None:
                        rec["max_dP"] = float(np.max(np.abs(pp - p_ref)))
                    if u_ref is not None:
                        rec["max_du"] = float(np.max(np.abs(uu - u_ref)))
                log.append(rec)
                if on_step is not None:
                    on_step(t, W, Y, verts)
            t = t_stop
    except (RuntimeError, FloatingPointError, MeshError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc),
                  "t": t, "step": step, "problem": cfg.problem,
                  "mesh_mode": cfg.mesh_mode, "n": cfg.n, "degree": cfg.degree}
        raise NumericalFailure(f"run failed at t={t:.6g}: {exc}", record) from exc
    return cfg, pb, disc, W, Y, verts, log


def cell_average_table(disc, W, Y, verts, eos):
    """Per-element barycenter plus cell-average primitives and materials."""
    mesh = disc.mesh
    rho, u, v, P = eos.primitive_from_conserved(W[:, :, 0].T, Y[:, 0], check=False)
    gamma, B = eos.gamma_B(Y[:, 0])
    bary = mesh.barycenters(verts)
    if mesh.dim == 1:
        cols = [bary, rho, u, v, P, Y[:, 0], gamma, B]
        header = "x,rho,U,V,P,Y,gamma,B"
    else:
        cols = [bary[:, 0], bary[:, 1], rho, u, v, P, Y[:, 0], gamma, B]
        header = "x,y,rho,U,V,P,Y,gamma,B"
    return np.column_stack(cols), header


def write_csv_snapshot(disc, W, Y, verts, eos, path):
    table, header = cell_average_table(disc, W, Y, verts, eos)
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt="%.17g")
    return path


def write_vtk_snapshot(disc, W, Y, verts, eos, path):
    """Legacy-ASCII unstructured grid with cell data; 2D only."""
    mesh = disc.mesh
    if mesh.dim != 2:
        raise ValueError("VTK output needs a 2D mesh")
    rho, u, v, P = eos.primitive_from_conserved(W[:, :, 0].T, Y[:, 0], check=False)
    gamma, B = eos.gamma_B(Y[:, 0])
    nv, ne = mesh.n_verts, mesh.n_elems
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write("two-component moving-mesh state\n")
        f.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {nv} double\n")
        for x, y in verts:
            f.write(f"{x:.17g} {y:.17g} 0\n")
        f.write(f"CELLS {ne} {4 * ne}\n")
        for tri in mesh.elements:
            f.write(f"3 {tri[0]} {tri[1]} {tri[2]}\n")
        f.write(f"CELL_TYPES {ne}\n")
        f.write("5\n" * ne)
        f.write(f"CELL_DATA {ne}\n")
        for name, vals in (("density", rho), ("pressure", P),
                           ("mass_fraction", Y[:, 0]), ("gamma", gamma),
                           ("stiffening", B)):
            f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            f.write("\n".join(f"{val:.17g}" for val in vals) + "\n")
        f.write("VECTORS velocity double\n")
        for a, b in zip(u, v):
            f.write(f"{a:.17g} {b:.17g} 0\n")
    return path


def run(config: RunConfig, figures=False):
    """Full orchestrated run with artifacts on disk.

    Layout under cfg.directory: snapshot_<index>_t<t>.csv/.vtk at the
    configured interval plus the final time, log.json, and for 1D runs
    trajectory.csv with one (t, x_0 .. x_N) row per step.  Failures leave
    failure.json behind and raise NumericalFailure.
    """
    cfg = config.resolve()
    outdir = cfg.directory
    os.makedirs(outdir, exist_ok=True)
    files = []
    traj_rows = []
    snap_idx = [0]

    if cfg.interval > 0:
        k = int(np.ceil(cfg.t_final / cfg.interval - 1e-9))
        stop_times = tuple(i * cfg.interval for i in range(1, k + 1))
    else:
        stop_times = ()
    snap_at = {round(s, 12) for s in stop_times}

    prepared = setup(cfg)
    cfg, pb, mesh0, disc0, W0, Y0, _ = prepared

    def snapshot(W, Y, verts, t):
        base = os.path.join(outdir, f"snapshot_{snap_idx[0]:04d}_t{t:.6g}")
        if "csv" in cfg.formats:
            files.append(write_csv_snapshot(disc0, W, Y, verts, cfg.eos, base + ".csv"))
        if "vtk" in cfg.formats and mesh0.dim == 2:
            files.append(write_vtk_snapshot(disc0, W, Y, verts, cfg.eos, base + ".vtk"))
        snap_idx[0] += 1

    def on_step(t, W, Y, verts):
        if mesh0.dim == 1:
            traj_rows.append(np.concatenate([[t], verts]))
        if round(t, 12) in snap_at:
            snapshot(W, Y, verts, t)

    if mesh0.dim == 1:
        traj_rows.append(np.concatenate([[0.0], mesh0.vertices]))
    snapshot(W0, Y0, mesh0.vertices, 0.0)

    try:
        cfg, pb, disc, W, Y, verts, log = evolve(cfg, on_step=on_step,
                                                 stop_times=stop_times,
                                                 prepared=prepared)
    except NumericalFailure as exc:
        with open(os.path.join(outdir, "failure.json"), "w") as f:
            json.dump(exc.record, f, indent=2)
        raise

    t = cfg.t_final
    if t > 0.0 and round(t, 12) not in snap_at:
        snapshot(W, Y, verts, t)

    if disc.mesh.dim == 1 and traj_rows:
        path = os.path.join(outdir, "trajectory.csv")
        np.savetxt(path, np.vstack(traj_rows), delimiter=",", fmt="%.17g")
        files.append(path)
    with open(os.path.join(outdir, "log.json"), "w") as f:
        json.dump(log, f)
    files.append(os.path.join(outdir, "log.json"))

    art = RunArtifacts(cfg, disc, W, Y, verts, t, log, files)
    if figures:
        from .report import render_run_figures
        files.extend(render_run_figures(art, pb, outdir))
    return art


def error_norms(disc, coeffs, exact_fn, verts):
    """(L1, L2, Linf) of a scalar DG field against a callable, by quadrature."""
    pts = disc.volume_points(verts)
    vals = disc.eval_volume(coeffs)
    ex = exact_fn(pts) if disc.mesh.dim == 1 else exact_fn(pts[..., 0], pts[..., 1])
    diff = np.abs(vals - ex)
    scale = disc.quad_scale(verts)
    l1 = float(np.einsum("nq,q,n->", diff, disc.wq, scale))
    l2 = float(np.sqrt(np.einsum("nq,q,n->", diff * diff, disc.wq, scale)))
    return l1, l2, float(diff.max())


def convergence_study(problem_name, degree, n_list, mesh_mode="ale-mm",
                      cfl=None, t_final=None):
    """Density-error table against the exact solution over a resolution sweep.

    Returns {"rows": [(n, L1, L2, Linf)], "orders": [(oL1, oL2, oLinf)],
    "monotone": bool}; orders compare successive resolutions, assuming the
    usual factor-of-two refinement.
    """
    pb = get_problem(problem_name)
    if pb.exact is None:
        raise ValueError(f"problem {problem_name!r} has no exact solution")
    rows = []
    for n in n_list:
        cfg = RunConfig(problem=problem_name, n=n, degree=degree,
                        mesh_mode=mesh_mode, cfl=cfl, t_final=t_final)
        cfg, _, disc, W, Y, verts, _ = evolve(cfg)
        tf = cfg.t_final
        if pb.dim == 1:
            exact_rho = lambda x: pb.exact(x, tf)[0]
        else:
            exact_rho = lambda x, y: pb.exact(x, y, tf)[0]
        rows.append((n, *error_norms(disc, W[:, 0], exact_rho, verts)))
    orders = []
    for (na, *ea), (nb, *eb) in zip(rows, rows[1:]):
        orders.append(tuple(np.log2(x / y) if y > 0 else np.inf
                            for x, y in zip(ea, eb)))
    err1 = [r[1] for r in rows]
    return {"rows": rows, "orders": orders,
            "monotone": all(a > b for a, b in zip(err1, err1[1:]))}


def _pressure_variation(disc, W, Y, verts, eos):
    """Total variation of the cell-average pressure, 1D, in mesh order."""
    _, _, _, P = eos.primitive_from_conserved(W[:, :, 0].T, Y[:, 0], check=False)
    order = np.argsort(disc.mesh.barycenters(verts))
    return float(np.abs(np.diff(P[order])).sum())


def compare_modes(problem_name, n, degree, modes=("eulerian", "lagrangian", "ale-mm"),
                  t_final=None):
    """Side-by-side metrics across mesh modes; failed modes are recorded."""
    pb = get_problem(problem_name)
    report = {}
    for mode in modes:
        cfg = RunConfig(problem=problem_name, n=n, degree=degree,
                        mesh_mode=mode, t_final=t_final)
        t0 = time.perf_counter()
        try:
            cfg, _, disc, W, Y, verts, log = evolve(cfg)
        except NumericalFailure as exc:
            report[mode] = {"completed": False, "failure": str(exc)}
            continue
        entry = {"completed": True, "steps": len(log),
                 "seconds": time.perf_counter() - t0}
        if pb.dim == 1:
            entry["tv_pressure"] = _pressure_variation(disc, W, Y, verts, cfg.eos)
        if pb.exact is not None:
            tf = cfg.t_final
            if pb.dim == 1:
                exact_rho = lambda x: pb.exact(x, tf)[0]
            else:
                exact_rho = lambda x, y: pb.exact(x, y, tf)[0]
            entry["l1_density"] = error_norms(disc, W[:, 0], exact_rho, verts)[0]
        if log:
            entry["max_dP"] = max((r.get("max_dP", 0.0) for r in log), default=0.0)
            entry["max_du"] = max((r.get("max_du", 0.0) for r in log), default=0.0)
        report[mode] = entry
    return report
