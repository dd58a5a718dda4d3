"""Figure rendering for finished runs.

Everything draws from the same in-memory state the snapshot writers use,
so the PNGs always agree with the delimited output next to them.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .driver import RunArtifacts


def _exact_curves(pb, x, t):
    if pb.exact is None:
        return None
    rho, u, v, P, Y = pb.exact(x, t)
    return {"rho": rho, "U": u, "P": P, "Y": Y}


def render_state_1d(art: RunArtifacts, pb, path):
    eos = art.config.eos
    rho, u, _, P = eos.primitive_from_conserved(art.W[:, :, 0].T, art.Y[:, 0],
                                                check=False)
    x = art.disc.mesh.barycenters(art.verts)
    order = np.argsort(x)
    fields = {"rho": rho, "U": u, "P": P, "Y": art.Y[:, 0]}
    exact = _exact_curves(pb, np.sort(x), art.t)
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    for ax, (name, vals) in zip(axes.flat, fields.items()):
        ax.plot(x[order], vals[order], ".", ms=3, label="computed")
        if exact is not None:
            ax.plot(np.sort(x), exact[name], "-", lw=0.8, label="exact")
            ax.legend(fontsize=7)
        ax.set_title(name, fontsize=9)
    fig.suptitle(f"{pb.name}  t={art.t:.6g}  N={art.disc.mesh.n_elems}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_trajectories(traj_path, png_path, max_lines=400):
    data = np.loadtxt(traj_path, delimiter=",", ndmin=2)
    t, xs = data[:, 0], data[:, 1:]
    stride = max(1, xs.shape[1] // max_lines)
    fig, ax = plt.subplots(figsize=(6, 5))
    ax.plot(xs[:, ::stride], t, "-", lw=0.3, color="tab:blue")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title("mesh trajectories", fontsize=10)
    fig.tight_layout()
    fig.savefig(png_path, dpi=130)
    plt.close(fig)
    return png_path


def render_state_2d(art: RunArtifacts, pb, path):
    eos = art.config.eos
    mesh = art.disc.mesh
    rho, _, _, _ = eos.primitive_from_conserved(art.W[:, :, 0].T, art.Y[:, 0],
                                                check=False)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.6))
    tp = ax1.tripcolor(art.verts[:, 0], art.verts[:, 1], mesh.elements,
                       facecolors=rho, cmap="viridis")
    fig.colorbar(tp, ax=ax1, shrink=0.85)
    ax1.set_aspect("equal")
    ax1.set_title(f"density  t={art.t:.6g}", fontsize=10)
    ax2.triplot(art.verts[:, 0], art.verts[:, 1], mesh.elements,
                lw=0.2, color="k")
    ax2.set_aspect("equal")
    ax2.set_title("mesh", fontsize=10)
    fig.suptitle(pb.name, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_history(log, path):
    if not log:
        return None
    t = [r["t"] for r in log]
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.semilogy(t, [r["dt"] for r in log], label="dt")
    ax.semilogy(t, [r["min_volume"] for r in log], label="min cell volume")
    if any(r["troubled"] for r in log):
        ax2 = ax.twinx()
        ax2.plot(t, [r["troubled"] for r in log], color="tab:red", lw=0.6,
                 alpha=0.6)
        ax2.set_ylabel("troubled cells", color="tab:red", fontsize=8)
    ax.set_xlabel("t")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_run_figures(art: RunArtifacts, pb, outdir):
    """All figures for one finished run; returns the list of paths written."""
    files = []
    if art.disc.mesh.dim == 1:
        files.append(render_state_1d(art, pb, os.path.join(outdir, "state.png")))
        traj = os.path.join(outdir, "trajectory.csv")
        if os.path.exists(traj):
            files.append(render_trajectories(traj, os.path.join(outdir, "trajectories.png")))
    else:
        files.append(render_state_2d(art, pb, os.path.join(outdir, "state.png")))
    hist = render_history(art.log, os.path.join(outdir, "history.png"))
    if hist:
        files.append(hist)
    return files
