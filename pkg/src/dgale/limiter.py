"""Troubled-cell detection and slope limiting, done in primitive variables.

Detection is the TVB-modified minmod test: an element is flagged when, for
any primitive component and any face, the deviation of the face-mean trace
from the cell average exceeds M*h^2 (after normalizing each component by
its max cell-average magnitude) and disagrees in size or sign with the
cell-average difference toward that neighbor.

Limiting on flagged cells works on projected primitive polynomials
(rho, u, v, P, Y): a minmod slope limiter with a hierarchical top-down
pass in 1D, Barth-Jespersen scaling of the linear part with zeroed
quadratic moments in 2D.  Conserved fields are rebuilt pointwise from the
limited primitives and reprojected; conserved cell averages are restored
exactly afterwards, so the 4-system stays conservative and unflagged
elements are untouched bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LimiterConfig:
    m_tvb: float = 10.0
    limit_species: bool = True


def _minmod2(a, b):
    """Zero on sign disagreement, else the smaller magnitude with a's sign."""
    agree = a * b > 0.0
    return np.where(agree, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _minmod3(a, b, c):
    sa = np.sign(a)
    agree = (sa == np.sign(b)) & (sa == np.sign(c))
    mag = np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c)))
    return np.where(agree, sa * mag, 0.0)


def primitive_coeffs(disc, W, Y, eos):
    """Project pointwise primitives at the volume points; (N, 5, n_dof)."""
    Wq = disc.eval_volume(W)
    Yq = disc.eval_volume(Y)
    rho, u, v, P = eos.primitive_from_conserved(np.moveaxis(Wq, 1, 0), Yq,
                                                check=False)
    return disc.project(np.stack([rho, u, v, P, Yq], axis=1))


def _neighbor_means_1d(mesh, means):
    """means (n, 5) -> left/right neighbor means with boundary ghosts."""
    if mesh.periodic:
        lm = np.roll(means, 1, axis=0)
        rm = np.roll(means, -1, axis=0)
    else:
        lm = np.concatenate([means[:1], means[:-1]], axis=0)
        rm = np.concatenate([means[1:], means[-1:]], axis=0)
    return lm, rm


def detect_troubled(disc, W, Y, eos, m_tvb, verts):
    """Boolean per-element flags from the TVB minmod test on primitives."""
    mesh = disc.mesh
    prim = primitive_coeffs(disc, W, Y, eos)
    means = prim[:, :, 0]                               # (N, 5)
    scale = np.maximum(np.abs(means).max(axis=0), 1e-300)

    if mesh.dim == 1:
        h = np.diff(verts)
        # 1e-12 relative floor keeps projection roundoff from flagging
        thr = np.maximum(m_tvb * h[:, None] * h[:, None] * scale,
                         1e-12 * scale)
        q_r = np.einsum("ncm,m->nc", prim, disc.phi1)   # right-end trace
        q_l = np.einsum("ncm,m->nc", prim, disc.phi0)
        lm, rm = _neighbor_means_1d(mesh, means)
        du_p = rm - means
        du_m = means - lm
        flags = np.zeros(mesh.n_elems, dtype=bool)
        for a in (q_r - means, means - q_l):
            mod = _minmod3(a, du_p, du_m)
            altered = (np.abs(a) > thr) & (mod != a)
            flags |= altered.any(axis=1)
        # sharp mean extremum (both neighbor differences large, opposite sign)
        extremum = (du_p * du_m < 0.0) & (np.minimum(np.abs(du_p), np.abs(du_m)) > thr)
        flags |= extremum.any(axis=1)
        return flags

    # 2D: face-mean jumps vs the neighbor difference across that face
    p = verts[mesh.elements]
    e01 = np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
    e12 = np.linalg.norm(p[:, 2] - p[:, 1], axis=1)
    e20 = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
    h = np.maximum(e01, np.maximum(e12, e20))
    thr = np.maximum(m_tvb * (h * h)[:, None, None] * scale,
                     1e-12 * scale)                     # (N, 1, 5) broadcast

    face_means = np.einsum("ncm,nsm->nsc", prim, disc.phi_side_mean)
    delta = face_means - means[:, None, :]              # (N, 3, 5)
    nb = mesh.elem_neighbors                            # -1 on boundary
    valid = (nb >= 0)[:, :, None]
    nb_means = means[np.where(nb >= 0, nb, 0)]
    diff = np.where(valid, nb_means - means[:, None, :], delta)
    mod = _minmod2(delta, diff)
    altered = (np.abs(delta) > thr) & (mod != delta)
    flags = altered.any(axis=(1, 2))
    # sharp mean extremum: all real-neighbor differences big and one-signed
    big_pos = np.where(valid, diff > thr, True).all(axis=1)
    big_neg = np.where(valid, diff < -thr, True).all(axis=1)
    enough = valid.sum(axis=1) >= 2
    flags |= ((big_pos | big_neg) & enough).any(axis=1)
    return flags


def _limit_prims_1d(disc, prim, flags, mesh):
    lm, rm = _neighbor_means_1d(mesh, prim[:, :, 0])
    du_p = rm - prim[:, :, 0]
    du_m = prim[:, :, 0] - lm
    out = prim.copy()
    c1 = prim[:, :, 1]
    if disc.n_dof == 3:
        c2 = prim[:, :, 2]
        c1l = np.roll(c1, 1, axis=0) if mesh.periodic else np.concatenate([c1[:1], c1[:-1]])
        c1r = np.roll(c1, -1, axis=0) if mesh.periodic else np.concatenate([c1[1:], c1[-1:]])
        c2_mod = _minmod3(c2, 0.5 * (c1r - c1), 0.5 * (c1 - c1l))
        # hierarchical: only touch the slope where the top moment was cut
        go_on = c2_mod != c2
        c1_mod = np.where(go_on, 2.0 * _minmod3(0.5 * c1, du_p, du_m), c1)
        out[flags, :, 2] = c2_mod[flags]
        out[flags, :, 1] = c1_mod[flags]
    else:
        c1_mod = 2.0 * _minmod3(0.5 * c1, du_p, du_m)
        out[flags, :, 1] = c1_mod[flags]
    return out


def _limit_prims_2d(disc, prim, flags, mesh):
    means = prim[:, :, 0]
    nb = mesh.elem_neighbors
    nb_means = means[np.where(nb >= 0, nb, 0)]
    nb_means = np.where((nb >= 0)[:, :, None], nb_means, means[:, None, :])
    qmin = np.minimum(means, nb_means.min(axis=1))
    qmax = np.maximum(means, nb_means.max(axis=1))

    out = prim.copy()
    lin = prim.copy()
    lin[:, :, 0] = 0.0
    if disc.n_dof > 3:
        lin[:, :, 3:] = 0.0
    dv = np.einsum("ncm,vm->ncv", lin, disc.phi_vert)   # linear part at vertices
    with np.errstate(divide="ignore", invalid="ignore"):
        up = (qmax - means)[:, :, None] / dv
        dn = (qmin - means)[:, :, None] / dv
    ratio = np.where(dv > 0.0, up, np.where(dv < 0.0, dn, 1.0))
    alpha = np.clip(ratio, 0.0, 1.0).min(axis=2)        # (N, 5)
    out[flags, :, 1:3] = (alpha[:, :, None] * prim[:, :, 1:3])[flags]
    if disc.n_dof > 3:
        out[flags, :, 3:] = 0.0
    return out


def limit(disc, W, Y, eos, cfg: LimiterConfig, verts):
    """Detect and limit; returns (W, Y, n_troubled).  No-op returns inputs."""
    flags = detect_troubled(disc, W, Y, eos, cfg.m_tvb, verts)
    n_troubled = int(flags.sum())
    if n_troubled == 0:
        return W, Y, 0

    prim = primitive_coeffs(disc, W, Y, eos)
    if disc.mesh.dim == 1:
        lim = _limit_prims_1d(disc, prim, flags, disc.mesh)
    else:
        lim = _limit_prims_2d(disc, prim, flags, disc.mesh)

    # rebuild conserved pointwise from the limited primitive polynomials
    q = disc.eval_volume(lim[flags])                    # (t, 5, nq)
    rho, u, v, P, Yq = q[:, 0], q[:, 1], q[:, 2], q[:, 3], q[:, 4]
    cons = eos.conserved_from_primitive(rho, u, v, P, Yq)
    Wnew = W.copy()
    Wnew[flags] = disc.project(np.moveaxis(cons, 0, 1))
    Wnew[flags, :, 0] = W[flags, :, 0]                  # exact mean restore
    Ynew = Y
    if cfg.limit_species:
        Ynew = Y.copy()
        Ynew[flags] = lim[flags, 4]
        Ynew[flags, 0] = Y[flags, 0]
    return Wnew, Ynew, n_troubled
