"""Grid velocities for the moving mesh: Lagrangian predictor + MMPDE corrector.

The predictor assigns each vertex the weighted least-squares fit of the
half-moment edge flow speeds on its incident edges.  The corrector relaxes a
computational copy of the mesh down the gradient of a Riemann-sum mesh energy
(equidistribution + alignment, measured in a Hessian-based metric) and pulls
the physical vertices back through the resulting piecewise-linear map.  Both
stages respect the move mask, so boundary vertices slide and corners stay.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .kinetic_flux import riemann_edge_velocity
from .mesh import MeshError
from .residual import _node_traces_1d


@dataclass(frozen=True)
class MotionParams:
    """Knobs for the predictor-corrector pipeline."""

    tau: float = 0.1
    beta: tuple = (1.0, 1.0, 0.0)
    sweeps: int = 3


def _inv2(A):
    """Batched 2x2 inverse and determinant."""
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    inv = np.empty_like(A)
    inv[..., 0, 0] = A[..., 1, 1]
    inv[..., 0, 1] = -A[..., 0, 1]
    inv[..., 1, 0] = -A[..., 1, 0]
    inv[..., 1, 1] = A[..., 0, 0]
    return inv / det[..., None, None], det


def _tie_sum(arr, ties):
    """Accumulate paired periodic vertices so each pair shares one value."""
    if len(ties) == 0:
        return arr
    a, b = ties[:, 0], ties[:, 1]
    s = arr[a] + arr[b]
    arr[a] = s
    arr[b] = s
    return arr


# ----------------------------------------------------------------------
# Lagrangian predictor


def _edge_flow_speed_2d(disc, verts, W, Y, eos):
    """Half-moment flow speed at each edge midpoint (grid at rest)."""
    m = disc.mesh
    normal, _ = m.edge_geometry(verts)
    nx, ny = normal[:, 0], normal[:, 1]

    WL = np.einsum("ecm,em->ec", W[m.edge_left], disc.phi_edge_l_mid)
    YL = np.einsum("em,em->e", Y[m.edge_left], disc.phi_edge_l_mid)
    r = np.where(m.edge_right >= 0, m.edge_right, 0)
    WR = np.einsum("ecm,em->ec", W[r], disc.phi_edge_r_mid)
    YR = np.einsum("em,em->e", Y[r], disc.phi_edge_r_mid)

    fill = disc.bc_copy | disc.bc_reflect
    if fill.any():
        WR[fill] = WL[fill]
        YR[fill] = YL[fill]
    if disc.bc_periodic.any():
        per = np.nonzero(disc.bc_periodic)[0]
        part = m.edge_partner[per]
        WR[per] = np.einsum("ecm,em->ec", W[m.edge_left[part]],
                            disc.phi_edge_l_mid[part])
        YR[per] = np.einsum("em,em->e", Y[m.edge_left[part]],
                            disc.phi_edge_l_mid[part])

    rho_l, u_l, v_l, P_l = eos.primitive_from_conserved(WL.T, YL)
    rho_r, u_r, v_r, P_r = eos.primitive_from_conserved(WR.T, YR)
    if disc.bc_reflect.any():
        rr = disc.bc_reflect
        un = u_r[rr] * nx[rr] + v_r[rr] * ny[rr]
        u_r[rr] -= 2.0 * un * nx[rr]
        v_r[rr] -= 2.0 * un * ny[rr]

    un_l = u_l * nx + v_l * ny
    un_r = u_r * nx + v_r * ny
    c_l = eos.sound_speed(rho_l, P_l, YL)
    c_r = eos.sound_speed(rho_r, P_r, YR)
    ustar = riemann_edge_velocity(un_l, un_r, c_l, c_r)

    rho_bar = W[:, 0, 0]
    a_l = rho_bar[m.edge_left]
    a_r = np.where(m.edge_right >= 0, rho_bar[m.edge_right], a_l)
    if disc.bc_periodic.any():
        a_r[per] = rho_bar[m.edge_left[part]]
    alpha = 0.5 * (a_l + a_r)
    return ustar, alpha, normal


def lagrangian_velocity(disc, verts, W, Y, eos):
    """Vertex velocities fitting the edge flow speeds, mask applied."""
    m = disc.mesh
    if m.dim == 1:
        (rho_l, u_l, _, P_l), (rho_r, u_r, _, P_r), YL, YR = \
            _node_traces_1d(disc, W, Y, eos)
        c_l = eos.sound_speed(rho_l, P_l, YL)
        c_r = eos.sound_speed(rho_r, P_r, YR)
        return riemann_edge_velocity(u_l, u_r, c_l, c_r) * m.move_mask

    ustar, alpha, normal = _edge_flow_speed_2d(disc, verts, W, Y, eos)

    # normal equations per vertex: (sum a n n^T) v = sum a U* n
    A = np.zeros((m.n_verts, 2, 2))
    b = np.zeros((m.n_verts, 2))
    Ann = alpha[:, None, None] * normal[:, :, None] * normal[:, None, :]
    bn = (alpha * ustar)[:, None] * normal
    for end in (0, 1):
        np.add.at(A, m.edges[:, end], Ann)
        np.add.at(b, m.edges[:, end], bn)
    _tie_sum(A, m.vertex_ties)
    _tie_sum(b, m.vertex_ties)

    det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
    tr = A[:, 0, 0] + A[:, 1, 1]
    ok = det > 1e-12 * (0.5 * tr) ** 2
    vel = np.zeros((m.n_verts, 2))
    safe = np.where(ok, det, 1.0)
    vel[:, 0] = (A[:, 1, 1] * b[:, 0] - A[:, 0, 1] * b[:, 1]) / safe
    vel[:, 1] = (A[:, 0, 0] * b[:, 1] - A[:, 1, 0] * b[:, 0]) / safe

    if not ok.all():
        # all incident normals parallel: plain mean of the projections
        F = np.zeros((m.n_verts, 2))
        cnt = np.zeros(m.n_verts)
        un = ustar[:, None] * normal
        for end in (0, 1):
            np.add.at(F, m.edges[:, end], un)
            np.add.at(cnt, m.edges[:, end], 1.0)
        bad = ~ok
        vel[bad] = F[bad] / cnt[bad, None]
        warnings.warn("vertex velocity fit singular at %d vertices"
                      % int(bad.sum()), RuntimeWarning)
    return vel * m.move_mask


# cells squeezed against a fixed end wall stop shrinking at this fraction
# of their original size instead of vanishing (and stalling the time step)
WALL_GAP_FRACTION = 0.2


def _hold_wall_gaps_1d(mesh, verts, trial):
    """Keep 1D cells from being squeezed out against the fixed end walls.

    Vertex motion may stretch a cell freely, but compression stops at a
    floor: a fraction of the cell's original size (or its current size if
    already below that).  Tangled input is handed back untouched so the
    caller's damping loop can deal with it.
    """
    gaps = np.diff(trial)
    if np.any(gaps <= 0.0):
        return trial
    target = np.minimum(np.diff(verts), WALL_GAP_FRACTION * mesh.cell_sizes())
    if np.all(gaps >= target):
        return trial
    # gap_i >= target_i becomes monotonicity of x - cumsum(target); one
    # reversed running min enforces it pushing vertices left only
    pre = np.concatenate([[0.0], np.cumsum(target)])
    out = pre + np.minimum.accumulate((trial - pre)[::-1])[::-1]
    out[0] = trial[0]
    if np.any(np.diff(out) < target - 1e-15):
        # piled onto the left wall instead; sweep back to the right
        out = np.maximum(out, pre + np.maximum.accumulate(out - pre))
        out[-1] = trial[-1]
    if np.any(np.diff(out) < target - 1e-12):
        return verts.copy()
    return out


def lagrangian_predict(disc, verts, W, Y, eos, dt):
    """Advance the vertices by the fitted velocities; damp if that tangles."""
    vel = lagrangian_velocity(disc, verts, W, Y, eos)
    fac = 1.0
    for _ in range(40):
        trial = verts + (dt * fac) * vel
        if disc.mesh.dim == 1:
            trial = _hold_wall_gaps_1d(disc.mesh, verts, trial)
        if disc.mesh.check_valid(trial):
            if fac < 1.0:
                warnings.warn("vertex motion damped by %g to stay untangled"
                              % fac, RuntimeWarning)
            return trial
        fac *= 0.5
    return verts.copy()


# ----------------------------------------------------------------------
# Metric construction


def adaptation_quantity(disc, verts, W, Y, eos, beta):
    """Nodal mesh-density driver built from density, pressure and Y."""
    m = disc.mesh
    Wq = disc.eval_volume(W)
    Yq = disc.eval_volume(Y)
    _, _, _, P = eos.primitive_from_conserved(np.moveaxis(Wq, 1, 0), Yq)
    cell = np.stack([W[:, 0, 0], disc.project(P)[:, 0], Y[:, 0]], axis=1)

    if m.dim == 1:
        h = m.cell_sizes(verts)
        num = np.zeros((m.n_verts, 3))
        den = np.zeros(m.n_verts)
        np.add.at(num, np.arange(m.n_elems), h[:, None] * cell)
        np.add.at(num, np.arange(1, m.n_verts), h[:, None] * cell)
        np.add.at(den, np.arange(m.n_elems), h)
        np.add.at(den, np.arange(1, m.n_verts), h)
        if m.periodic:
            num[0] += h[-1] * cell[-1]
            den[0] += h[-1]
            num[-1] += h[0] * cell[0]
            den[-1] += h[0]
        nodal = num / den[:, None]
    else:
        areas = m.signed_areas(verts)
        off, idx = m.vert_elems
        w = areas[idx]
        num = np.add.reduceat(w[:, None] * cell[idx], off[:-1], axis=0)
        den = np.add.reduceat(w, off[:-1])
        nodal = num / den[:, None]
        if len(m.vertex_ties):
            a, b = m.vertex_ties[:, 0], m.vertex_ties[:, 1]
            na = num[a] + num[b]
            da = den[a] + den[b]
            nodal[a] = nodal[b] = na / da[:, None]

    S = np.ones(m.n_verts)
    for i in range(3):
        norm = np.max(np.abs(nodal[:, i]))
        if beta[i] != 0.0 and norm > 0.0:
            S += beta[i] * (nodal[:, i] / norm) ** 2
    return S


def _ring2_sets(mesh):
    """Two-ring neighbor lists, self excluded; grown where too small."""
    need = 6
    off, idx = mesh.vert_ring
    one = [set(idx[off[v]:off[v + 1]]) for v in range(mesh.n_verts)]
    out = []
    for v in range(mesh.n_verts):
        s = set(one[v])
        for w in one[v]:
            s |= one[w]
        s.discard(v)
        while len(s) < need:
            grown = set(s)
            for w in s:
                grown |= one[w]
            grown.discard(v)
            if grown == s:
                break
            s = grown
        out.append(sorted(s))
    return out


def recover_hessian(mesh, verts, S):
    """Least-squares quadratic fit of nodal S around each vertex.

    Exact for globally quadratic data.  Rank-deficient neighborhoods get a
    zero Hessian (the metric degrades to the identity there).
    """
    V = mesh.n_verts
    ncoef = 3 if mesh.dim == 1 else 6
    cached = getattr(mesh, "_fit_stencil", None)
    if cached is None:
        if mesh.dim == 1:
            nbr = []
            for j in range(V):
                cand = [j - 2, j - 1, j + 1, j + 2]
                if mesh.periodic:
                    # node 0 and node n coincide; wrap through n-1 interior
                    cand = [(j + k) % (V - 1) for k in (-2, -1, 1, 2)]
                nbr.append(sorted({c for c in cand if 0 <= c < V and c != j}))
        else:
            nbr = _ring2_sets(mesh)
        P = max(len(s) for s in nbr) + 1
        pts = np.zeros((V, P), dtype=np.int64)
        valid = np.zeros((V, P), dtype=bool)
        for j, s in enumerate(nbr):
            pts[j, 0] = j
            pts[j, 1:1 + len(s)] = s
            valid[j, :1 + len(s)] = True
        mesh._fit_stencil = (pts, valid)     # topology only, safe to keep
    else:
        pts, valid = cached
    P = pts.shape[1]

    xv = verts if mesh.dim == 2 else verts[:, None]
    d = (xv[pts] - xv[:, None, :]) * valid[:, :, None]
    if mesh.dim == 1 and mesh.periodic:
        span = mesh.domain[1] - mesh.domain[0]
        d -= span * np.round(d / span)       # wrap to the nearest image
    L = np.maximum(np.abs(d).max(axis=(1, 2)), 1e-300)
    d = d / L[:, None, None]

    if mesh.dim == 1:
        X = np.stack([np.ones((V, P)), d[..., 0], d[..., 0] ** 2], axis=2)
    else:
        X = np.stack([np.ones((V, P)), d[..., 0], d[..., 1],
                      d[..., 0] ** 2, d[..., 0] * d[..., 1],
                      d[..., 1] ** 2], axis=2)
    X = X * valid[:, :, None]
    Xt = X.transpose(0, 2, 1)
    rhs = np.matmul(Xt, (S[pts] * valid)[:, :, None])[:, :, 0]
    N = np.matmul(Xt, X)

    lam, Q = np.linalg.eigh(N)
    tol = lam[:, -1:] * 1e-10
    good = lam > tol
    inv = np.where(good, 1.0 / np.where(good, lam, 1.0), 0.0)
    t = inv * np.matmul(Q.transpose(0, 2, 1), rhs[:, :, None])[:, :, 0]
    coef = np.matmul(Q, t[:, :, None])[:, :, 0]

    full = good.sum(axis=1) == ncoef
    if not full.all():
        warnings.warn("flat fit neighborhood at %d vertices, Hessian zeroed"
                      % int((~full).sum()), RuntimeWarning)
    scale = np.where(full, 1.0 / L ** 2, 0.0)
    if mesh.dim == 1:
        return 2.0 * coef[:, 2] * scale
    H = np.empty((V, 2, 2))
    H[:, 0, 0] = 2.0 * coef[:, 3]
    H[:, 0, 1] = H[:, 1, 0] = coef[:, 4]
    H[:, 1, 1] = 2.0 * coef[:, 5]
    return H * scale[:, None, None]


def build_metric(mesh, H, sweeps=3):
    """Interpolation-error metric from the Hessian, then smoothing sweeps."""
    if mesh.dim == 1:
        M = (1.0 + np.abs(H)) ** 0.8     # det(1+|H|)^(-1/5) * (1+|H|)
        for _ in range(sweeps):
            Ms = M.copy()
            Ms[1:-1] = (M[:-2] + M[1:-1] + M[2:]) / 3.0
            if mesh.periodic:
                Ms[0] = Ms[-1] = (M[-2] + M[0] + M[1]) / 3.0
            else:
                Ms[0] = (M[0] + M[1]) / 2.0
                Ms[-1] = (M[-2] + M[-1]) / 2.0
            M = Ms
        return M

    Hs = 0.5 * (H + np.swapaxes(H, 1, 2))
    lam, Q = np.linalg.eigh(Hs)
    ab = 1.0 + np.abs(lam)
    det = ab[:, 0] * ab[:, 1]
    A = np.einsum("vab,vb,vcb->vac", Q, ab, Q)
    M = det[:, None, None] ** (-1.0 / 6.0) * A

    off, idx = mesh.vert_ring
    for _ in range(sweeps):
        num = np.add.reduceat(M[idx], off[:-1], axis=0) + M
        cnt = np.diff(off) + 1.0
        M = num / cnt[:, None, None]
        if len(mesh.vertex_ties):
            a, b = mesh.vertex_ties[:, 0], mesh.vertex_ties[:, 1]
            avg = 0.5 * (M[a] + M[b])
            M[a] = M[b] = avg
    if not np.all(np.linalg.det(M) > 0.0):
        raise MeshError("metric lost positive definiteness")
    return M


def solution_metric(disc, verts, W, Y, eos, beta=(1.0, 1.0, 0.0), sweeps=3):
    S = adaptation_quantity(disc, verts, W, Y, eos, beta)
    H = recover_hessian(disc.mesh, verts, S)
    return build_metric(disc.mesh, H, sweeps)


# ----------------------------------------------------------------------
# Mesh energy and its gradient


def mesh_energy(mesh, x_verts, xi_verts, M):
    """Energy of the computational mesh against the fixed physical one.

    Returns (value, gradient w.r.t. the xi vertices).  The gradient is the
    raw per-vertex derivative: no mask, no periodic pairing.
    """
    if mesh.dim == 1:
        dxi = np.diff(xi_verts)
        dx = np.diff(x_verts)
        if np.any(dxi <= 0.0):
            raise MeshError("flat computational cell %d"
                            % int(np.argmin(dxi)))
        MK = 0.5 * (M[:-1] + M[1:])
        f = 2.0 * MK ** -0.25 * dxi ** 1.5 * dx ** -0.5
        fp = 3.0 * MK ** -0.25 * dxi ** 0.5 * dx ** -0.5
        G = np.zeros_like(x_verts)
        G[1:] += fp
        G[:-1] -= fp
        return float(f.sum()), G

    p = x_verts[mesh.elements]
    Ex = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
    q = xi_verts[mesh.elements]
    Ec = np.stack([q[:, 1] - q[:, 0], q[:, 2] - q[:, 0]], axis=2)
    Exi, detEx = _inv2(Ex)
    Eci, detEc = _inv2(Ec)
    if np.any(detEc <= 0.0):
        raise MeshError("inverted computational element %d"
                        % int(np.argmin(detEc)))

    MK = M[mesh.elements].mean(axis=1)
    Mi, mdet = _inv2(MK)
    sqm = np.sqrt(mdet)
    area = 0.5 * detEx

    A = Exi @ Mi @ np.swapaxes(Exi, 1, 2)
    EcA = Ec @ A
    T = np.einsum("nab,nab->n", EcA, Ec)
    rJ = detEc / detEx                       # det of d(xi)/d(x)

    c2 = 2.0 ** 1.5                          # d^(3d/4) at d = 2
    val = float(np.sum(area * sqm * T ** 1.5)
                + c2 * np.sum(area * mdet ** -0.25 * rJ ** 1.5))

    EciT = np.swapaxes(Eci, 1, 2)
    dEc = area[:, None, None] * (
        3.0 * (sqm * np.sqrt(T))[:, None, None] * EcA
        + 1.5 * c2 * (mdet ** -0.25 * rJ ** 1.5)[:, None, None] * EciT)

    G = np.zeros_like(x_verts)
    np.add.at(G, mesh.elements[:, 1], dEc[:, :, 0])
    np.add.at(G, mesh.elements[:, 2], dEc[:, :, 1])
    np.add.at(G, mesh.elements[:, 0], -(dEc[:, :, 0] + dEc[:, :, 1]))
    return val, G


# ----------------------------------------------------------------------
# MMPDE correction


def _locate_2d(mesh, xi, targets, start):
    """Containing element and barycentric weights for each target point."""
    els = mesh.elements
    nt = len(targets)
    cur = start.copy()
    loc = np.full(nt, -1, dtype=np.int64)
    wts = np.zeros((nt, 3))
    # walking across a periodic seam would need a coordinate shift; punt
    seam = mesh.edge_partner[mesh.elem_edges] >= 0
    active = np.arange(nt)
    for _ in range(64):
        if active.size == 0:
            break
        pp = xi[els[cur[active]]]
        d1 = pp[:, 1] - pp[:, 0]
        d2 = pp[:, 2] - pp[:, 0]
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        r = targets[active] - pp[:, 0]
        w1 = (r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]) / det
        w2 = (d1[:, 0] * r[:, 1] - d1[:, 1] * r[:, 0]) / det
        w = np.stack([1.0 - w1 - w2, w1, w2], axis=1)
        k = np.argmin(w, axis=1)
        inside = w[np.arange(len(w)), k] >= -1e-12
        hit = active[inside]
        loc[hit] = cur[hit]
        wts[hit] = w[inside]
        rest = active[~inside]
        kr = k[~inside]
        side = (kr + 1) % 3                  # face opposite the worst vertex
        nb = mesh.elem_neighbors[cur[rest], side]
        stuck = (nb < 0) | seam[cur[rest], side]
        cur[rest[~stuck]] = nb[~stuck]
        active = rest[~stuck]

    miss = np.nonzero(loc < 0)[0]
    if miss.size:
        pp = xi[els]
        d1 = pp[:, 1] - pp[:, 0]
        d2 = pp[:, 2] - pp[:, 0]
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        r = targets[miss, None, :] - pp[None, :, 0]
        w1 = (r[..., 0] * d2[None, :, 1] - r[..., 1] * d2[None, :, 0]) / det
        w2 = (d1[None, :, 0] * r[..., 1] - d1[None, :, 1] * r[..., 0]) / det
        w = np.stack([1.0 - w1 - w2, w1, w2], axis=2)
        best = np.argmax(w.min(axis=2), axis=1)
        loc[miss] = best
        wts[miss] = w[np.arange(len(miss)), best]
    return loc, wts


def mmpde_correct(mesh, xL, M, tau, dt, xi_ref=None, max_halvings=20):
    """Quality-correct the predicted mesh by the gradient flow in xi.

    Relaxes the computational mesh from the reference over pseudo-time dt
    (physical vertices frozen at xL), then interpolates the physical
    positions back at the reference computational vertices.
    """
    xi_ref = mesh.vertices if xi_ref is None else xi_ref
    xi = xi_ref.copy()
    mask = mesh.move_mask
    if mesh.dim == 1:
        speed = M ** 0.25 / tau
    else:
        speed = np.linalg.det(M) ** 0.25 / tau

    val, G = mesh_energy(mesh, xL, xi, M)
    dt_sub = min(dt, 0.1 * tau)
    remaining = dt
    budget = 64 * int(np.ceil(dt / dt_sub)) + 64
    while remaining > 1e-14 * dt and budget > 0:
        budget -= 1
        Gm = _tie_sum(G.copy(), getattr(mesh, "vertex_ties", ()))
        vel = -speed[..., None] * Gm if mesh.dim == 2 else -speed * Gm
        vel = vel * mask
        h = min(dt_sub, remaining)
        for halving in range(max_halvings + 1):
            trial = xi + h * vel
            if mesh.check_valid(trial):
                tval, tG = mesh_energy(mesh, xL, trial, M)
                if tval <= val * (1.0 + 1e-12):
                    xi, val, G = trial, tval, tG
                    remaining -= h
                    break
            h *= 0.5
        else:
            raise MeshError(
                "mesh relaxation stalled: energy %.6g, step %.3g, "
                "smallest cell %.3g" % (val, h, _min_cell(mesh, xi)))
    if budget == 0 and remaining > 1e-14 * dt:
        warnings.warn("mesh relaxation ran out of sub-steps", RuntimeWarning)

    if mesh.dim == 1:
        x_new = np.interp(xi_ref, xi, xL)
    else:
        off, idx = mesh.vert_elems
        start = idx[off[:-1]]                # some element touching each vertex
        loc, wts = _locate_2d(mesh, xi, xi_ref, start)
        x_new = np.einsum("vb,vbd->vd", wts, xL[mesh.elements[loc]])
    # pinned coordinates stay exactly on the original boundary lines
    x_new = np.where(mask > 0, x_new, mesh.vertices)
    if mesh.dim == 2 and len(mesh.vertex_ties):
        a, b = mesh.vertex_ties[:, 0], mesh.vertex_ties[:, 1]
        x_new[b] = x_new[a] + (mesh.vertices[b] - mesh.vertices[a])
    return x_new


def _min_cell(mesh, verts):
    if mesh.dim == 1:
        return float(np.min(mesh.cell_sizes(verts)))
    return float(np.min(mesh.signed_areas(verts)))


def grid_velocity_of_step(x_old, x_new, dt):
    return (x_new - x_old) / dt


def equidistribution_ratio(mesh, verts, M):
    """Spread of |K| sqrt(det M_K) over the mesh; 1 means equidistributed."""
    if mesh.dim == 1:
        q = mesh.cell_sizes(verts) * np.sqrt(0.5 * (M[:-1] + M[1:]))
    else:
        MK = M[mesh.elements].mean(axis=1)
        q = mesh.signed_areas(verts) * np.sqrt(np.linalg.det(MK))
    return float(q.max() / q.min())


# ----------------------------------------------------------------------
# Pipeline


def predict_correct(disc, verts, W, Y, eos, dt, mode, params=MotionParams()):
    """One mesh-motion step; returns the new vertices and nodal velocity."""
    mesh = disc.mesh
    if mode == "eulerian":
        return verts.copy(), np.zeros_like(verts)
    if mode not in ("lagrangian", "ale-mm"):
        raise ValueError("unknown mesh mode %r" % (mode,))
    xL = lagrangian_predict(disc, verts, W, Y, eos, dt)
    if mode == "lagrangian":
        x_new = xL
    else:
        M = solution_metric(disc, verts, W, Y, eos, params.beta,
                            params.sweeps)
        x_new = mmpde_correct(mesh, xL, M, params.tau, dt)
    return x_new, grid_velocity_of_step(verts, x_new, dt)
