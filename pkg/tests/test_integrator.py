import numpy as np
import pytest

from dgale import integrator as ti
from dgale.eos import MixtureEOS
from dgale.limiter import LimiterConfig
from dgale.mesh import build_interval_mesh, build_rect_mesh
from dgale.residual import Discretization

EOS = MixtureEOS(1.4, 0.0, 1.6, 2.0)
OPEN = dict(left="copy", right="copy", bottom="copy", top="copy")


def _project(disc, fr, fu, fv, fP, fY, eos=EOS):
    mesh = disc.mesh
    pts = disc.volume_points(mesh.vertices)
    if mesh.dim == 1:
        x = pts
        vals = (fr(x), fu(x), 0.0 * x, fP(x), fY(x))
    else:
        x, y = pts[..., 0], pts[..., 1]
        vals = (fr(x), fu(x), fv(x, y), fP(x), fY(x))
    W = np.stack([disc.project(c) for c in
                  eos.conserved_from_primitive(*vals)], axis=1)
    return W, disc.project(vals[4])


def _wobble(mesh, verts, t, amp):
    if mesh.dim == 1:
        return amp * np.sin(2 * np.pi * verts + t) * mesh.move_mask
    xd = np.stack([amp * np.sin(np.pi * verts[:, 0])
                   * np.cos(np.pi * verts[:, 1] + t),
                   -amp * np.cos(np.pi * verts[:, 0] + t)
                   * np.sin(np.pi * verts[:, 1])], axis=1)
    return xd * mesh.move_mask


def test_scalar_amplification_factor_is_rk3():
    # u' = lam*u on a fixed mesh must amplify by the cubic Taylor polynomial
    mesh = build_interval_mesh(0.0, 1.0, 4)
    disc = Discretization(mesh, 1)
    lam = -0.37

    def lin_res(disc_, W, Y, verts, xdot, eos_):
        V = ti.cell_volumes(disc_.mesh, verts)
        mh = disc_.basis.mhat
        return lam * V[:, None, None] * W * mh, lam * V[:, None] * Y * mh

    W, Ym = _project(disc, lambda x: 1 + 0 * x, lambda x: 0.1 + 0 * x, None,
                     lambda x: 2 + 0 * x, lambda x: 0.5 + 0 * x)
    dt = 0.3
    W3, Y3, _, _ = ti.rk3_step(disc, W, Ym, mesh.vertices,
                               np.zeros(mesh.n_verts), dt, EOS,
                               LimiterConfig(m_tvb=1e30), residual_fn=lin_res)
    z = lam * dt
    fac = 1 + z + z ** 2 / 2 + z ** 3 / 6
    assert np.max(np.abs(W3 - fac * W)) < 1e-13
    assert np.max(np.abs(Y3 - fac * Ym)) < 1e-13


def test_final_stage_lands_on_straight_path():
    mesh = build_rect_mesh(5, 5, (0.0, 1.0, 0.0, 1.0), OPEN)
    disc = Discretization(mesh, 1)
    W, Ym = _project(disc, lambda x: 1 + 0 * x, lambda x: 0 * x,
                     lambda x, y: 0 * x, lambda x: 1 + 0 * x,
                     lambda x: 0.5 + 0 * x)
    xd = _wobble(mesh, mesh.vertices, 0.3, 0.08)
    _, _, x3, _ = ti.rk3_step(disc, W, Ym, mesh.vertices, xd, 0.02, EOS)
    assert np.max(np.abs(x3 - (mesh.vertices + 0.02 * xd))) < 1e-14


@pytest.mark.parametrize("dim,degree", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_free_stream_on_wobbling_mesh(dim, degree):
    if dim == 1:
        mesh = build_interval_mesh(0.0, 1.0, 24)
    else:
        mesh = build_rect_mesh(6, 6, (0.0, 1.0, 0.0, 1.0), OPEN)
    disc = Discretization(mesh, degree)
    W, Ym = _project(disc, lambda x: 1.4 + 0 * x, lambda x: 0.3 + 0 * x,
                     lambda x, y: -0.2 + 0 * x, lambda x: 2.0 + 0 * x,
                     lambda x: 0.4 + 0 * x)
    verts = mesh.vertices.copy()
    W0 = W.copy()
    t = 0.0
    for _ in range(20):
        xd = _wobble(mesh, verts, t, 0.04)
        W, Ym, verts, _ = ti.rk3_step(disc, W, Ym, verts, xd, 0.004, EOS)
        t += 0.004
    assert np.max(np.abs(W - W0)) < 1e-10


def test_total_mass_conserved_on_periodic_mesh(rng):
    tags = {s: "periodic" for s in ("left", "right", "bottom", "top")}
    mesh = build_rect_mesh(5, 5, (0.0, 2.0, 0.0, 2.0), tags)
    disc = Discretization(mesh, 1)
    W, Ym = _project(disc, lambda x: 1 + 0.2 * np.sin(np.pi * x),
                     lambda x: 0.5 + 0 * x, lambda x, y: 0.3 + 0 * x,
                     lambda x: 1 + 0 * x,
                     lambda x: 0.5 + 0.4 * np.sin(np.pi * x))
    verts = mesh.vertices.copy()
    V = ti.cell_volumes(mesh, verts)
    m0 = (V[:, None] * W[:, :, 0]).sum(axis=0)
    t = 0.0
    for _ in range(12):
        xd = _wobble(mesh, verts, t, 0.03)
        for a, b in mesh.vertex_ties:
            xd[b] = xd[a]
        W, Ym, verts, _ = ti.rk3_step(disc, W, Ym, verts, xd, 0.004, EOS)
        t += 0.004
    V = ti.cell_volumes(mesh, verts)
    m1 = (V[:, None] * W[:, :, 0]).sum(axis=0)
    assert np.max(np.abs(m1 - m0)) < 1e-12 * np.max(np.abs(m0))


def test_volume_rate_is_the_time_derivative(rng):
    mesh = build_rect_mesh(4, 4, (0.0, 1.0, 0.0, 1.0), OPEN)
    verts = mesh.vertices + 0.02 * rng.uniform(-1, 1, mesh.vertices.shape) \
        * mesh.move_mask
    xdot = rng.standard_normal(verts.shape)
    rate = ti.volume_rate(mesh, verts, xdot)
    h = 1e-3
    # the volume factor is quadratic along the path, central diff is exact
    fd = (ti.cell_volumes(mesh, verts + h * xdot)
          - ti.cell_volumes(mesh, verts - h * xdot)) / (2 * h)
    assert np.allclose(rate, fd, atol=1e-9)

    m1 = build_interval_mesh(0.0, 1.0, 6)
    xd1 = rng.standard_normal(m1.n_verts)
    assert np.allclose(ti.volume_rate(m1, m1.vertices, xd1), np.diff(xd1))


def test_compute_dt_scaling_and_capping():
    mesh = build_interval_mesh(0.0, 1.0, 10)
    disc = Discretization(mesh, 1)
    air = MixtureEOS(1.4, 0.0, 1.4, 0.0)
    W, Ym = _project(disc, lambda x: 1.4 + 0 * x, lambda x: 0 * x, None,
                     lambda x: 1.0 + 0 * x, lambda x: 0 * x, eos=air)
    # c = sqrt(1.4 * 1 / 1.4) = 1 and r = h/2 = 0.05
    dt = ti.compute_dt(disc, W, Ym, mesh.vertices, np.zeros(11), air, 0.3)
    assert abs(dt - 0.015) < 1e-14
    mesh2 = build_interval_mesh(0.0, 1.0, 20)
    disc2 = Discretization(mesh2, 1)
    W2, Y2 = _project(disc2, lambda x: 1.4 + 0 * x, lambda x: 0 * x, None,
                      lambda x: 1.0 + 0 * x, lambda x: 0 * x, eos=air)
    dt2 = ti.compute_dt(disc2, W2, Y2, mesh2.vertices, np.zeros(21), air, 0.3)
    assert abs(dt2 - dt / 2) < 1e-15
    capped = ti.compute_dt(disc, W, Ym, mesh.vertices, np.zeros(11), air, 0.3,
                           t=1.0, t_stop=1.0 + 1e-4)
    assert abs(capped - 1e-4) < 1e-16
    with pytest.raises(RuntimeError):
        ti.compute_dt(disc, W, Ym, mesh.vertices, np.zeros(11), air, 0.3,
                      t=2.0, t_stop=1.0)


def test_tangling_velocity_is_rejected():
    mesh = build_interval_mesh(0.0, 1.0, 10)
    disc = Discretization(mesh, 1)
    W, Ym = _project(disc, lambda x: 1.4 + 0 * x, lambda x: 0 * x, None,
                     lambda x: 1.0 + 0 * x, lambda x: 0 * x)
    big = np.ones(11) * mesh.move_mask * 50.0
    with pytest.raises(ti.StepRejected):
        ti.rk3_step(disc, W, Ym, mesh.vertices, big, 0.1, EOS)


def test_advance_halves_dt_until_the_step_fits():
    mesh = build_interval_mesh(0.0, 1.0, 20)
    disc = Discretization(mesh, 1)
    W, Ym = _project(disc, lambda x: np.where(x < 0.5, 1.0, 0.125),
                     lambda x: 0 * x, None,
                     lambda x: np.where(x < 0.5, 1.0, 0.1),
                     lambda x: np.where(x < 0.5, 1.0, 0.0))
    Wc, Yc = W.copy(), Ym.copy()
    out = ti.advance_one_step(disc, W, Ym, mesh.vertices, EOS, 0.25,
                              "lagrangian", lim_cfg=LimiterConfig(m_tvb=0.0))
    Wn, Yn, xn, xdn, dt_used, ntr = out
    assert dt_used < 0.25
    assert np.all(np.isfinite(Wn)) and np.all(np.isfinite(Yn))
    assert mesh.check_valid(xn)
    # the caller's arrays never change, even across rejected attempts
    assert np.array_equal(W, Wc) and np.array_equal(Ym, Yc)


def test_advance_gives_up_after_max_halvings(monkeypatch):
    mesh = build_interval_mesh(0.0, 1.0, 8)
    disc = Discretization(mesh, 1)
    W, Ym = _project(disc, lambda x: 1.0 + 0 * x, lambda x: 0 * x, None,
                     lambda x: 1.0 + 0 * x, lambda x: 0.5 + 0 * x)

    def always_tangled(*a, **k):
        raise ti.StepRejected("forced")

    monkeypatch.setattr(ti, "rk3_step", always_tangled)
    with pytest.raises(RuntimeError, match="halvings"):
        ti.advance_one_step(disc, W, Ym, mesh.vertices, EOS, 0.1, "eulerian",
                            max_halvings=3)


def test_advance_is_deterministic():
    mesh = build_interval_mesh(0.0, 2.0, 16, "periodic", "periodic")
    disc = Discretization(mesh, 2)
    W, Ym = _project(disc, lambda x: 1 + 0.2 * np.sin(np.pi * x),
                     lambda x: 1.0 + 0 * x, None, lambda x: 1.0 + 0 * x,
                     lambda x: 0.5 + 0.5 * np.sin(np.pi * x))
    outs = []
    for _ in range(2):
        Wk, Yk, vk = W.copy(), Ym.copy(), mesh.vertices.copy()
        for _ in range(5):
            Wk, Yk, vk, _, _, _ = ti.advance_one_step(
                disc, Wk, Yk, vk, EOS, 2e-3, "ale-mm")
        outs.append((Wk, Yk, vk))
    assert np.array_equal(outs[0][0], outs[1][0])
    assert np.array_equal(outs[0][1], outs[1][1])
    assert np.array_equal(outs[0][2], outs[1][2])
