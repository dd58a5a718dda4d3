import numpy as np
import pytest

from dgale.eos import MixtureEOS
from dgale.mesh import build_interval_mesh, build_rect_mesh
from dgale.residual import Discretization, residual

TWO_GASES = MixtureEOS(1.4, 0.0, 1.9, 0.0)

CONST = dict(rho=1.3, u=0.4, v=-0.2, P=0.9, Yc=0.35)


def _constant_state(disc, eos, rho, u, v, P, Yc):
    n, m = disc.mesh.n_elems, disc.n_dof
    W = np.zeros((n, 4, m))
    W[:, :, 0] = eos.conserved_from_primitive(rho, u, v, P, Yc)
    Y = np.zeros((n, m))
    Y[:, 0] = Yc
    return W, Y


def _tie_rows(mesh, arr):
    """Make periodic partner vertices consistent, offsets preserved."""
    for a, b in getattr(mesh, "vertex_ties", ()):
        arr[b] = arr[a] + (mesh.vertices[b] - mesh.vertices[a])


def _perturbed_2d(rng, nx=6, tags=None):
    tags = tags or {s: "copy" for s in ("left", "right", "bottom", "top")}
    mesh = build_rect_mesh(nx, nx, (0.0, 1.0, 0.0, 1.0), tags)
    verts = mesh.vertices + 0.15 / nx * rng.uniform(-1, 1, mesh.vertices.shape) \
        * mesh.move_mask
    _tie_rows(mesh, verts)
    assert mesh.check_valid(verts)
    return mesh, verts


@pytest.mark.parametrize("degree", [1, 2])
def test_translation_free_stream_residual_2d(degree, rng):
    # rigid grid translation changes no cell volume: the rate must vanish
    mesh, verts = _perturbed_2d(rng)
    disc = Discretization(mesh, degree)
    W, Y = _constant_state(disc, TWO_GASES, **CONST)
    xdot = np.broadcast_to(np.array([0.7, -0.3]), verts.shape)
    RW, RY = residual(disc, W, Y, verts, xdot, TWO_GASES)
    assert np.max(np.abs(RW)) < 1e-12
    assert np.max(np.abs(RY)) < 1e-12


@pytest.mark.parametrize("degree", [1, 2])
def test_general_motion_rate_is_pure_volume_change(degree, rng):
    # for a constant state under arbitrary nodal velocities every component's
    # rate reduces to (component value) x (volume-change moments): all rows
    # are proportional, so co-evolving the volume factor cancels them exactly
    mesh, verts = _perturbed_2d(rng)
    disc = Discretization(mesh, degree)
    W, Y = _constant_state(disc, TWO_GASES, **CONST)
    xdot = 0.3 * rng.uniform(-1, 1, verts.shape) * mesh.move_mask
    RW, RY = residual(disc, W, Y, verts, xdot, TWO_GASES)
    Wc = W[0, :, 0]
    scale = np.max(np.abs(RY))
    assert scale > 1e-8  # compressive motion: the raw rate itself is nonzero
    for c in range(4):
        assert np.allclose(RW[:, c, :], (Wc[c] / CONST["Yc"]) * RY,
                           atol=1e-11 * max(1.0, scale))


@pytest.mark.parametrize("degree", [1, 2])
def test_static_free_stream_residual_1d(degree, rng):
    mesh = build_interval_mesh(0.0, 2.0, 24, "periodic", "periodic")
    verts = mesh.vertices.copy()
    verts[1:-1] += 0.02 * rng.uniform(-1, 1, mesh.n_verts - 2)
    disc = Discretization(mesh, degree)
    W, Y = _constant_state(disc, TWO_GASES, rho=1.3, u=0.4, v=0.0, P=0.9,
                           Yc=0.35)
    xdot = np.zeros_like(verts)
    RW, RY = residual(disc, W, Y, verts, xdot, TWO_GASES)
    assert np.max(np.abs(RW)) < 1e-12
    assert np.max(np.abs(RY)) < 1e-12


@pytest.mark.parametrize("degree", [1, 2])
def test_general_motion_rate_is_pure_volume_change_1d(degree, rng):
    mesh = build_interval_mesh(0.0, 2.0, 24, "periodic", "periodic")
    verts = mesh.vertices.copy()
    verts[1:-1] += 0.02 * rng.uniform(-1, 1, mesh.n_verts - 2)
    disc = Discretization(mesh, degree)
    W, Y = _constant_state(disc, TWO_GASES, rho=1.3, u=0.4, v=0.0, P=0.9,
                           Yc=0.35)
    xdot = np.zeros_like(verts)
    xdot[1:-1] = 0.4 * rng.uniform(-1, 1, mesh.n_verts - 2)
    RW, RY = residual(disc, W, Y, verts, xdot, TWO_GASES)
    Wc = W[0, :, 0]
    scale = np.max(np.abs(RY))
    assert scale > 1e-8
    for c in range(4):
        assert np.allclose(RW[:, c, :], (Wc[c] / 0.35) * RY,
                           atol=1e-11 * max(1.0, scale))


def test_mean_mode_telescopes_on_periodic_mesh(rng):
    # interior edge fluxes cancel pairwise: the summed mean-mode rate of the
    # conservative system equals the total volume-change rate of the state,
    # which vanishes when the total volume is fixed
    tags = {s: "periodic" for s in ("left", "right", "bottom", "top")}
    mesh, verts = _perturbed_2d(rng, nx=5, tags=tags)
    disc = Discretization(mesh, 2)
    n, m = mesh.n_elems, disc.n_dof
    W = np.zeros((n, 4, m))
    xb = mesh.barycenters(verts)
    rho = 1.0 + 0.3 * np.sin(np.pi * xb[:, 0]) * np.cos(np.pi * xb[:, 1])
    W[:, :, 0] = TWO_GASES.conserved_from_primitive(
        rho, 0.7, -0.4, 1.0 + 0.2 * rho, 0.5).T
    W[:, :, 1:] = 0.02 * rng.standard_normal((n, 4, m - 1))
    Y = np.zeros((n, m))
    Y[:, 0] = 0.5
    xdot = np.zeros_like(verts)  # frozen mesh isolates the flux telescoping
    RW, _ = residual(disc, W, Y, verts, xdot, TWO_GASES)
    total = RW[:, :, 0].sum(axis=0)
    assert np.max(np.abs(total)) < 1e-11 * max(1.0, np.max(np.abs(RW)))


def test_mean_mode_telescopes_with_motion(rng):
    # same cancellation with the grid moving: the volume terms per element
    # integrate the state against div(xdot), whose domain total telescopes too
    tags = {s: "periodic" for s in ("left", "right", "bottom", "top")}
    mesh, verts = _perturbed_2d(rng, nx=5, tags=tags)
    disc = Discretization(mesh, 1)
    W, Y = _constant_state(disc, TWO_GASES, **CONST)
    xdot = 0.2 * rng.uniform(-1, 1, verts.shape) * mesh.move_mask
    # tied vertices share a velocity exactly (positions differ by the period,
    # velocities do not)
    for a, b in mesh.vertex_ties:
        xdot[b] = xdot[a]
    RW, _ = residual(disc, W, Y, verts, xdot, TWO_GASES)
    total = RW[:, :, 0].sum(axis=0)
    # total volume is conserved by any interior motion, so the summed
    # mean-mode rate of a constant state must vanish
    assert np.max(np.abs(total)) < 1e-11


def test_projection_eval_roundtrip(rng):
    mesh = build_rect_mesh(3, 3, (0.0, 1.0, 0.0, 1.0))
    disc = Discretization(mesh, 2)
    coeffs = rng.standard_normal((mesh.n_elems, disc.n_dof))
    vals = disc.eval_volume(coeffs)
    back = disc.project(vals)
    assert np.allclose(back, coeffs, atol=1e-12)


def test_l1_error_of_exact_projection_is_small():
    mesh = build_rect_mesh(8, 8, (0.0, 1.0, 0.0, 1.0))
    disc = Discretization(mesh, 1)
    f = lambda x, y: np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y)
    pts = disc.volume_points(mesh.vertices)
    coeffs = disc.project(f(pts[..., 0], pts[..., 1]))
    err = disc.l1_error(coeffs, f, mesh.vertices)
    assert err < 2e-2
    # and the affine part of a linear field is represented exactly
    g = lambda x, y: 2.0 + 3.0 * x - 1.5 * y
    cg = disc.project(g(pts[..., 0], pts[..., 1]))
    assert disc.l1_error(cg, g, mesh.vertices) < 1e-13


def test_quad_scale_is_cell_measure():
    mesh = build_rect_mesh(4, 4, (0.0, 2.0, 0.0, 1.0))
    disc = Discretization(mesh, 1)
    assert np.allclose(disc.quad_scale(mesh.vertices),
                       2.0 * mesh.signed_areas(), rtol=1e-13)
    m1 = build_interval_mesh(0.0, 1.0, 7)
    d1 = Discretization(m1, 1)
    assert np.allclose(d1.quad_scale(m1.vertices), m1.cell_sizes())
