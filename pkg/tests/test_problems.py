import numpy as np
import pytest

from dgale.problems import PROBLEMS, get_problem, project_initial
from dgale.residual import Discretization

NAMES = ["sine-wave", "interface", "shu-osher", "gas-liquid",
         "sine-wave-2d", "circle-advect", "shock-bubble", "underwater-blast"]


def test_registry_contents():
    assert sorted(PROBLEMS) == sorted(NAMES)
    assert sum(p.dim == 1 for p in PROBLEMS.values()) == 4
    assert sum(p.dim == 2 for p in PROBLEMS.values()) == 4


def test_unknown_problem_lists_the_choices():
    with pytest.raises(KeyError, match="sine-wave"):
        get_problem("nope")


@pytest.mark.parametrize("name", NAMES)
def test_initial_data_is_admissible(name):
    pb = get_problem(name)
    # default-resolution mesh, pointwise primitives at the volume points
    mesh = pb.build_mesh()
    disc = Discretization(mesh, 1)
    pts = disc.volume_points(mesh.vertices)
    if pb.dim == 1:
        rho, u, v, P, Y = pb.initial(pts)
    else:
        rho, u, v, P, Y = pb.initial(pts[..., 0], pts[..., 1])
    gamma, B = pb.eos.gamma_B(Y)
    assert np.all(rho > 0.0)
    assert np.all(P + B > 0.0)
    assert np.all((Y >= 0.0) & (Y <= 1.0))
    for f in (u, v, P):
        assert np.all(np.isfinite(np.broadcast_to(f, np.shape(rho))))
    # sound speed must evaluate cleanly on the whole field
    c = pb.eos.sound_speed(rho, np.broadcast_to(P, np.shape(rho)), Y)
    assert np.all(c > 0.0)


@pytest.mark.parametrize("name", ["sine-wave", "interface", "gas-liquid",
                                  "sine-wave-2d"])
def test_exact_solution_matches_initial_at_t0(name):
    pb = get_problem(name)
    if pb.dim == 1:
        x = np.linspace(pb.domain[0] + 1e-3, pb.domain[1] - 1e-3, 57)
        got = pb.exact(x, 0.0)
        want = pb.initial(x)
    else:
        x = np.linspace(pb.domain[0] + 1e-3, pb.domain[1] - 1e-3, 23)
        y = np.linspace(pb.domain[2] + 1e-3, pb.domain[3] - 1e-3, 23)
        got = pb.exact(x, y, 0.0)
        want = pb.initial(x, y)
    for g, w in zip(got, want):
        assert np.allclose(g, w, atol=1e-12)


def test_build_mesh_resolutions():
    pb = get_problem("sine-wave")
    assert pb.build_mesh().n_elems == 40
    assert pb.build_mesh(16).n_elems == 16
    pb2 = get_problem("sine-wave-2d")
    assert pb2.build_mesh((3, 5)).n_elems == 3 * 5 * 4
    assert pb2.build_mesh(6).n_elems == 6 * 6 * 4


def test_problem_parameters():
    gl = get_problem("gas-liquid")
    assert gl.eos.gamma1 == 4.4 and gl.eos.B1 == 6e8
    assert gl.t_final == 2e-4
    sb = get_problem("shock-bubble")
    assert sb.beta == (1.0, 1.0, 1.0)
    assert sb.bc["bottom"] == "reflect"
    ub = get_problem("underwater-blast")
    assert ub.domain == (-2.0, 2.0, -1.5, 1.0)
    assert ub.bc["bottom"] == "reflect" and ub.bc["top"] == "copy"
    assert get_problem("sine-wave").bc == ("periodic", "periodic")


@pytest.mark.parametrize("name,degree", [("interface", 1), ("sine-wave-2d", 2)])
def test_project_initial_shapes_and_means(name, degree):
    pb = get_problem(name)
    mesh = pb.build_mesh(8 if pb.dim == 1 else (3, 3))
    disc = Discretization(mesh, degree)
    W, Y = project_initial(disc, mesh, pb)
    assert W.shape == (mesh.n_elems, 4, disc.n_dof)
    assert Y.shape == (mesh.n_elems, disc.n_dof)
    assert np.all(W[:, 0, 0] > 0.0)
    assert np.all((Y[:, 0] >= -1e-12) & (Y[:, 0] <= 1.0 + 1e-12))


def test_interface_profile_is_a_clean_two_state():
    pb = get_problem("interface")
    rho, u, v, P, Y = pb.initial(np.array([-1.0, 1.0]))
    assert rho[0] == 1.0 and rho[1] == 0.125
    assert Y[0] == 1.0 and Y[1] == 0.0
    assert np.all(u == 1.0) and np.all(P == 1.0)


def test_gas_liquid_states():
    pb = get_problem("gas-liquid")
    rho, u, v, P, Y = pb.initial(np.array([0.0, 0.9]))
    assert rho[0] == 1e3 and P[0] == 1e9 and Y[0] == 1.0
    assert rho[1] == 50.0 and P[1] == 1e5 and Y[1] == 0.0
