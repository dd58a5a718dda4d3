import itertools

import numpy as np
import pytest

from dgale.basis import make_basis, mass_matrix, l2_project, eval_field


@pytest.mark.parametrize("dim,degree", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_orthogonality_and_constant_mode(dim, degree):
    basis, quad = make_basis(dim, degree)
    phi = basis.eval(quad.vol_pts)
    gram = (quad.vol_wts[:, None] * phi).T @ phi
    assert np.allclose(gram, np.diag(basis.mhat), atol=1e-13)
    assert np.allclose(phi[:, 0], 1.0)
    assert np.all(basis.mhat > 0.0)


@pytest.mark.parametrize("dim,degree", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_quadrature_weights_positive(dim, degree):
    _, quad = make_basis(dim, degree)
    assert np.all(quad.vol_wts > 0.0)
    assert np.all(quad.face_wts > 0.0)
    ref_vol = 1.0 if dim == 1 else 0.5
    assert np.isclose(quad.vol_wts.sum(), ref_vol, rtol=1e-14)
    if dim == 2:  # 1D "faces" are the two endpoints, not a rule
        assert np.isclose(quad.face_wts.sum(), 1.0, rtol=1e-14)


def _monomial_integral_1d(p):
    return 1.0 / (p + 1)


def _monomial_integral_tri(a, b):
    # int_T x^a y^b over the unit reference triangle
    import math
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


@pytest.mark.parametrize("degree", [1, 2])
def test_volume_rule_exactness_1d(degree):
    _, quad = make_basis(1, degree)
    pts = np.ravel(quad.vol_pts)
    for p in range(2 * degree + 3):
        got = np.sum(quad.vol_wts * pts ** p)
        assert np.isclose(got, _monomial_integral_1d(p), rtol=1e-13), p


@pytest.mark.parametrize("degree", [1, 2])
def test_volume_rule_exactness_2d(degree):
    _, quad = make_basis(2, degree)
    x, y = quad.vol_pts[:, 0], quad.vol_pts[:, 1]
    for a, b in itertools.product(range(2 * degree + 3), repeat=2):
        if a + b > 2 * degree + 2:
            continue
        got = np.sum(quad.vol_wts * x ** a * y ** b)
        assert np.isclose(got, _monomial_integral_tri(a, b), rtol=1e-12), (a, b)


@pytest.mark.parametrize("degree", [1, 2])
def test_face_rule_exactness(degree):
    _, quad = make_basis(2, degree)
    for p in range(2 * degree + 3):
        got = np.sum(quad.face_wts * quad.face_pts ** p)
        assert np.isclose(got, 1.0 / (p + 1), rtol=1e-13), p


@pytest.mark.parametrize("dim,degree", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_projection_reproduces_polynomials(dim, degree, rng):
    basis, quad = make_basis(dim, degree)
    coeffs = rng.standard_normal(basis.n_dof)
    vals = eval_field(coeffs, basis, quad.vol_pts)
    back = l2_project(vals, basis, quad)
    assert np.allclose(back, coeffs, atol=1e-13)


def test_gradient_consistency_fd(rng):
    basis, _ = make_basis(2, 2)
    pts = rng.uniform(0.05, 0.3, size=(6, 2))
    eps = 1e-7
    g = basis.eval_grad(pts)
    for d in range(2):
        dp = pts.copy()
        dp[:, d] += eps
        dm = pts.copy()
        dm[:, d] -= eps
        fd = (basis.eval(dp) - basis.eval(dm)) / (2 * eps)
        assert np.allclose(g[:, :, d], fd, atol=1e-6)


def test_mass_matrix_scaling():
    basis, _ = make_basis(2, 1)
    detJ = np.array([0.5, 2.0])
    M = mass_matrix(detJ, basis)
    assert M.shape == (2, basis.n_dof, basis.n_dof)
    assert np.allclose(M[1], 4.0 * M[0])
