"""Modal DG bases and quadrature on the reference interval/triangle.

Reference elements: the unit interval [0,1] and the unit right triangle
with vertices (0,0), (1,0), (0,1).  Bases are orthogonal on the reference
element (Gram-Schmidt of monomials against exact moments), the first
function is the constant 1, so reference mass matrices are diagonal and a
physical mass matrix is just (det J) * diag(mhat).  Quadrature exactness
is 2k+2 for degree-k fields, enough to make every polynomial identity the
scheme leans on (divergence cancellations, primitive/conserved
reprojection) hold to round-off.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

# Dunavant symmetric triangle rules, barycentric points with weights
# normalized to sum to 1 (integral = area * sum w f).  Degree 4 and 6.
_DUNAVANT_4 = [
    (0.223381589678011, (0.108103018168070, 0.445948490915965, 0.445948490915965)),
    (0.109951743655322, (0.816847572980459, 0.091576213509771, 0.091576213509771)),
]
_DUNAVANT_6 = [
    (0.116786275726379, (0.501426509658179, 0.249286745170910, 0.249286745170910)),
    (0.050844906370207, (0.873821971016996, 0.063089014491502, 0.063089014491502)),
    (0.082851075618374, (0.053145049844816, 0.310352451033785, 0.636502499121399)),
]


def _expand_orbits(orbits):
    pts = []
    wts = []
    for w, bary in orbits:
        seen = set()
        a, b, c = bary
        perms = [(a, b, c), (b, c, a), (c, a, b), (a, c, b), (c, b, a), (b, a, c)]
        for p in perms:
            key = tuple(round(x, 14) for x in p)
            if key in seen:
                continue
            seen.add(key)
            pts.append(p)
            wts.append(w)
    return np.array(pts), np.array(wts)


def _tri_monomial_integral(a, b):
    # exact moment over the unit right triangle
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


# monomial exponent tables per degree
_EXPON_2D = {1: [(0, 0), (1, 0), (0, 1)],
             2: [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]}


class Basis:
    """Orthogonal modal basis of total degree k on the reference element.

    Attributes
    ----------
    dim : 1 or 2
    degree : polynomial degree k (1 or 2)
    n_dof : per-element, per-component coefficient count
    mhat : (n_dof,) diagonal of the reference mass matrix; physical mass
        matrix is det(J) * diag(mhat) with det(J) = h in 1D, 2*|K| in 2D.
    """

    def __init__(self, dim, degree):
        if dim not in (1, 2) or degree not in (1, 2):
            raise ValueError("dim and degree must each be 1 or 2")
        self.dim = dim
        self.degree = degree
        if dim == 1:
            # shifted Legendre-type: 1, (x-1/2), (x-1/2)^2 - 1/12
            self.n_dof = degree + 1
            # coefficients in powers of x on [0,1]
            coef = np.zeros((self.n_dof, 3))
            coef[0, 0] = 1.0
            coef[1, :2] = (-0.5, 1.0)
            if degree == 2:
                coef[2, :] = (0.25 - 1.0 / 12.0, -1.0, 1.0)
            self._coef = coef
            self._expon = None
            self.mhat = np.array([1.0, 1.0 / 12.0, 1.0 / 180.0])[: self.n_dof]
        else:
            expon = _EXPON_2D[degree]
            self.n_dof = len(expon)
            self._expon = expon
            self._coef, self.mhat = self._orthogonalize(expon)

    @staticmethod
    def _orthogonalize(expon):
        n = len(expon)
        # Gram matrix of monomials from exact moments
        G = np.empty((n, n))
        for i, (a, b) in enumerate(expon):
            for j, (c, d) in enumerate(expon):
                G[i, j] = _tri_monomial_integral(a + c, b + d)
        C = np.eye(n)
        mhat = np.empty(n)
        for i in range(n):
            for j in range(i):
                proj = C[i] @ G @ C[j] / mhat[j]
                C[i] -= proj * C[j]
            mhat[i] = C[i] @ G @ C[i]
        return C, mhat

    # --- evaluation -----------------------------------------------------

    def eval(self, pts):
        """Basis values at reference points.

        pts: (q,) in 1D or (q, 2) in 2D.  Returns (q, n_dof).
        """
        pts = np.asarray(pts, dtype=float)
        if self.dim == 1:
            x = pts.reshape(-1)
            powers = np.stack([np.ones_like(x), x, x * x], axis=1)
            return powers @ self._coef.T
        x, y = pts[:, 0], pts[:, 1]
        mono = np.stack([x ** a * y ** b for a, b in self._expon], axis=1)
        return mono @ self._coef.T

    def eval_grad(self, pts):
        """Reference gradients at reference points: (q, n_dof, dim)."""
        pts = np.asarray(pts, dtype=float)
        if self.dim == 1:
            x = pts.reshape(-1)
            dpow = np.stack([np.zeros_like(x), np.ones_like(x), 2.0 * x], axis=1)
            return (dpow @ self._coef.T)[:, :, None]
        x, y = pts[:, 0], pts[:, 1]
        dx = np.stack(
            [a * x ** max(a - 1, 0) * y ** b if a else np.zeros_like(x)
             for a, b in self._expon], axis=1)
        dy = np.stack(
            [b * x ** a * y ** max(b - 1, 0) if b else np.zeros_like(x)
             for a, b in self._expon], axis=1)
        return np.stack([dx @ self._coef.T, dy @ self._coef.T], axis=2)


class Quadrature:
    """Volume and face rules for one reference element.

    Volume weights sum to the reference measure (1 for [0,1], 1/2 for the
    triangle); face weights sum to 1 on the unit edge parameter.
    """

    def __init__(self, dim, degree):
        self.dim = dim
        self.degree = degree
        self.exactness = 2 * degree + 2
        if dim == 1:
            n = degree + 2  # Gauss-Legendre, exact through 2n-1 >= 2k+2
            x, w = np.polynomial.legendre.leggauss(n)
            self.vol_pts = 0.5 * (x + 1.0)
            self.vol_wts = 0.5 * w
            self.face_pts = np.array([0.0, 1.0])  # element endpoints
            self.face_wts = np.array([1.0, 1.0])
        else:
            orbits = _DUNAVANT_4 if degree == 1 else _DUNAVANT_6
            bary, w = _expand_orbits(orbits)
            # drop the first barycentric coordinate: reference (x, y)
            self.vol_pts = bary[:, 1:]
            self.vol_wts = 0.5 * w  # reference triangle area is 1/2
            self.bary = bary
            nf = degree + 2  # line rule exact through 2nf-1 >= 2k+2
            x, w = np.polynomial.legendre.leggauss(nf)
            self.face_pts = 0.5 * (x + 1.0)
            self.face_wts = 0.5 * w


@lru_cache(maxsize=None)
def make_basis(dim, degree):
    """Basis + quadrature pair; cached, instances are immutable in use."""
    return Basis(dim, degree), Quadrature(dim, degree)


def mass_matrix(detJ, basis):
    """Physical mass matrices for a batch of elements.

    detJ: (...,) Jacobian determinants (h in 1D, 2|K| in 2D).
    Returns (..., n_dof, n_dof); diagonal because the basis is orthogonal.
    """
    detJ = np.asarray(detJ)
    out = np.zeros(detJ.shape + (basis.n_dof, basis.n_dof))
    idx = np.arange(basis.n_dof)
    out[..., idx, idx] = detJ[..., None] * basis.mhat
    return out


def l2_project(fvals, basis, quad):
    """Modal coefficients of the L2 projection from point values.

    fvals: (..., q) samples at quad.vol_pts.  The projection is geometry
    independent for affine maps: c_m = sum_q w_q f_q phi_m(q) / mhat_m.
    """
    phi = basis.eval(quad.vol_pts)  # (q, m)
    return np.einsum("...q,qm,q->...m", fvals, phi, quad.vol_wts) / basis.mhat


def eval_field(coeffs, basis, pts):
    """Field values at reference points: coeffs (..., m) -> (..., q)."""
    phi = basis.eval(pts)
    return np.einsum("...m,qm->...q", coeffs, phi)
