import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from dgale.eos import MixtureEOS
from dgale.kinetic_flux import (EdgeTrace, kinetic_moments, nok_edge_flux,
                                riemann_edge_velocity, species_flux)

TWO_GASES = MixtureEOS(1.4, 0.0, 1.9, 0.0)

finite = dict(allow_nan=False, allow_infinity=False)
vel_st = st.floats(-8.0, 8.0, **finite)
c_st = st.floats(0.05, 20.0, **finite)


@given(ut_l=vel_st, ut_r=vel_st, c_l=c_st, c_r=c_st)
def test_half_moment_bounds(ut_l, ut_r, c_l, c_r):
    mom = kinetic_moments(ut_l, ut_r, c_l, c_r)
    assert 0.0 <= mom.u0p <= 1.0
    assert 0.0 <= mom.u0m <= 1.0
    assert mom.lam > 0.0
    assert mom.u1p >= 0.0 >= mom.u1m  # signed half-fluxes


@given(ut=vel_st, c=c_st)
def test_equal_state_split_is_a_partition(ut, c):
    mom = kinetic_moments(ut, ut, c, c)
    assert np.isclose(mom.u0p + mom.u0m, 1.0, atol=1e-14)
    assert np.isclose(mom.u1p + mom.u1m, ut, atol=1e-12 * max(1, abs(ut)))


def _quad_half_moment(k, ut, lam, side):
    # int over one half-line of u^k times the unit-mass Gaussian in u - ut
    sig = 1.0 / np.sqrt(2.0 * lam)

    def f(u):
        return u ** k * np.exp(-((u - ut) / sig) ** 2 / 2.0) / (sig * np.sqrt(2 * np.pi))

    lo, hi = (0.0, ut + 60 * sig) if side > 0 else (ut - 60 * sig, 0.0)
    if hi <= lo:
        return 0.0
    val, err = quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def test_half_moments_match_quadrature(rng):
    ut = rng.uniform(-4.0, 4.0, size=60)
    c = rng.uniform(0.2, 6.0, size=60)
    mom = kinetic_moments(ut, ut, c, c)
    for i in range(len(ut)):
        lam = mom.lam[i]
        for got, k, side in ((mom.u0p[i], 0, +1), (mom.u0m[i], 0, -1),
                             (mom.u1p[i], 1, +1), (mom.u1m[i], 1, -1)):
            want = _quad_half_moment(k, ut[i], lam, side)
            assert abs(got - want) <= 1e-11 * max(1.0, abs(want)), (i, k, side)


def _random_trace(rng, n, eos):
    rho = rng.uniform(0.1, 10.0, size=(2, n))
    u = rng.uniform(-5.0, 5.0, size=(2, n))
    v = rng.uniform(-5.0, 5.0, size=(2, n))
    P = rng.uniform(0.1, 50.0, size=(2, n))
    Y = rng.uniform(0.0, 1.0, size=(2, n))
    th = rng.uniform(0.0, 2 * np.pi, size=n)
    ug = rng.uniform(-2.0, 2.0, size=n)
    vg = rng.uniform(-2.0, 2.0, size=n)
    return EdgeTrace(rho[0], u[0], v[0], P[0], Y[0],
                     rho[1], u[1], v[1], P[1], Y[1],
                     np.cos(th), np.sin(th), ug, vg)


def test_flux_conservation_under_side_swap(rng):
    eos = TWO_GASES
    t = _random_trace(rng, 400, eos)
    H, FY, _ = nok_edge_flux(t, eos)
    flipped = EdgeTrace(t.rho_r, t.u_r, t.v_r, t.P_r, t.Y_r,
                        t.rho_l, t.u_l, t.v_l, t.P_l, t.Y_l,
                        -t.nx, -t.ny, t.ug, t.vg)
    H2, FY2, _ = nok_edge_flux(flipped, eos)
    scale = np.maximum(1.0, np.abs(H))
    assert np.all(np.abs(H + H2) <= 1e-12 * scale)
    assert np.all(np.abs(FY + FY2) <= 1e-12 * np.maximum(1.0, np.abs(FY)))


def test_species_flux_mirrors_mass_split():
    mom = kinetic_moments(np.array([0.7]), np.array([-0.3]),
                          np.array([1.1]), np.array([0.9]))
    f = species_flux(np.array([0.25]), np.array([0.75]), mom)
    assert np.isclose(f[0], 0.25 * mom.u1p[0] + 0.75 * mom.u1m[0], rtol=1e-14)


def test_riemann_edge_velocity_consistency():
    u = np.array([-1.3, 0.0, 2.4])
    c = np.array([0.8, 1.0, 3.0])
    got = riemann_edge_velocity(u, u, c, c)
    assert np.allclose(got, u, atol=1e-13)


def test_strong_upwind_limits():
    # supersonic left-to-right flow: everything comes from the left state
    mom = kinetic_moments(8.0, 8.0, 0.5, 0.5)
    assert mom.u0p > 1.0 - 1e-12
    assert abs(mom.u0m) < 1e-12
    f = species_flux(0.2, 0.9, mom)
    assert np.isclose(f, 0.2 * 8.0, rtol=1e-10)


def test_nonfinite_input_rejected():
    with pytest.raises(ValueError):
        kinetic_moments(np.nan, 0.0, 1.0, 1.0)
