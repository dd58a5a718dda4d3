"""Registry of benchmark problems for the two-component solver.

Each entry fixes the domain, the pair of stiffened-gas components, the
boundary treatment, the stopping time, and the mesh-adaptation parameters,
plus closures for the initial primitive fields and, where one exists, the
exact solution.  Mass fraction 1 selects component 1 of the problem's EOS.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .eos import MixtureEOS
from .mesh import build_interval_mesh, build_rect_mesh
from .riemann import RiemannState, solution_at


@dataclass(frozen=True)
class Problem:
    name: str
    dim: int
    domain: tuple
    eos: MixtureEOS
    t_final: float
    # 1D: (left, right); 2D: dict with left/right/bottom/top
    bc: object
    tau: float
    default_n: object
    beta: tuple = (1.0, 1.0, 0.0)
    # initial(x) or initial(x, y) -> (rho, u, v, P, Y)
    initial: Callable = None
    # exact(x, t) or exact(x, y, t) -> (rho, u, v, P, Y), or None
    exact: Callable = None
    description: str = ""

    def build_mesh(self, n=None):
        """Mesh at resolution n (1D count or 2D (nx, ny)), default resolution if None."""
        n = self.default_n if n is None else n
        if self.dim == 1:
            return build_interval_mesh(self.domain[0], self.domain[1], int(n),
                                       self.bc[0], self.bc[1])
        nx, ny = (int(n[0]), int(n[1])) if np.iterable(n) else (int(n), int(n))
        return build_rect_mesh(nx, ny, self.domain, dict(self.bc))


def _two_state(x, left_vals, right_vals, x0):
    out = []
    onl = x <= x0
    for a, b in zip(left_vals, right_vals):
        out.append(np.where(onl, a, b))
    return tuple(out)


def _sine_wave_initial(x):
    rho = 1.0 + 0.2 * np.sin(np.pi * x)
    one = np.ones_like(x)
    return rho, one, 0.0 * x, one.copy(), 0.5 + 0.5 * np.sin(np.pi * x)


def _sine_wave_exact(x, t):
    # constant u = 1, P = 1: density and mass fraction translate unchanged
    return _sine_wave_initial(x - t)


def _interface_initial(x):
    return _two_state(x, (1.0, 1.0, 0.0, 1.0, 1.0),
                      (0.125, 1.0, 0.0, 1.0, 0.0), 0.0)


def _interface_exact(x, t):
    return _interface_initial(x - t)


def _shock_sine_initial(x):
    onl = x <= -4.0
    rho = np.where(onl, 3.857143, 1.0 + 0.2 * np.sin(5.0 * x))
    u = np.where(onl, 2.629369, 0.0)
    P = np.where(onl, 31.0 / 3.0, 1.0)
    Y = np.where(onl, 1.0, 0.0)
    return rho, u, 0.0 * x, P, Y


_GAS_LIQUID_LEFT = RiemannState(1e3, 0.0, 1e9, 4.4, 6e8)
_GAS_LIQUID_RIGHT = RiemannState(50.0, 0.0, 1e5, 1.4, 0.0)


def _gas_liquid_initial(x):
    return _two_state(x, (1e3, 0.0, 0.0, 1e9, 1.0),
                      (50.0, 0.0, 0.0, 1e5, 0.0), 0.5)


def _gas_liquid_exact(x, t):
    if t <= 0.0:
        return _gas_liquid_initial(x)
    rho, u, P, Y = solution_at(_GAS_LIQUID_LEFT, _GAS_LIQUID_RIGHT, x, t, x0=0.5)
    return rho, u, 0.0 * rho, P, Y


def _sine_wave_2d_initial(x, y):
    rho = 1.0 + 0.2 * np.sin(np.pi * (x + y))
    one = np.ones_like(rho)
    return rho, one, one.copy(), one.copy(), 0.5 + 0.5 * np.sin(np.pi * (x + y))


def _sine_wave_2d_exact(x, y, t):
    return _sine_wave_2d_initial(x - t, y - t)


def _circle_advect_initial(x, y):
    inside = (x - 0.2) ** 2 + (y - 0.2) ** 2 <= 0.01
    rho = np.where(inside, 2.0, 1.0)
    one = np.ones_like(rho)
    return rho, one, one.copy(), one.copy(), np.where(inside, 1.0, 0.0)


def _shock_bubble_initial(x, y):
    bub = x ** 2 + y ** 2 <= 1.0
    postshock = (x < -1.2) & ~bub
    rho = np.where(bub, 0.138, np.where(postshock, 1.3764, 1.0))
    u = np.where(postshock, 0.394, 0.0)
    P = np.where(bub, 1.0, np.where(postshock, 1.5698, 1.0))
    return rho, u, 0.0 * rho, P, np.where(bub, 1.0, 0.0)


def _underwater_blast_initial(x, y):
    air = y > 0.0
    bub = (x ** 2 + (y + 0.3) ** 2 <= 0.12 ** 2) & ~air
    rho = np.where(air, 1.225, np.where(bub, 1250.0, 1000.0))
    P = np.where(air, 101325.0, np.where(bub, 1e9, 101325.0))
    Y = np.where(air | bub, 1.0, 0.0)
    return rho, 0.0 * rho, 0.0 * rho, P, Y


_OPEN = dict(left="copy", right="copy", bottom="copy", top="copy")

PROBLEMS = {
    "sine-wave": Problem(
        name="sine-wave", dim=1, domain=(0.0, 2.0),
        eos=MixtureEOS(1.4, 1.0, 1.9, 0.0),
        t_final=0.5, bc=("periodic", "periodic"), tau=0.1, default_n=40,
        initial=_sine_wave_initial, exact=_sine_wave_exact,
        description="smooth two-component density and mass-fraction wave advected at unit speed",
    ),
    "interface": Problem(
        name="interface", dim=1, domain=(-5.0, 5.0),
        eos=MixtureEOS(1.4, 1.0, 1.9, 0.0),
        t_final=2.0, bc=("copy", "copy"), tau=1e-3, default_n=100,
        initial=_interface_initial, exact=_interface_exact,
        description="isolated material interface moving at unit speed, constant pressure and velocity",
    ),
    "shu-osher": Problem(
        name="shu-osher", dim=1, domain=(-5.0, 5.0),
        eos=MixtureEOS(1.4, 1.0, 1.9, 0.0),
        t_final=1.8, bc=("copy", "copy"), tau=1e-3, default_n=150,
        initial=_shock_sine_initial,
        description="shock running into a sinusoidal density field, two-component variant",
    ),
    "gas-liquid": Problem(
        name="gas-liquid", dim=1, domain=(-0.2, 1.0),
        eos=MixtureEOS(4.4, 6e8, 1.4, 0.0),
        t_final=2e-4, bc=("copy", "copy"), tau=1e-3, default_n=2000,
        initial=_gas_liquid_initial, exact=_gas_liquid_exact,
        description="water column driving a strong shock into gas, 1e4 pressure ratio",
    ),
    "sine-wave-2d": Problem(
        name="sine-wave-2d", dim=2, domain=(0.0, 2.0, 0.0, 2.0),
        eos=MixtureEOS(1.4, 1.0, 1.9, 0.0),
        t_final=1.0,
        bc=dict(left="periodic", right="periodic", bottom="periodic", top="periodic"),
        tau=0.1, default_n=(4, 4),
        initial=_sine_wave_2d_initial, exact=_sine_wave_2d_exact,
        description="smooth diagonal two-component wave advected at unit velocity",
    ),
    "circle-advect": Problem(
        name="circle-advect", dim=2, domain=(0.0, 1.0, 0.0, 1.0),
        eos=MixtureEOS(4.4, 1.0, 1.4, 0.0),
        t_final=0.3, bc=_OPEN, tau=1e-4, default_n=(100, 100),
        initial=_circle_advect_initial,
        description="dense circular blob advected diagonally at constant pressure and velocity",
    ),
    "shock-bubble": Problem(
        name="shock-bubble", dim=2, domain=(-3.0, 4.0, -3.0, 3.0),
        eos=MixtureEOS(5.0 / 3.0, 0.0, 1.4, 0.0),
        t_final=4.0,
        bc=dict(left="copy", right="copy", bottom="reflect", top="reflect"),
        tau=1e-4, default_n=(70, 60), beta=(1.0, 1.0, 1.0),
        initial=_shock_bubble_initial,
        description="planar air shock hitting a light gas bubble",
    ),
    "underwater-blast": Problem(
        name="underwater-blast", dim=2, domain=(-2.0, 2.0, -1.5, 1.0),
        eos=MixtureEOS(1.4, 0.0, 4.4, 6e8),
        t_final=1.2,
        bc=dict(left="copy", right="copy", bottom="reflect", top="copy"),
        tau=1e-4, default_n=(120, 75), beta=(1.0, 1.0, 1.0),
        initial=_underwater_blast_initial,
        description="pressurized gas pocket under a free surface, shock diffracting through the interface",
    ),
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]
    except KeyError:
        known = ", ".join(sorted(PROBLEMS))
        raise KeyError(f"unknown problem {name!r}; choose one of {known}") from None


def project_initial(disc, mesh, problem, verts=None):
    """L2-project the problem's initial primitives onto the DG space.

    Returns (W, Y) coefficient arrays.
    """
    verts = mesh.vertices if verts is None else verts
    pts = disc.volume_points(verts)
    if mesh.dim == 1:
        rho, u, v, P, Y = problem.initial(pts)
    else:
        rho, u, v, P, Y = problem.initial(pts[..., 0], pts[..., 1])
    W = np.stack([disc.project(c) for c in
                  problem.eos.conserved_from_primitive(rho, u, v, P, Y)], axis=1)
    return W, disc.project(Y)
