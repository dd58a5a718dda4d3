"""Stiffened-gas equation of state for a two-component mixture.

Each component k has its own (gamma_k, B_k) and satisfies
rho*e = (P + gamma_k*B_k)/(gamma_k - 1).  Writing kappa = 1/(gamma-1) and
chi = gamma*B/(gamma-1), the mixture closes with kappa and chi exactly
linear in the mass fraction Y, which is what keeps interface pressures
free of spurious oscillations in the transport scheme.  Y is never
clamped; values far outside [0, 1] are reported, not repaired.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# Y outside this window is reported once per call site; the linear mixture
# rules still evaluate fine there.
Y_WARN_LO = -0.1
Y_WARN_HI = 1.1


class PositivityError(RuntimeError):
    """Raised when density or effective pressure leaves the admissible set."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


@dataclass(frozen=True)
class MixtureEOS:
    """Two stiffened gases indexed by mass fraction Y (Y=1 is fluid 1)."""

    gamma1: float
    B1: float
    gamma2: float
    B2: float

    def __post_init__(self):
        if self.gamma1 <= 1.0 or self.gamma2 <= 1.0:
            raise ValueError("gamma must exceed 1 for both components")
        if self.B1 < 0.0 or self.B2 < 0.0:
            raise ValueError("stiffening pressure B must be nonnegative")

    @property
    def kappa1(self):
        return 1.0 / (self.gamma1 - 1.0)

    @property
    def kappa2(self):
        return 1.0 / (self.gamma2 - 1.0)

    @property
    def chi1(self):
        return self.gamma1 * self.B1 / (self.gamma1 - 1.0)

    @property
    def chi2(self):
        return self.gamma2 * self.B2 / (self.gamma2 - 1.0)

    def kappa_chi(self, Y):
        """Mixture kappa(Y), chi(Y); both are affine in Y by construction."""
        Y = np.asarray(Y)
        if Y.size and (np.min(Y) < Y_WARN_LO or np.max(Y) > Y_WARN_HI):
            # static message so the default warning filter reports it once
            warnings.warn(
                "mass fraction outside [%g, %g]" % (Y_WARN_LO, Y_WARN_HI),
                RuntimeWarning,
                stacklevel=2,
            )
        kappa = Y * self.kappa1 + (1.0 - Y) * self.kappa2
        chi = Y * self.chi1 + (1.0 - Y) * self.chi2
        return kappa, chi

    def gamma_B(self, Y):
        """Effective (gamma, B) of the mixture: gamma = 1 + 1/kappa, B = chi/(kappa*gamma)."""
        kappa, chi = self.kappa_chi(Y)
        gamma = 1.0 + 1.0 / kappa
        B = chi / (kappa * gamma)
        return gamma, B

    def pressure(self, rho, rhoU, rhoV, E, Y):
        """Pressure from conserved variables: P = (E - 0.5*rho*|u|^2 - chi)/kappa."""
        kappa, chi = self.kappa_chi(Y)
        kinetic = 0.5 * (rhoU * rhoU + rhoV * rhoV) / rho
        return (E - kinetic - chi) / kappa

    def total_energy(self, rho, u, v, P, Y):
        """E = kappa*P + chi + 0.5*rho*|u|^2."""
        kappa, chi = self.kappa_chi(Y)
        return kappa * P + chi + 0.5 * rho * (u * u + v * v)

    def sound_speed(self, rho, P, Y):
        """c = sqrt(gamma_mix*(P + B_mix)/rho); raises on a nonpositive argument."""
        gamma, B = self.gamma_B(Y)
        arg = gamma * (P + B) / rho
        if np.any(arg <= 0.0) or np.any(rho <= 0.0):
            bad = np.nonzero(np.atleast_1d((arg <= 0.0) | (rho <= 0.0)))[0]
            raise PositivityError(
                "sound speed undefined: rho or P+B nonpositive", where=bad
            )
        return np.sqrt(arg)

    def primitive_from_conserved(self, W, Y, check=True):
        """(rho, u, v, P) from conserved rows W = (rho, rhoU, rhoV, E).

        W has component axis first: shape (4, ...).  Errors carry the flat
        indices of offending entries when check is on.
        """
        rho, rhoU, rhoV, E = W[0], W[1], W[2], W[3]
        if check and np.any(rho <= 0.0):
            bad = np.nonzero(np.atleast_1d(rho <= 0.0).ravel())[0]
            raise PositivityError("nonpositive density", where=bad)
        u = rhoU / rho
        v = rhoV / rho
        kappa, chi = self.kappa_chi(Y)
        P = (E - 0.5 * rho * (u * u + v * v) - chi) / kappa
        if check:
            gamma, B = self.gamma_B(Y)
            if np.any(P + B <= 0.0):
                bad = np.nonzero(np.atleast_1d(P + B <= 0.0).ravel())[0]
                raise PositivityError("nonpositive effective pressure P+B", where=bad)
        return rho, u, v, P

    def conserved_from_primitive(self, rho, u, v, P, Y):
        """Stack (rho, rhoU, rhoV, E) from primitives; inverse of the above."""
        rho, u, v, P, Y = np.broadcast_arrays(rho, u, v, P, Y)
        E = self.total_energy(rho, u, v, P, Y)
        return np.stack([rho, rho * u, rho * v, E])
