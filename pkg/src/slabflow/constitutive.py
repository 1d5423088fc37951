"""Barotropic material law and the two weighted mass matrices.

Equation of state closure: isentropic ideal gas,

    p(rho) = P_ref (rho / rho0)^gamma   =>   P_W(J) = P_ref J^(-gamma),

the unique simple closure consistent with a pressure that is work-conjugate
to the volume ratio J = rho0 / rho and the parameter set (rho0, gamma,
P_ref). The specific internal energy is normalized with no additive
constant,

    W(J) = P_ref J^(1-gamma) / (rho0 (gamma - 1)),

so that -rho0 W'(J) = P_W(J) and the sound speed is
c = sqrt(gamma P_W(J) J / rho0).

The environment pressure P_env enters the dynamics only through the gauge
weight P_W(J) - P_env, which is folded into the pressure-weighted mass
matrix (constant external pressure contracted into the domain integral).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvertedElementError

__all__ = ["MaterialLaw", "assemble_m_rho0", "assemble_m_pw"]


@dataclass(frozen=True)
class MaterialLaw:
    """Barotropic EOS parameters: reference density, heat ratio, pressures."""

    rho0: float
    gamma: float
    p_ref: float
    p_env: float

    def __post_init__(self):
        if self.rho0 <= 0:
            raise ValueError("rho0 must be positive")
        if self.gamma <= 1:
            raise ValueError("gamma must exceed 1")
        if self.p_ref <= 0:
            raise ValueError("p_ref must be positive")
        if self.p_env < 0:
            raise ValueError("p_env must be non-negative")

    @staticmethod
    def _check_j(j):
        if np.any(np.asarray(j) <= 0):
            raise ValueError("volume ratio J must be positive")

    def pressure(self, j):
        """Material pressure P_W(J) = P_ref J^(-gamma), strictly decreasing."""
        self._check_j(j)
        return self.p_ref * np.asarray(j, dtype=float) ** (-self.gamma)

    def gauge_pressure(self, j):
        """P_W(J) - P_env, the stress weight after contracting the exterior."""
        return self.pressure(j) - self.p_env

    def internal_energy(self, j):
        """Specific internal energy W(J), J/kg, with -rho0 W'(J) = P_W(J)."""
        self._check_j(j)
        j = np.asarray(j, dtype=float)
        return self.p_ref * j ** (1.0 - self.gamma) / (self.rho0 * (self.gamma - 1.0))

    def sound_speed(self, j):
        """c = sqrt(gamma p / rho) with p = P_W(J), rho = rho0 / J."""
        self._check_j(j)
        return np.sqrt(self.gamma * self.pressure(j) * np.asarray(j, dtype=float) / self.rho0)


def assemble_m_rho0(law: MaterialLaw, space) -> np.ndarray:
    """Density-weighted Gram matrix of the physical temporal-edge basis.

    Assembled by tensor quadrature over the slab; symmetric positive
    definite and independent of the solution.
    """
    scale = law.rho0 * space.volume_scale / space.st**2
    psi = space.psi_tedge
    m = scale * (psi * space.w3) @ psi.T
    return 0.5 * (m + m.T)


def assemble_m_pw(law: MaterialLaw, space, j_quad) -> np.ndarray:
    """Pressure-weighted cross Gram matrix of the spatial edge bases.

    Entry (a, b) integrates (P_W(J) - P_env) Psi^xi_a Psi^eta_b over the
    slab using the space's tensor quadrature; j_quad holds the volume ratio
    at those quadrature points and must be strictly positive.
    """
    j_quad = np.asarray(j_quad, dtype=float)
    if np.any(j_quad <= 0):
        raise InvertedElementError(
            f"non-positive volume ratio at quadrature point (min J = {j_quad.min():.3e})"
        )
    weight = law.gauge_pressure(j_quad) * space.w3 * space.st
    return (space.psi_xedge * weight) @ space.psi_yedge.T
