"""Conserved-quantity diagnostics and pointwise field summaries.

Linear momentum, angular momentum and mass are level quantities read off
the trace momenta and the flow map. Energy needs more care: velocity is a
per-slab polynomial that jumps across slab interfaces, so the discretely
exact total-energy bookkeeping accumulates the kinetic change slab by slab
through the duality pairing (work-energy form),

    dE_kin|slab = [<pihat, vhat> - 1/2 rho0 vhat' M vhat]_end
                - [<pihat, vhat> - 1/2 rho0 vhat' M vhat]_start,

evaluated with that slab's own start/end velocity traces. At the Picard
fixed point this change cancels the internal-energy change to round-off;
the accumulated series is what invariants.csv reports. The level formula
E_kin = 1/2 <pihat, vhat> is available from energies() for state-wise use.

The internal energy is measured against the constant-pressure environment,

    E_int = int [rho0 W(J) + P_env (J - 1)] dB,

whose J-derivative is minus the gauge pressure; the (J - 1) normalization
makes the undeformed state carry rho0 W(1) |B| exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constitutive import MaterialLaw
from .errors import InvertedElementError
from .fields import LevelState, SampleGrid, SlabSpace

__all__ = [
    "InvariantRecord",
    "InvariantTracker",
    "linear_momentum",
    "angular_momentum",
    "total_mass",
    "energies",
    "point_fields",
    "boundary_positions",
]


@dataclass(frozen=True)
class InvariantRecord:
    """One row of the conservation time series."""

    t: float
    px: float
    py: float
    L: float
    mass: float
    e_kin: float
    e_int: float
    e_tot: float
    picard_iters: int

    HEADER = "t,px,py,L,mass,E_kin,E_int,E_tot,picard_iters"

    def as_row(self) -> str:
        vals = [self.t, self.px, self.py, self.L, self.mass,
                self.e_kin, self.e_int, self.e_tot]
        return ",".join(f"{v:.17g}" for v in vals) + f",{self.picard_iters}"


def linear_momentum(pi_hat) -> float:
    """Total momentum component: duality pairing with the all-ones trace."""
    return float(np.sum(pi_hat))


def angular_momentum(pi_hat_x, pi_hat_y, phi_x, phi_y) -> float:
    """Moment about the reference origin, as a pair of coefficient dot products."""
    return float(pi_hat_x @ phi_y - pi_hat_y @ phi_x)


def _level_volume_ratio(space: SlabSpace, level: LevelState):
    j = space.level_jacobian_at_quad(level)
    if np.any(j <= 0):
        raise InvertedElementError(
            f"non-positive volume ratio at a quadrature point (min J = {j.min():.3e})"
        )
    return j


def total_mass(space: SlabSpace, law: MaterialLaw, level: LevelState) -> float:
    """Mass of the deformed body, int rho J dB with rho = rho0 / J.

    Structurally rho0 x area; computed through the full reconstruction
    pipeline so it exercises (and validates) the level Jacobian.
    """
    j = _level_volume_ratio(space, level)
    density = law.rho0 / j
    return float((space.w2 * density * j).sum() * space.sx * space.sy)


def internal_energy_total(space: SlabSpace, law: MaterialLaw, level: LevelState) -> float:
    """Gauge-consistent internal energy at a time level (see module docstring)."""
    j = _level_volume_ratio(space, level)
    dens = law.rho0 * law.internal_energy(j) + law.p_env * (j - 1.0)
    return float((space.w2 * dens).sum() * space.sx * space.sy)


def kinetic_energy_level(pi_hat_x, pi_hat_y, level: LevelState) -> float:
    """Level kinetic energy 1/2 <pihat, vhat> by duality pairing."""
    return 0.5 * float(pi_hat_x @ level.vx + pi_hat_y @ level.vy)


def energies(space: SlabSpace, law: MaterialLaw, level: LevelState,
             pi_hat_x, pi_hat_y):
    """(E_kin, E_int) of one time level."""
    return (kinetic_energy_level(pi_hat_x, pi_hat_y, level),
            internal_energy_total(space, law, level))


class InvariantTracker:
    """Builds the conservation time series across a stacked run.

    Feed it the initial trace data, then push each SlabResult in order;
    records() returns one InvariantRecord per time level including t0.
    """

    def __init__(self, space: SlabSpace, law: MaterialLaw,
                 phi_hat_x, phi_hat_y, pi_hat_x, pi_hat_y, t0: float = 0.0):
        self.space = space
        self.law = law
        self._m_trace = law.rho0 * space.mass_trace
        v0x = np.linalg.solve(self._m_trace, pi_hat_x)
        v0y = np.linalg.solve(self._m_trace, pi_hat_y)
        level0 = LevelState(t=t0, phi_x=np.asarray(phi_hat_x, dtype=float),
                            phi_y=np.asarray(phi_hat_y, dtype=float), vx=v0x, vy=v0y)
        self._prev_pi = (np.asarray(pi_hat_x, dtype=float), np.asarray(pi_hat_y, dtype=float))
        self.e_kin = 0.5 * float(pi_hat_x @ v0x + pi_hat_y @ v0y)
        self.level0 = level0
        self.records = [self._record(level0, pi_hat_x, pi_hat_y, picard_iters=0)]

    def _record(self, level, pi_x, pi_y, picard_iters) -> InvariantRecord:
        e_int = internal_energy_total(self.space, self.law, level)
        return InvariantRecord(
            t=level.t,
            px=linear_momentum(pi_x),
            py=linear_momentum(pi_y),
            L=angular_momentum(pi_x, pi_y, level.phi_x, level.phi_y),
            mass=total_mass(self.space, self.law, level),
            e_kin=self.e_kin,
            e_int=e_int,
            e_tot=self.e_kin + e_int,
            picard_iters=picard_iters,
        )

    def _pair_minus_half(self, pi_x, pi_y, vx, vy) -> float:
        pair = float(pi_x @ vx + pi_y @ vy)
        vmv = float(vx @ self._m_trace @ vx + vy @ self._m_trace @ vy)
        return pair - 0.5 * vmv

    def push(self, result) -> InvariantRecord:
        """Consume one solved slab; returns the new series row."""
        sol = result.solution
        level_end = result.level_end
        level_start = self.space.level_state(
            sol.phi_x, sol.phi_y, t=result.t_end - self.space.dt, end=False
        )
        px_prev, py_prev = self._prev_pi
        gain = self._pair_minus_half(sol.pi_hat_end_x, sol.pi_hat_end_y,
                                     level_end.vx, level_end.vy)
        loss = self._pair_minus_half(px_prev, py_prev, level_start.vx, level_start.vy)
        self.e_kin += gain - loss
        self._prev_pi = (sol.pi_hat_end_x, sol.pi_hat_end_y)
        rec = self._record(level_end, sol.pi_hat_end_x, sol.pi_hat_end_y,
                           picard_iters=sol.picard_iters)
        self.records.append(rec)
        return rec


def point_fields(space: SlabSpace, law: MaterialLaw, level: LevelState,
                 grid: SampleGrid):
    """Snapshot table at the grid points of one time level.

    Returns a dict of arrays with keys X, Y (reference), x, y (deformed),
    pressure, density, mach, plus an 'inverted' boolean mask. Points with
    non-positive J are flagged and carry NaN fields, they do not abort.
    """
    x_ref, y_ref = grid.points()
    x, y, vx, vy, j = space.level_fields_at(level, x_ref, y_ref)
    inverted = j <= 0
    j_safe = np.where(inverted, 1.0, j)
    pressure = np.where(inverted, np.nan, law.pressure(j_safe))
    density = np.where(inverted, np.nan, law.rho0 / j_safe)
    mach = np.where(inverted, np.nan, np.hypot(vx, vy) / law.sound_speed(j_safe))
    return {
        "X": x_ref, "Y": y_ref, "x": x, "y": y,
        "pressure": pressure, "density": density, "mach": mach,
        "inverted": inverted,
    }


def boundary_positions(space: SlabSpace, level: LevelState, grid: SampleGrid):
    """Deformed positions of the reference-boundary sample points."""
    bx, by = grid.boundary_points()
    x, y, _, _, _ = space.level_fields_at(level, bx, by)
    return x, y
