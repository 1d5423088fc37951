"""Slab block system assembly, Picard iteration, and time stacking.

One slab couples, per velocity component, the dual momentum coefficients,
the nodal flow map, and the dual trace momentum at the slab end. With
nt = #temporal edges, nn = #nodes and ntr = #trace nodes, the unknown
vector is

    u = [pi_x, pi_y, phi_x, phi_y, pihat_end_x, pihat_end_y]

and the square system of size 2 (nt + nn + ntr) reads

    [ Minv        -Et                      ] [pi_x ]   [ 0            ]
    [       Minv       -Et                 ] [pi_y ]   [ 0            ]
    [ Et^T         .    Dpk  -Nend         ] [phi_x] = [ -Nstart a_x  ]
    [       Et^T -Dpk    .          -Nend  ] [phi_y]   [ -Nstart a_y  ]
    [            Ns^T                      ] [pe_x ]   [ phihat_x     ]
    [                   Ns^T               ] [pe_y ]   [ phihat_y     ]

where Minv is the inverse density-weighted velocity mass matrix, Dpk the
skew pressure-force operator rebuilt from the latest volume-ratio field
each Picard iteration, and (a, phihat) are the incoming trace momentum and
flow map. The iteration freezes J (and tr F) from the previous iterate,
reassembles Dpk, solves, and stops when both fields stop changing in the
max norm at the quadrature points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constitutive import MaterialLaw, assemble_m_pw, assemble_m_rho0
from .errors import InvertedElementError, PicardConvergenceError, SingularSystemError
from .fields import LevelState, SlabSpace

__all__ = ["SolverConfig", "SlabOperators", "SlabSolution", "SlabResult",
           "build_dpk", "picard_solve", "time_stack", "initial_conditions"]


@dataclass(frozen=True)
class SolverConfig:
    """Picard iteration knobs for the slab solves."""

    tol: float = 1e-12
    max_picard: int = 50
    relaxation: float = 1.0

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_picard < 1:
            raise ValueError("max_picard must be at least 1")
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError("relaxation must lie in (0, 1]")


def build_dpk(m_pw: np.ndarray, space: SlabSpace) -> np.ndarray:
    """Skew pressure-force operator on nodal DOFs.

    K = Ex^T M_Pw Ey pairs the xi-derivative of a test map with the
    eta-derivative of the flow map under the gauge-pressure weight; the
    operator is K - K^T, skew-symmetric by construction in floating point,
    with constants in its null space because Ex 1 = Ey 1 = 0.
    """
    k = space.inc.ex.T @ m_pw @ space.inc.ey.toarray()
    return k - k.T


class SlabOperators:
    """Everything reused across slabs: template matrix and constant blocks."""

    def __init__(self, space: SlabSpace, law: MaterialLaw):
        self.space = space
        self.law = law
        topo = space.topo
        nt, nn, ntr = topo.n_tedge, topo.n_node, topo.n_trace
        self.nt, self.nn, self.ntr = nt, nn, ntr
        self.size = 2 * (nt + nn + ntr)

        self.m_rho0 = assemble_m_rho0(law, space)
        self.m_rho0_inv = np.linalg.inv(self.m_rho0)

        et = space.inc.et.toarray().astype(float)
        n_start = space.inc.n_start.toarray().astype(float)
        n_end = space.inc.n_end.toarray().astype(float)
        self._n_start = n_start

        # slice offsets: [pi_x, pi_y, phi_x, phi_y, pihat_end_x, pihat_end_y]
        o = np.cumsum([0, nt, nt, nn, nn, ntr, ntr])
        self.s_pix = slice(o[0], o[1])
        self.s_piy = slice(o[1], o[2])
        self.s_phx = slice(o[2], o[3])
        self.s_phy = slice(o[3], o[4])
        self.s_pex = slice(o[4], o[5])
        self.s_pey = slice(o[5], o[6])

        a = np.zeros((self.size, self.size))
        a[self.s_pix, self.s_pix] = self.m_rho0_inv
        a[self.s_piy, self.s_piy] = self.m_rho0_inv
        a[self.s_pix, self.s_phx] = -et
        a[self.s_piy, self.s_phy] = -et
        a[self.s_phx, self.s_pix] = et.T
        a[self.s_phy, self.s_piy] = et.T
        a[self.s_phx, self.s_pex] = -n_end
        a[self.s_phy, self.s_pey] = -n_end
        a[self.s_pex, self.s_phx] = n_start.T
        a[self.s_pey, self.s_phy] = n_start.T
        self._template = a

    def assemble(self, j_quad) -> np.ndarray:
        """Block matrix for the given volume-ratio field at quadrature points."""
        m_pw = assemble_m_pw(self.law, self.space, j_quad)
        dpk = build_dpk(m_pw, self.space)
        a = self._template.copy()
        a[self.s_phx, self.s_phy] = dpk
        a[self.s_phy, self.s_phx] = -dpk
        return a

    def rhs(self, phi_hat_x, phi_hat_y, pi_hat_x, pi_hat_y) -> np.ndarray:
        b = np.zeros(self.size)
        b[self.s_phx] = -self._n_start @ pi_hat_x
        b[self.s_phy] = -self._n_start @ pi_hat_y
        b[self.s_pex] = phi_hat_x
        b[self.s_pey] = phi_hat_y
        return b


@dataclass
class SlabSolution:
    """Converged DOF vectors of one slab plus Picard bookkeeping."""

    phi_x: np.ndarray
    phi_y: np.ndarray
    pi_x: np.ndarray
    pi_y: np.ndarray
    pi_hat_end_x: np.ndarray
    pi_hat_end_y: np.ndarray
    picard_iters: int
    residuals: list = field(default_factory=list)


def _tile_trace(space: SlabSpace, trace):
    """Constant-in-time nodal extension of a spatial trace vector."""
    return np.tile(trace, space.t_order + 1)


def picard_solve(ops: SlabOperators, phi_hat_x, phi_hat_y, pi_hat_x, pi_hat_y,
                 cfg: SolverConfig, slab: int = 0) -> SlabSolution:
    """Solve one slab to the Picard fixed point.

    The first iterate freezes J and tr F from the incoming flow map held
    constant in time; each subsequent iterate reassembles the pressure
    operator from the latest solved flow map (optionally under-relaxed).
    """
    space = ops.space
    phi0_x = _tile_trace(space, phi_hat_x)
    phi0_y = _tile_trace(space, phi_hat_y)
    j_cur, trf_cur = space.jacobian_at_quad(phi0_x, phi0_y)
    if np.any(j_cur <= 0):
        raise InvertedElementError(
            "incoming flow map has non-positive volume ratio", slab=slab, iteration=0
        )
    b = ops.rhs(phi_hat_x, phi_hat_y, pi_hat_x, pi_hat_y)

    residuals = []
    for it in range(1, cfg.max_picard + 1):
        try:
            a = ops.assemble(j_cur)
        except InvertedElementError as err:
            raise InvertedElementError(str(err), slab=slab, iteration=it) from err
        try:
            u = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as err:
            raise SingularSystemError(
                f"singular slab system (slab {slab}, Picard iterate {it})",
                slab=slab, iteration=it,
            ) from err
        phi_x = u[ops.s_phx]
        phi_y = u[ops.s_phy]
        j_new, trf_new = space.jacobian_at_quad(phi_x, phi_y)
        if np.any(j_new <= 0):
            raise InvertedElementError(
                f"solved flow map inverted (min J = {j_new.min():.3e})",
                slab=slab, iteration=it,
            )
        res = max(np.max(np.abs(j_new - j_cur)), np.max(np.abs(trf_new - trf_cur)))
        residuals.append(res)
        if res <= cfg.tol:
            return SlabSolution(
                phi_x=phi_x, phi_y=phi_y,
                pi_x=u[ops.s_pix], pi_y=u[ops.s_piy],
                pi_hat_end_x=u[ops.s_pex], pi_hat_end_y=u[ops.s_pey],
                picard_iters=it, residuals=residuals,
            )
        r = cfg.relaxation
        j_cur = j_new if r == 1.0 else (1.0 - r) * j_cur + r * j_new
        trf_cur = trf_new if r == 1.0 else (1.0 - r) * trf_cur + r * trf_new

    raise PicardConvergenceError(
        f"no fixed point within {cfg.max_picard} iterations "
        f"(slab {slab}, last residual {residuals[-1]:.3e})",
        slab=slab, residuals=residuals,
    )


def initial_conditions(space: SlabSpace):
    """Rest start: identity flow map traces and zero trace momentum."""
    x, y = space.trace_coords()
    zeros = np.zeros(space.topo.n_trace)
    return x.copy(), y.copy(), zeros, zeros.copy()


@dataclass
class SlabResult:
    """One entry of the time-stacked sequence."""

    index: int
    t_end: float
    solution: SlabSolution
    level_end: LevelState


def time_stack(ops: SlabOperators, cfg: SolverConfig, n_slabs: int, t0: float = 0.0,
               state0=None):
    """Generate solved slabs, handing end traces forward as initial data.

    state0 is an optional (phi_hat_x, phi_hat_y, pi_hat_x, pi_hat_y) tuple;
    the default is the rest state on the undeformed domain.
    """
    space = ops.space
    if state0 is None:
        state0 = initial_conditions(space)
    phi_hat_x, phi_hat_y, pi_hat_x, pi_hat_y = state0
    for n in range(n_slabs):
        t_end = t0 + (n + 1) * space.dt
        try:
            sol = picard_solve(ops, phi_hat_x, phi_hat_y, pi_hat_x, pi_hat_y, cfg, slab=n)
        except (InvertedElementError, PicardConvergenceError, SingularSystemError) as err:
            err.timestamp = t0 + n * space.dt
            raise
        level = space.level_state(sol.phi_x, sol.phi_y, t=t_end, end=True)
        yield SlabResult(index=n, t_end=t_end, solution=sol, level_end=level)
        phi_hat_x = level.phi_x
        phi_hat_y = level.phi_y
        pi_hat_x = sol.pi_hat_end_x
        pi_hat_y = sol.pi_hat_end_y
