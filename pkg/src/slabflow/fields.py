"""Field containers, reduction, and reconstruction on one space-time slab.

Degrees of freedom follow the primal/dual staggering:

* flow map: point values at the tensor GLL nodes (metres);
* velocity: physical time integrals over temporal sub-edges, identical to
  differences of flow-map DOFs between consecutive time levels;
* deformation gradient: physical line integrals over spatial sub-edges,
  identical to spatial differences of flow-map DOFs;
* momentum: coefficients in the dual of the temporal-edge space, so that
  the duality pairing with a velocity DOF vector is a plain dot product.

All stored DOFs are metric-free integrals or point values; the affine map
between the reference cube [-1,1]^3 and the physical slab
[0,1]^2 x [t_n, t_n + dt] enters only through the scale factors applied in
pointwise reconstruction and in mass matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .basis import Basis1D, gauss_rule
from .errors import InvertedElementError
from .topology import build_topology

__all__ = ["SlabSpace", "LevelState", "SampleGrid", "identity_flowmap"]

# Physical reference domain is the unit square.
LX = 1.0
LY = 1.0


def _tensor_rows(a, b, c):
    """Rows f_a(xi) g_b(eta) q_c(tau) rastered over a tensor point grid.

    a, b, c are (n_factor, n_pts) tables for the xi, eta, tau factors.
    DOF rows and point columns are both flattened with the xi index fastest
    and the tau index slowest.
    """
    m = np.einsum("iq,jr,ks->kjisrq", a, b, c)
    na, nb, nc = a.shape[0], b.shape[0], c.shape[0]
    return m.reshape(na * nb * nc, a.shape[1] * b.shape[1] * c.shape[1])


def identity_flowmap(x, y, t):
    return x, y


class SlabSpace:
    """Discretization of one space-time slab: bases, quadrature, operators.

    Holds everything that is independent of the slab's starting time, so a
    single instance is reused across all slabs of a run. Immutable after
    construction.
    """

    def __init__(self, order: int, t_order: int, dt: float, quad_pts: int | None = None,
                 t_quad_pts: int | None = None):
        if dt <= 0:
            raise ValueError("slab duration dt must be positive")
        self.order = order
        self.t_order = t_order
        self.dt = float(dt)
        self.basis_s = Basis1D(order)
        self.basis_t = Basis1D(t_order)
        self.topo, self.inc = build_topology(order, t_order)

        # affine scale factors, reference [-1,1] to physical
        self.sx = LX / 2.0
        self.sy = LY / 2.0
        self.st = self.dt / 2.0

        self.quad_pts = order + 3 if quad_pts is None else int(quad_pts)
        self.t_quad_pts = t_order + 3 if t_quad_pts is None else int(t_quad_pts)
        self._build_quadrature()

    # -- quadrature and basis tables -----------------------------------------

    def _build_quadrature(self):
        qs, ws = gauss_rule(self.quad_pts)
        qt, wt = gauss_rule(self.t_quad_pts)
        self.q_xi, self.w_xi = qs, ws
        self.q_tau, self.w_tau = qt, wt

        hs = self.basis_s.nodal(qs)
        es = self.basis_s.edge(qs)
        ht = self.basis_t.nodal(qt)
        et = self.basis_t.edge(qt)

        # space-time tables, one row per DOF, one column per quadrature point
        self.psi_node = _tensor_rows(hs, hs, ht)
        self.psi_xedge = _tensor_rows(es, hs, ht)
        self.psi_yedge = _tensor_rows(hs, es, ht)
        self.psi_tedge = _tensor_rows(hs, hs, et)
        self.w3 = np.einsum("s,r,q->srq", wt, ws, ws).ravel()

        # spatial-only tables at the 2D quadrature grid (for time levels)
        dhs = self.basis_s.nodal_deriv(qs)
        self.psi0_level = np.einsum("iq,jr->jirq", hs, hs).reshape(
            (self.order + 1) ** 2, self.quad_pts**2
        )
        self.dpsi_xi_level = np.einsum("iq,jr->jirq", dhs, hs).reshape(
            (self.order + 1) ** 2, self.quad_pts**2
        )
        self.dpsi_eta_level = np.einsum("iq,jr->jirq", hs, dhs).reshape(
            (self.order + 1) ** 2, self.quad_pts**2
        )
        self.w2 = np.einsum("r,q->rq", ws, ws).ravel()

    @property
    def volume_scale(self) -> float:
        """Jacobian of the reference-to-physical affine map."""
        return self.sx * self.sy * self.st

    @cached_property
    def mass_velocity(self):
        """Gram matrix of the physical temporal-edge basis over the slab.

        Kronecker form (M1_tau x M0_eta x M0_xi) with the affine metric
        factors; exact for the polynomial integrands involved.
        """
        m0 = self.basis_s.mass_nodal
        m1t = self.basis_t.mass_edge
        scale = self.sx * self.sy / self.st
        return scale * np.kron(m1t, np.kron(m0, m0))

    @cached_property
    def mass_trace(self):
        """Gram matrix of the physical spatial nodal basis on the unit square."""
        m0 = self.basis_s.mass_nodal
        return self.sx * self.sy * np.kron(m0, m0)

    # -- reduction ------------------------------------------------------------

    def node_coords(self, t_start: float = 0.0):
        """Physical (X, Y, t) coordinates of all slab nodes, lexicographic."""
        xs = (self.basis_s.rule.nodes + 1.0) * self.sx
        ts = t_start + (self.basis_t.rule.nodes + 1.0) * self.st
        x, y, t = np.meshgrid(xs, xs, ts, indexing="ij")
        flat = lambda a: a.transpose(2, 1, 0).ravel()
        return flat(x), flat(y), flat(t)

    def trace_coords(self):
        """Physical (X, Y) coordinates of one spatial node level."""
        xs = (self.basis_s.rule.nodes + 1.0) * self.sx
        x, y = np.meshgrid(xs, xs, indexing="ij")
        return x.T.ravel(), y.T.ravel()

    def reduce_flowmap(self, fn, t_start: float = 0.0):
        """Nodal flow-map DOFs of an analytic map fn(X, Y, t) -> (x, y)."""
        x, y, t = self.node_coords(t_start)
        px, py = fn(x, y, t)
        return np.asarray(px, dtype=float), np.asarray(py, dtype=float)

    def reduce_trace(self, fn):
        """Spatial nodal DOFs of a map fn(X, Y) -> value at one time level."""
        x, y = self.trace_coords()
        return np.asarray(fn(x, y), dtype=float)

    # -- derived DOF vectors ----------------------------------------------------

    def velocity_dofs(self, phi):
        """Temporal-edge DOFs (time integrals of velocity) of one component."""
        return self.inc.et @ phi

    def defgrad_dofs(self, phi_x, phi_y):
        """Spatial-edge DOFs (line integrals) Fxx, Fxy, Fyx, Fyy."""
        return (self.inc.ex @ phi_x, self.inc.ey @ phi_x,
                self.inc.ex @ phi_y, self.inc.ey @ phi_y)

    # -- reconstruction at the internal quadrature grid -------------------------

    def defgrad_at_quad(self, phi_x, phi_y):
        """Physical deformation-gradient entries at the space-time quadrature grid."""
        fxx_b, fxy_b, fyx_b, fyy_b = self.defgrad_dofs(phi_x, phi_y)
        fxx = (self.psi_xedge.T @ fxx_b) / self.sx
        fxy = (self.psi_yedge.T @ fxy_b) / self.sy
        fyx = (self.psi_xedge.T @ fyx_b) / self.sx
        fyy = (self.psi_yedge.T @ fyy_b) / self.sy
        return fxx, fxy, fyx, fyy

    def jacobian_at_quad(self, phi_x, phi_y):
        """(J, tr F) at the space-time quadrature grid; J = det of the 2x2 F."""
        fxx, fxy, fyx, fyy = self.defgrad_at_quad(phi_x, phi_y)
        return fxx * fyy - fxy * fyx, fxx + fyy

    # -- reconstruction at arbitrary reference points ----------------------------

    def _point_tables(self, xi, eta, tau):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        eta = np.atleast_1d(np.asarray(eta, dtype=float))
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        if np.any(np.abs(xi) > 1) or np.any(np.abs(eta) > 1) or np.any(np.abs(tau) > 1):
            raise ValueError("reference coordinates must lie in [-1, 1]^3")
        return xi, eta, tau

    def eval_nodal_field(self, dofs, xi, eta, tau):
        """Evaluate a nodal space-time expansion at reference points."""
        xi, eta, tau = self._point_tables(xi, eta, tau)
        d3 = dofs.reshape(self.t_order + 1, self.order + 1, self.order + 1)
        hx = self.basis_s.nodal(xi)
        hy = self.basis_s.nodal(eta)
        ht = self.basis_t.nodal(tau)
        return np.einsum("kji,im,jm,km->m", d3, hx, hy, ht)

    def eval_flowmap(self, phi_x, phi_y, xi, eta, tau):
        return (self.eval_nodal_field(phi_x, xi, eta, tau),
                self.eval_nodal_field(phi_y, xi, eta, tau))

    def eval_velocity(self, v_bar, xi, eta, tau):
        """Physical velocity component from its temporal-edge DOFs."""
        xi, eta, tau = self._point_tables(xi, eta, tau)
        d3 = v_bar.reshape(self.t_order, self.order + 1, self.order + 1)
        hx = self.basis_s.nodal(xi)
        hy = self.basis_s.nodal(eta)
        et = self.basis_t.edge(tau)
        return np.einsum("kji,im,jm,km->m", d3, hx, hy, et) / self.st

    def eval_defgrad(self, phi_x, phi_y, xi, eta, tau):
        """Physical F (n_pts, 2, 2) and J (n_pts,) at reference points."""
        xi, eta, tau = self._point_tables(xi, eta, tau)
        hx = self.basis_s.nodal(xi)
        hy = self.basis_s.nodal(eta)
        ex = self.basis_s.edge(xi)
        ey = self.basis_s.edge(eta)
        ht = self.basis_t.nodal(tau)
        n1, nt1 = self.order + 1, self.t_order + 1
        fxx_b, fxy_b, fyx_b, fyy_b = self.defgrad_dofs(phi_x, phi_y)

        def on_xedge(dofs):
            d3 = dofs.reshape(nt1, n1, self.order)
            return np.einsum("kji,im,jm,km->m", d3, ex, hy, ht) / self.sx

        def on_yedge(dofs):
            d3 = dofs.reshape(nt1, self.order, n1)
            return np.einsum("kji,im,jm,km->m", d3, hx, ey, ht) / self.sy

        f = np.empty((xi.size, 2, 2))
        f[:, 0, 0] = on_xedge(fxx_b)
        f[:, 0, 1] = on_yedge(fxy_b)
        f[:, 1, 0] = on_xedge(fyx_b)
        f[:, 1, 1] = on_yedge(fyy_b)
        jac = f[:, 0, 0] * f[:, 1, 1] - f[:, 0, 1] * f[:, 1, 0]
        return f, jac

    def jacobian_at(self, phi_x, phi_y, xi, eta, tau):
        """F and J at one or more points; raises if any J <= 0."""
        f, jac = self.eval_defgrad(phi_x, phi_y, xi, eta, tau)
        if np.any(jac <= 0):
            raise InvertedElementError(
                f"non-positive volume ratio J (min {jac.min():.3e}) at evaluation point"
            )
        return f, jac

    def eval_momentum(self, pi, xi, eta, tau):
        """Pointwise momentum density from dual coefficients.

        The dual basis is the primal temporal-edge basis transformed by the
        inverse velocity mass matrix, so evaluation reduces to a mass solve
        followed by a primal evaluation.
        """
        z = np.linalg.solve(self.mass_velocity, pi)
        return self.eval_velocity(z, xi, eta, tau) * 1.0

    def eval_stress(self, phi_x, phi_y, law, xi, eta, tau):
        """First Piola-Kirchhoff stress P_W(J) J F^{-T}, output only.

        Reconstructed pointwise from the flow map and the material law; the
        stress is never a solution unknown.
        """
        f, jac = self.jacobian_at(phi_x, phi_y, xi, eta, tau)
        pw = law.pressure(jac)
        p = np.empty_like(f)
        # J F^{-T} = [[Fyy, -Fyx], [-Fxy, Fxx]] in 2D
        p[:, 0, 0] = pw * f[:, 1, 1]
        p[:, 0, 1] = -pw * f[:, 1, 0]
        p[:, 1, 0] = -pw * f[:, 0, 1]
        p[:, 1, 1] = pw * f[:, 0, 0]
        return p

    # -- time levels -------------------------------------------------------------

    def trace_start(self, phi):
        return self.inc.n_start.T @ phi

    def trace_end(self, phi):
        return self.inc.n_end.T @ phi

    def velocity_at_level(self, v_bar, end: bool):
        """Spatial nodal velocity values at the slab start or end level."""
        tau = 1.0 if end else -1.0
        ek = self.basis_t.edge(np.array([tau]))[:, 0]
        v2 = v_bar.reshape(self.t_order, (self.order + 1) ** 2)
        return (ek @ v2) / self.st

    def level_state(self, phi_x, phi_y, t: float, end: bool = True) -> "LevelState":
        """Spatial snapshot of the flow map and velocity at a slab boundary."""
        vx = self.velocity_at_level(self.velocity_dofs(phi_x), end)
        vy = self.velocity_at_level(self.velocity_dofs(phi_y), end)
        trace = self.trace_end if end else self.trace_start
        return LevelState(t=t, phi_x=trace(phi_x), phi_y=trace(phi_y), vx=vx, vy=vy)

    # -- spatial-level reconstruction ---------------------------------------------

    def level_jacobian_at_quad(self, level: "LevelState"):
        """J at the 2D quadrature grid from one time level's flow map."""
        fxx = (self.dpsi_xi_level.T @ level.phi_x) / self.sx
        fxy = (self.dpsi_eta_level.T @ level.phi_x) / self.sy
        fyx = (self.dpsi_xi_level.T @ level.phi_y) / self.sx
        fyy = (self.dpsi_eta_level.T @ level.phi_y) / self.sy
        return fxx * fyy - fxy * fyx

    def level_fields_at(self, level: "LevelState", x_ref, y_ref):
        """Deformed position, velocity, F and J at reference points in [0,1]^2.

        Returns (x, y, vx, vy, J). Points with non-positive J are kept and
        flagged by the caller, not fatal here.
        """
        xi = 2.0 * np.asarray(x_ref, dtype=float) - 1.0
        eta = 2.0 * np.asarray(y_ref, dtype=float) - 1.0
        hx = self.basis_s.nodal(xi)
        hy = self.basis_s.nodal(eta)
        dhx = self.basis_s.nodal_deriv(xi)
        dhy = self.basis_s.nodal_deriv(eta)
        n1 = self.order + 1

        def val(dofs, ax, ay):
            return np.einsum("ji,im,jm->m", dofs.reshape(n1, n1), ax, ay)

        x = val(level.phi_x, hx, hy)
        y = val(level.phi_y, hx, hy)
        vx = val(level.vx, hx, hy)
        vy = val(level.vy, hx, hy)
        fxx = val(level.phi_x, dhx, hy) / self.sx
        fxy = val(level.phi_x, hx, dhy) / self.sy
        fyx = val(level.phi_y, dhx, hy) / self.sx
        fyy = val(level.phi_y, hx, dhy) / self.sy
        jac = fxx * fyy - fxy * fyx
        return x, y, vx, vy, jac


@dataclass
class LevelState:
    """Spatial nodal data at one time level: flow map and velocity."""

    t: float
    phi_x: np.ndarray
    phi_y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray


@dataclass(frozen=True)
class SampleGrid:
    """Uniform m x m reference sample points covering [0,1]^2 for snapshots."""

    resolution: int = 40

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("sample grid needs at least 2 points per direction")

    def points(self):
        u = np.linspace(0.0, 1.0, self.resolution)
        gx, gy = np.meshgrid(u, u, indexing="ij")
        return gx.ravel(), gy.ravel()

    def boundary_points(self):
        """Points tracing the unit-square boundary counter-clockwise."""
        u = np.linspace(0.0, 1.0, self.resolution, endpoint=False)
        zeros = np.zeros_like(u)
        ones = np.ones_like(u)
        x = np.concatenate([u, ones, 1.0 - u, zeros])
        y = np.concatenate([zeros, u, ones, 1.0 - u])
        return x, y
