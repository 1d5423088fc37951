"""Metric-free topology of one tensor-product space-time slab.

A slab of orders (N, N, Nt) carries nodes, spatial edges (xi- and
eta-direction) and temporal edges, numbered lexicographically with the
xi index fastest, then eta, then tau. The incidence matrices are pure
difference operators (entries in {-1, 0, +1}) composed from 1D stencils
via Kronecker products; they contain no metric information and compose
to zero like the continuous gradient and curl.

All arithmetic in this module is integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

__all__ = ["SlabTopology", "IncidenceSet", "build_topology", "curl_incidence",
           "gradient_incidence", "verify_complex", "difference_matrix"]


def difference_matrix(n: int) -> sp.csr_matrix:
    """1D difference operator, n x (n+1), rows (-1, +1) on consecutive DOFs."""
    e = np.ones(n, dtype=np.int64)
    return sp.csr_matrix(sp.diags([-e, e], [0, 1], shape=(n, n + 1), dtype=np.int64))


def _unit_column(n: int, row: int) -> sp.csr_matrix:
    return sp.csr_matrix(([1], ([row], [0])), shape=(n, 1), dtype=np.int64)


@dataclass(frozen=True)
class SlabTopology:
    """DOF counts and index maps for one slab of orders (N, N, Nt)."""

    order: int
    t_order: int

    @property
    def n_node(self) -> int:
        return (self.order + 1) ** 2 * (self.t_order + 1)

    @property
    def n_xedge(self) -> int:
        return self.order * (self.order + 1) * (self.t_order + 1)

    @property
    def n_yedge(self) -> int:
        return (self.order + 1) * self.order * (self.t_order + 1)

    @property
    def n_tedge(self) -> int:
        return (self.order + 1) ** 2 * self.t_order

    @property
    def n_trace(self) -> int:
        return (self.order + 1) ** 2

    def node_index(self, i: int, j: int, k: int) -> int:
        n1 = self.order + 1
        return i + n1 * j + n1 * n1 * k


@dataclass(frozen=True)
class IncidenceSet:
    """Incidence and inclusion operators of one slab (integer, sparse).

    ex/ey/et map nodal DOF vectors to edge-difference vectors in the three
    coordinate directions; n_start/n_end include spatial trace vectors into
    the slab at the first/last time level (one +1 per column).
    """

    ex: sp.csr_matrix
    ey: sp.csr_matrix
    et: sp.csr_matrix
    n_start: sp.csr_matrix
    n_end: sp.csr_matrix


def build_topology(order: int, t_order: int):
    """Topology and incidence operators for a slab of orders (N, N, Nt)."""
    if order < 1 or t_order < 1:
        raise ValueError(f"slab orders must be >= 1, got N={order}, Nt={t_order}")
    n, nt = order, t_order
    i_n = sp.identity(n + 1, dtype=np.int64, format="csr")
    i_t = sp.identity(nt + 1, dtype=np.int64, format="csr")
    d_n = difference_matrix(n)
    d_t = difference_matrix(nt)

    ex = sp.kron(i_t, sp.kron(i_n, d_n), format="csr")
    ey = sp.kron(i_t, sp.kron(d_n, i_n), format="csr")
    et = sp.kron(d_t, sp.kron(i_n, i_n), format="csr")

    ns = (n + 1) ** 2
    i_s = sp.identity(ns, dtype=np.int64, format="csr")
    n_start = sp.kron(_unit_column(nt + 1, 0), i_s, format="csr")
    n_end = sp.kron(_unit_column(nt + 1, nt), i_s, format="csr")

    topo = SlabTopology(order=n, t_order=nt)
    return topo, IncidenceSet(ex=ex, ey=ey, et=et, n_start=n_start, n_end=n_end)


def gradient_incidence(inc: IncidenceSet) -> sp.csr_matrix:
    """Stacked discrete gradient [ex; ey; et] on nodal DOFs."""
    return sp.vstack([inc.ex, inc.ey, inc.et], format="csr")


def curl_incidence(topo: SlabTopology) -> sp.csr_matrix:
    """Discrete curl on slab edges, rows ordered [xi-eta, xi-tau, eta-tau] faces.

    Built from the same 1D differences as the gradient; columns follow the
    [x-edges, y-edges, t-edges] stacking of gradient_incidence.
    """
    n, nt = topo.order, topo.t_order
    d_n = difference_matrix(n)
    d_t = difference_matrix(nt)
    i_n = sp.identity(n, dtype=np.int64, format="csr")
    i_n1 = sp.identity(n + 1, dtype=np.int64, format="csr")
    i_t = sp.identity(nt + 1, dtype=np.int64, format="csr")
    i_tn = sp.identity(nt, dtype=np.int64, format="csr")

    z = sp.csr_matrix
    # xi-eta faces: d(u_eta)/dxi - d(u_xi)/deta
    f_xy = sp.hstack([
        -sp.kron(i_t, sp.kron(d_n, i_n)),
        sp.kron(i_t, sp.kron(i_n, d_n)),
        z((n * n * (nt + 1), topo.n_tedge), dtype=np.int64),
    ])
    # xi-tau faces: d(u_tau)/dxi - d(u_xi)/dtau
    f_xt = sp.hstack([
        -sp.kron(d_t, sp.kron(i_n1, i_n)),
        z((n * (n + 1) * nt, topo.n_yedge), dtype=np.int64),
        sp.kron(i_tn, sp.kron(i_n1, d_n)),
    ])
    # eta-tau faces: d(u_tau)/deta - d(u_eta)/dtau
    f_yt = sp.hstack([
        z(((n + 1) * n * nt, topo.n_xedge), dtype=np.int64),
        -sp.kron(d_t, sp.kron(i_n, i_n1)),
        sp.kron(i_tn, sp.kron(d_n, i_n1)),
    ])
    return sp.vstack([f_xy, f_xt, f_yt], format="csr")


def verify_complex(topo: SlabTopology, inc: IncidenceSet) -> bool:
    """True iff curl . gradient vanishes identically, in integer arithmetic."""
    product = curl_incidence(topo) @ gradient_incidence(inc)
    return product.count_nonzero() == 0
