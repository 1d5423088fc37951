"""1D Gauss-Lobatto-Legendre machinery on the reference interval [-1, 1].

Provides GLL nodes and quadrature weights, the nodal Lagrange basis h_i,
the edge basis e_i whose degrees of freedom are integrals over the node
intervals, their mass matrices, and the dual bases obtained by the
inverse-mass transform.

The edge basis is defined through the exact derivative relation

    d/dxi  sum_i phi_i h_i(xi)  =  sum_i (phi_i - phi_{i-1}) e_i(xi),

i.e. e_i = -sum_{k<i} h_k', which guarantees that taking a nodal expansion
to its derivative is a pure difference of coefficients plus a change of
basis, with no quadrature involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["GllRule", "Basis1D", "gll_rule", "gauss_rule", "lagrange_values", "lagrange_derivatives"]


def _legendre(n, x):
    """Values of (L_n, L_n', L_n'') at x, by stable three-term recurrences."""
    x = np.asarray(x, dtype=float)
    p0, d0, s0 = np.ones_like(x), np.zeros_like(x), np.zeros_like(x)
    if n == 0:
        return p0, d0, s0
    p1, d1, s1 = x.copy(), np.ones_like(x), np.zeros_like(x)
    for k in range(2, n + 1):
        p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        d2 = d0 + (2 * k - 1) * p1
        s2 = s0 + (2 * k - 1) * d1
        p0, d0, s0 = p1, d1, s1
        p1, d1, s1 = p2, d2, s2
    return p1, d1, s1


@dataclass(frozen=True)
class GllRule:
    """Gauss-Lobatto-Legendre nodes and quadrature weights for one degree.

    nodes are the N+1 roots of (1 - x^2) L_N'(x), ascending, symmetric about
    zero and including both endpoints; weights are positive, sum to 2, and
    integrate polynomials of degree <= 2N-1 exactly.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray


def gll_rule(order: int) -> GllRule:
    """GLL rule of the given polynomial degree (>= 1).

    Interior nodes by Newton iteration on L_N' started from Chebyshev-Lobatto
    guesses; the node set is symmetrized afterwards so results are
    deterministic to round-off.
    """
    if order < 1:
        raise ValueError(f"GLL rule needs polynomial degree >= 1, got {order}")
    n = order
    nodes = np.empty(n + 1)
    nodes[0], nodes[-1] = -1.0, 1.0
    if n >= 2:
        x = np.cos(np.pi * np.arange(n - 1, 0, -1) / n)
        for _ in range(100):
            _, lp, lpp = _legendre(n, x)
            dx = -lp / lpp
            x = x + dx
            if np.max(np.abs(dx)) < 1e-15:
                break
        nodes[1:-1] = 0.5 * (x - x[::-1])
    ln, _, _ = _legendre(n, nodes)
    weights = 2.0 / (n * (n + 1) * ln**2)
    return GllRule(order=n, nodes=nodes, weights=weights)


def gauss_rule(npts: int):
    """Plain Gauss-Legendre rule (npts points, exact to degree 2*npts - 1)."""
    return np.polynomial.legendre.leggauss(npts)


def lagrange_values(nodes, x):
    """Lagrange basis values on the given nodes, shape (len(nodes), len(x))."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(nodes)
    vals = np.ones((n, x.size))
    for i in range(n):
        for j in range(n):
            if j != i:
                vals[i] *= (x - nodes[j]) / (nodes[i] - nodes[j])
    return vals


def lagrange_derivatives(nodes, x):
    """Derivatives of the Lagrange basis at x, shape (len(nodes), len(x)).

    Uses the two-index product formula, which stays finite when x coincides
    with a node (no barycentric 0/0 case).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(nodes)
    der = np.zeros((n, x.size))
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            term = np.full(x.size, 1.0 / (nodes[i] - nodes[j]))
            for k in range(n):
                if k != i and k != j:
                    term *= (x - nodes[k]) / (nodes[i] - nodes[k])
            der[i] += term
    return der


class Basis1D:
    """Nodal, edge and dual bases on the GLL nodes of one degree.

    Immutable after construction; safe for concurrent reads. All matrix
    evaluators return one row per basis function and one column per point.
    """

    def __init__(self, order: int):
        self.order = order
        self.rule = gll_rule(order)

    # -- primal bases -------------------------------------------------------

    def nodal(self, x):
        """h_i(x) for i = 0..N."""
        return lagrange_values(self.rule.nodes, x)

    def nodal_deriv(self, x):
        """h_i'(x) for i = 0..N."""
        return lagrange_derivatives(self.rule.nodes, x)

    def edge(self, x):
        """e_i(x) for i = 1..N (row i-1), via e_i = -sum_{k<i} h_k'."""
        return -np.cumsum(self.nodal_deriv(x), axis=0)[: self.order]

    # -- mass matrices ------------------------------------------------------

    @cached_property
    def mass_nodal(self):
        """(N+1)x(N+1) Gram matrix of the nodal basis on [-1, 1]."""
        xq, wq = gauss_rule(self.order + 3)
        h = self.nodal(xq)
        return (h * wq) @ h.T

    @cached_property
    def mass_edge(self):
        """NxN Gram matrix of the edge basis on [-1, 1]."""
        xq, wq = gauss_rule(self.order + 3)
        e = self.edge(xq)
        return (e * wq) @ e.T

    def mass_matrices(self):
        return self.mass_nodal, self.mass_edge

    # -- dual bases ---------------------------------------------------------

    def dual_nodal(self, x):
        """Dual nodal basis (bi-orthogonal to the edge basis), rows i = 1..N."""
        return np.linalg.solve(self.mass_edge, self.edge(x))

    def dual_edge(self, x):
        """Dual edge basis (bi-orthogonal to the nodal basis), rows i = 0..N."""
        return np.linalg.solve(self.mass_nodal, self.nodal(x))

    # -- single-index conveniences ------------------------------------------

    def eval_nodal(self, i: int, xi) -> float:
        if not 0 <= i <= self.order:
            raise IndexError(f"nodal index {i} out of range 0..{self.order}")
        return float(self.nodal(xi)[i, 0])

    def eval_edge(self, i: int, xi) -> float:
        if not 1 <= i <= self.order:
            raise IndexError(f"edge index {i} out of range 1..{self.order}")
        return float(self.edge(xi)[i - 1, 0])

    def eval_dual_nodal(self, i: int, xi) -> float:
        if not 1 <= i <= self.order:
            raise IndexError(f"dual nodal index {i} out of range 1..{self.order}")
        return float(self.dual_nodal(xi)[i - 1, 0])

    def eval_dual_edge(self, i: int, xi) -> float:
        if not 0 <= i <= self.order:
            raise IndexError(f"dual edge index {i} out of range 0..{self.order}")
        return float(self.dual_edge(xi)[i, 0])
