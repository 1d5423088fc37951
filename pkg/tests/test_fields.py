"""Tests for DOF reduction, reconstruction, and the slab discretization."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from slabflow import InvertedElementError, MaterialLaw, SampleGrid, SlabSpace


@pytest.fixture(scope="module")
def space():
    return SlabSpace(order=3, t_order=2, dt=0.4)


def test_identity_map_dofs(space):
    phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (x, y))
    gx, gy, _ = space.node_coords()
    assert_allclose(phi_x, gx, atol=0)
    assert_allclose(phi_y, gy, atol=0)
    # velocity DOFs vanish, x-line integrals equal physical edge lengths
    assert np.all(space.velocity_dofs(phi_x) == 0)
    fxx, fxy, fyx, fyy = space.defgrad_dofs(phi_x, phi_y)
    lengths = np.diff((space.basis_s.rule.nodes + 1.0) * space.sx)
    n1, nt1 = space.order + 1, space.t_order + 1
    expected = np.broadcast_to(lengths, (nt1, n1, space.order))
    assert_allclose(fxx.reshape(nt1, n1, space.order), expected, atol=1e-15)
    assert np.all(fxy == 0)
    assert np.all(fyx == 0)


def test_constant_map_dofs(space):
    phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (0.3 * np.ones_like(x),
                                                         0.7 * np.ones_like(y)))
    assert np.all(space.velocity_dofs(phi_x) == 0)
    for f in space.defgrad_dofs(phi_x, phi_y):
        assert np.all(f == 0)


def test_stretch_doubles_line_integrals(space):
    phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (2 * x, y))
    phi_ix, _ = space.reduce_flowmap(lambda x, y, t: (x, y))
    fxx = space.inc.ex @ phi_x
    fxx_id = space.inc.ex @ phi_ix
    assert_allclose(fxx, 2 * fxx_id, rtol=1e-14)


class TestJacobian:
    def test_identity(self, space):
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (x, y))
        j, trf = space.jacobian_at_quad(phi_x, phi_y)
        assert_allclose(j, 1.0, atol=1e-13)
        assert_allclose(trf, 2.0, atol=1e-13)

    def test_uniform_dilation(self, space):
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (1.1 * x, 1.1 * y))
        j, _ = space.jacobian_at_quad(phi_x, phi_y)
        assert_allclose(j, 1.21, rtol=1e-13)
        rng = np.random.default_rng(0)
        pts = rng.uniform(-1, 1, (3, 7))
        _, jac = space.eval_defgrad(phi_x, phi_y, *pts)
        assert_allclose(jac, 1.21, rtol=1e-13)

    def test_rotation_preserves_volume(self, space):
        th = 0.31
        c, s = np.cos(th), np.sin(th)
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (c * x - s * y, s * x + c * y))
        _, jac = space.jacobian_at(phi_x, phi_y, [0.2], [-0.4], [0.1])
        assert_allclose(jac, 1.0, rtol=1e-13)

    def test_inverted_raises(self, space):
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (-x, y))
        with pytest.raises(InvertedElementError):
            space.jacobian_at(phi_x, phi_y, [0.0], [0.0], [0.0])


class TestReconstruction:
    def test_reference_bilinear_value(self):
        # nodal DOFs sampling xi*eta reproduce 0.12 at (0.3, 0.4)
        space = SlabSpace(order=2, t_order=1, dt=1.0)
        nodes = space.basis_s.rule.nodes
        xi, eta, tau = np.meshgrid(nodes, nodes, space.basis_t.rule.nodes, indexing="ij")
        dofs = (xi * eta).transpose(2, 1, 0).ravel()
        val = space.eval_nodal_field(dofs, [0.3], [0.4], [0.0])
        assert_allclose(val, [0.12], atol=1e-14)

    def test_polynomial_roundtrip(self, space):
        # any flow map polynomial of degree <= (N, N, Nt) is reproduced
        def fn(x, y, t):
            px = 0.2 + x + 0.3 * x**2 * y**3 - 0.1 * t**2 * x
            py = y - 0.4 * y**3 + 0.05 * x**3 * t
            return px, py

        phi_x, phi_y = space.reduce_flowmap(fn, t_start=0.0)
        rng = np.random.default_rng(11)
        xi, eta, tau = rng.uniform(-1, 1, (3, 100))
        x_phys = (xi + 1) * space.sx
        y_phys = (eta + 1) * space.sy
        t_phys = (tau + 1) * space.st
        ex, ey = fn(x_phys, y_phys, t_phys)
        rx, ry = space.eval_flowmap(phi_x, phi_y, xi, eta, tau)
        assert np.max(np.abs(rx - ex)) <= 1e-12
        assert np.max(np.abs(ry - ey)) <= 1e-12

    def test_gradient_commutes_with_reduction(self, space):
        # spatial derivative of the nodal reconstruction == edge reconstruction
        def fn(x, y, t):
            return x + 0.2 * x * y**2 + 0.1 * t * y, y - 0.3 * x**2 * y

        phi_x, phi_y = space.reduce_flowmap(fn)
        rng = np.random.default_rng(5)
        xi, eta, tau = rng.uniform(-1, 1, (3, 40))
        f, _ = space.eval_defgrad(phi_x, phi_y, xi, eta, tau)
        # finite-difference oracle on the reconstructed map
        h = 1e-6
        xp, _ = space.eval_flowmap(phi_x, phi_y, xi + h, eta, tau)
        xm, _ = space.eval_flowmap(phi_x, phi_y, xi - h, eta, tau)
        dfdx = (xp - xm) / (2 * h) / space.sx
        assert np.max(np.abs(f[:, 0, 0] - dfdx)) <= 1e-8

    def test_gradient_commutes_exactly(self, space):
        # stronger check against the analytic derivative of a polynomial map
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (x * y, y))
        rng = np.random.default_rng(6)
        xi, eta, tau = rng.uniform(-1, 1, (3, 50))
        f, _ = space.eval_defgrad(phi_x, phi_y, xi, eta, tau)
        y_phys = (eta + 1) * space.sy
        x_phys = (xi + 1) * space.sx
        assert np.max(np.abs(f[:, 0, 0] - y_phys)) <= 1e-11
        assert np.max(np.abs(f[:, 0, 1] - x_phys)) <= 1e-11

    def test_outside_reference_cube(self, space):
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (x, y))
        with pytest.raises(ValueError):
            space.eval_nodal_field(phi_x, [1.2], [0.0], [0.0])


class TestVelocity:
    def test_uniform_translation_velocity(self, space):
        c = np.array([0.3, -0.2])
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (x + c[0] * t, y + c[1] * t))
        vb_x = space.velocity_dofs(phi_x)
        rng = np.random.default_rng(8)
        xi, eta, tau = rng.uniform(-1, 1, (3, 20))
        vx = space.eval_velocity(vb_x, xi, eta, tau)
        assert_allclose(vx, c[0], rtol=1e-12)
        for end in (False, True):
            v_level = space.velocity_at_level(vb_x, end=end)
            assert_allclose(v_level, c[0], rtol=1e-12)

    def test_level_state_traces(self, space):
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (x + 0.1 * t, y))
        lv = space.level_state(phi_x, phi_y, t=space.dt, end=True)
        gx, gy = space.trace_coords()
        assert_allclose(lv.phi_x, gx + 0.1 * space.dt, rtol=1e-13)
        assert_allclose(lv.phi_y, gy, atol=1e-15)
        assert_allclose(lv.vx, 0.1, rtol=1e-12)


class TestDualityPairing:
    @pytest.mark.parametrize("order,t_order", [(2, 1), (3, 2)])
    def test_pairing_equals_dot_product(self, order, t_order):
        # quadrature of (dual momentum field) x (primal velocity field) over
        # the physical slab equals the plain coefficient dot product
        space = SlabSpace(order, t_order, dt=0.7)
        rng = np.random.default_rng(42)
        pi = rng.standard_normal(space.topo.n_tedge)
        v_bar = rng.standard_normal(space.topo.n_tedge)
        z = np.linalg.solve(space.mass_velocity, pi)
        pi_vals = (space.psi_tedge.T @ z) / space.st
        v_vals = (space.psi_tedge.T @ v_bar) / space.st
        integral = float((space.w3 * pi_vals * v_vals).sum() * space.volume_scale)
        assert abs(integral - pi @ v_bar) <= 1e-11 * max(1.0, abs(pi @ v_bar))

    def test_eval_momentum_consistent(self):
        space = SlabSpace(2, 1, dt=0.5)
        rng = np.random.default_rng(1)
        pi = rng.standard_normal(space.topo.n_tedge)
        xi, eta, tau = rng.uniform(-1, 1, (3, 5))
        vals = space.eval_momentum(pi, xi, eta, tau)
        z = np.linalg.solve(space.mass_velocity, pi)
        expect = space.eval_velocity(z, xi, eta, tau)
        assert_allclose(vals, expect, rtol=1e-12)


class TestStressOutput:
    def test_identity_stress_is_pressure_times_eye(self, space):
        law = MaterialLaw(rho0=1.25, gamma=1.4, p_ref=1.0, p_env=0.85)
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (x, y))
        p = space.eval_stress(phi_x, phi_y, law, [0.1], [0.2], [0.0])
        assert_allclose(p[0], np.eye(2), rtol=1e-12)

    def test_dilation_stress(self, space):
        law = MaterialLaw(rho0=1.25, gamma=1.4, p_ref=1.0, p_env=1.0)
        phi_x, phi_y = space.reduce_flowmap(lambda x, y, t: (1.1 * x, 1.1 * y))
        p = space.eval_stress(phi_x, phi_y, law, [0.0], [0.0], [0.5])
        # P_W(J) J F^{-T} = P_ref J^{-gamma} * 1.1 * I with J = 1.21
        assert_allclose(p[0], 1.21**-1.4 * 1.1 * np.eye(2), rtol=1e-12)


class TestSampleGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            SampleGrid(1)

    def test_points_cover_unit_square(self):
        g = SampleGrid(5)
        x, y = g.points()
        assert x.size == 25
        assert x.min() == 0.0 and x.max() == 1.0
        assert y.min() == 0.0 and y.max() == 1.0

    def test_boundary_points(self):
        g = SampleGrid(8)
        x, y = g.boundary_points()
        assert x.size == 32
        on_edge = (np.isclose(x, 0) | np.isclose(x, 1) |
                   np.isclose(y, 0) | np.isclose(y, 1))
        assert np.all(on_edge)
