import numpy as np
import pytest

from breatherlab import breathers as br
from breatherlab import jets, linops
from breatherlab import stability as st
from breatherlab.quadrature import LinePlan


def kernel_derivs(fieldjet, orders, n1=0, n2=0):
    return tuple(fieldjet.partial(nx=j, n1=n1, n2=n2) for j in range(orders + 1))


class TestScalarKernels:
    @pytest.mark.parametrize("n1,n2", [(1, 0), (0, 1)])
    def test_mkdv_translation_kernel(self, n1, n2):
        fam = br.MkdvBreather(alpha=0.5, beta=1.0, x1=0.09)
        op = linops.mkdv_operator(fam)
        x = np.linspace(-30, 30, 200)
        f = op.family.eval(0.0, x, deg=6)
        z = kernel_derivs(f, 4, n1=n1, n2=n2)
        image = op.apply(x, z)
        scale = max(np.max(np.abs(z[4])), 1.0)
        assert np.max(np.abs(image)) / scale < 1e-8

    def test_gardner_translation_kernel(self):
        fam = br.GardnerBreather(alpha=0.5, beta=1.0, mu=0.1, x1=0.2)
        op = linops.gardner_operator(fam)
        x = np.linspace(-30, 30, 150)
        f = op.family.eval(0.0, x, deg=6)
        for sel in ((1, 0), (0, 1)):
            image = op.apply(x, kernel_derivs(f, 4, *sel))
            assert np.max(np.abs(image)) < 1e-8 * max(np.max(np.abs(f.partial(nx=4))), 1.0)

    def test_kksh_translation_kernel(self):
        fam = br.KkshBreather(beta=1.0, k=0.03, x1=0.1)
        op = linops.kksh_operator(fam)
        x = np.linspace(0.0, fam.period, 120, endpoint=False)
        f = op.family.eval(0.0, x, deg=6)
        for sel in ((1, 0), (0, 1)):
            image = op.apply(x, kernel_derivs(f, 4, *sel))
            assert np.max(np.abs(image)) < 1e-7 * np.max(np.abs(f.partial(nx=4, n1=1)))

    def test_apply_needs_four_derivatives(self):
        fam = br.MkdvBreather(alpha=1.0, beta=1.0)
        op = linops.mkdv_operator(fam)
        x = np.linspace(-1, 1, 5)
        f = op.family.eval(0.0, x, deg=3)
        with pytest.raises(ValueError, match="insufficient"):
            op.apply(x, kernel_derivs(f, 3))


class TestSgBlock:
    def test_kernel_pair(self):
        fam = br.SgBreather(beta=0.5, v=0.7, x1=0.3)
        op = linops.sg_operator(fam)
        x = np.linspace(-45, 45, 220)
        pair = op.family.eval(0.0, x, deg=6)
        for sel in ((1, 0), (0, 1)):
            z = kernel_derivs(pair.b, 4, *sel)
            w = kernel_derivs(pair.bt, 2, *sel)
            r1, r2 = op.apply(x, z, w)
            assert np.max(np.abs(r1)) < 1e-10
            assert np.max(np.abs(r2)) < 1e-10

    def test_scaling_relation_residuals(self):
        for beta, v in ((0.5, 0.0), (0.5, 0.7), (0.8, 0.3)):
            fam = br.SgBreather(beta=beta, v=v, x1=0.1)
            r1, r2 = linops.sg_scaling_relation_residuals(fam)
            assert r1 < 1e-5 and r2 < 1e-5

    def test_variational_direction_image(self):
        fam = br.SgBreather(beta=0.5, v=0.7)
        assert linops.sg_variational_direction_residual(fam) < 1e-6

    def test_scaling_quadratic_form_closed_value(self):
        fam = br.SgBreather(beta=0.7, v=0.3)
        q = linops.sg_scaling_quadratic_form(fam)
        assert q == pytest.approx(-32 * (1 + 3 * 0.09) * 0.7, rel=1e-6)

    def test_scaled_direction_pairing_closed_value(self):
        assert linops.sg_scaled_direction_pairing(0.5, 0.7) == pytest.approx(
            (8 / 0.5) * (1 + 3 * 0.49), rel=1e-6
        )
        assert linops.sg_scaled_direction_pairing(0.5, 0.0) == pytest.approx(16.0, rel=1e-6)

    def test_quadratic_form_on_kernel_vanishes(self):
        fam = br.SgBreather(beta=0.5, v=0.4, x1=0.2)
        op = linops.sg_operator(fam)
        plan = LinePlan(center=0.0, half_width=70.0, nodes_per_unit=8.0)
        x, w_quad = plan.nodes_weights(2)
        pair = op.family.eval(0.0, x, deg=6)
        z = kernel_derivs(pair.b, 2, 1, 0)
        w = kernel_derivs(pair.bt, 1, 1, 0)
        assert abs(op.quadratic_form(x, w_quad, z, w)) < 1e-7

    def test_quadratic_form_routes_agree(self):
        fam = br.SgBreather(beta=0.5, v=0.3)
        op = linops.sg_operator(fam)
        plan = LinePlan(center=0.0, half_width=70.0, nodes_per_unit=8.0)
        x, w_quad = plan.nodes_weights(2)

        def zf(X):
            return jets.exp(-0.2 * (X - 0.5) * (X - 0.5)) * jets.sin(1.3 * X)

        def wf(X):
            return jets.exp(-0.35 * X * X) * (1.0 + 0.4 * X)

        zj = zf(jets.Jet2.variable(x, 0, deg=4))
        wj = wf(jets.Jet2.variable(x, 0, deg=4))
        z = tuple(zj.partial(i, 0) for i in range(5))
        w = tuple(wj.partial(i, 0) for i in range(3))
        q_apply = op.quadratic_form_apply(x, w_quad, z, w)
        q_parts = op.quadratic_form(x, w_quad, z, w)
        assert q_apply == pytest.approx(q_parts, rel=1e-8)

    def test_apply_needs_enough_derivatives(self):
        fam = br.SgBreather(beta=0.5, v=0.1)
        op = linops.sg_operator(fam)
        x = np.linspace(-1, 1, 5)
        pair = op.family.eval(0.0, x, deg=4)
        with pytest.raises(ValueError, match="insufficient"):
            op.apply(x, kernel_derivs(pair.b, 3), kernel_derivs(pair.bt, 2))


class TestReductions:
    def test_gardner_reduces_to_mkdv_at_zero_mu(self):
        fam = br.MkdvBreather(alpha=0.8, beta=1.1, x1=0.3)
        op_m = linops.mkdv_operator(fam)
        op_g = linops.ScalarOperator(op_m.family, a1=op_m.a1, a2=op_m.a2, mu=0.0, label="gardner")
        x = np.linspace(-20, 20, 100)
        cm = op_m.coefficients(x)
        cg = op_g.coefficients(x)
        for a, b in zip(cm, cg):
            assert np.max(np.abs(a - b)) < 1e-12
        rng = np.random.default_rng(0)
        for _ in range(50):
            pt = rng.uniform(-10, 10, size=7)
            zj = jets.sin(jets.Jet2.variable(pt, 0)) * jets.exp(
                jets.Jet2.variable(0.1 * pt, 0) * 0.5
            )
            z = tuple(zj.partial(i, 0) for i in range(5))
            assert np.allclose(op_m.apply(pt, z), op_g.apply(pt, z), rtol=1e-12, atol=1e-12)

    def test_kksh_coefficients_reduce_to_mkdv_limits(self):
        # with the variational coefficients at their aperiodic limits the
        # periodic template is the line operator on the same field
        fam = br.MkdvBreather(alpha=0.9, beta=1.0, x1=0.4)
        a1 = 2 * (fam.beta**2 - fam.alpha**2)
        a2 = (fam.alpha**2 + fam.beta**2) ** 2
        op_m = linops.mkdv_operator(fam)
        op_k = linops.ScalarOperator(op_m.family, a1=a1, a2=a2, label="kksh")
        x = np.linspace(-15, 15, 90)
        for a, b in zip(op_m.coefficients(x), op_k.coefficients(x)):
            assert np.max(np.abs(a - b)) < 1e-12

    def test_kksh_a1_a2_limits_at_small_k(self):
        a1, a2 = st.coeffs_a1a2(1.0, 1e-5)
        pair = st.solve_commensurability(1e-5)
        assert a1 == pytest.approx(2 * (1.0 - pair.alpha**2), abs=1e-4)
        assert a2 == pytest.approx((pair.alpha**2 + 1.0) ** 2, abs=1e-3)


class TestInverseDirection:
    def test_periodic_inverse_identity(self):
        assert linops.kksh_inverse_direction_residual(1.0, 0.03) < 1e-4

    def test_free_operator_variant(self):
        fam = br.MkdvBreather(alpha=1.5, beta=1.0)
        op = linops.mkdv_operator(fam, zero_potential=True)
        x = np.linspace(-5, 5, 11)
        c0, c1, c2 = op.coefficients(x)
        assert np.allclose(c0, (1 + 1.5**2) ** 2)
        assert np.allclose(c1, 0.0)
        assert np.allclose(c2, -2 * (1 - 1.5**2))
