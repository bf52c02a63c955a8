import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import contour_integral_in_lambda
from tadpole import (CoefficientMode, Edge, GraphFunction, GraphPoint,
                     GridSpec, KirchhoffSign, PoleError,
                     apply_resolvent, coefficients_closed_form,
                     coefficients_oracle, determinant, eigenfunction,
                     eigenvalue, kernel_continuous, kernel_difference,
                     kernel_full, kernel_neumann_halfline, kernel_point,
                     system_residuals, transmission_residuals)

# z = i and L = ln 2 make exp(-omega L) = 1/2; every coefficient is a small
# fraction, solved by hand from the three vertex systems.
Z_HALF = 1j
L_HALF = math.log(2.0)

HAND_SOLVED = {
    CoefficientMode.CORRECTED: dict(f1=-0.2, g1=0.8, h1=0.4, f2=-0.8, g2=-0.8,
                                    h2=0.6, f3=-0.4, g3=0.6, h3=-0.2),
    CoefficientMode.PAPER: dict(f1=-0.2, g1=0.8, h1=0.4, f2=-0.8, g2=-0.8,
                                h2=0.6, f3=0.2, g3=0.2, h3=-0.4),
}


def random_frequencies(rng, count):
    """omega with Re > 0 staying clear of the coefficient pole at X = 1."""
    re = rng.uniform(0.05, 3.0, count)
    im = rng.uniform(-9.0, 9.0, count)
    omega = re + 1j * im
    return omega[np.abs(omega) <= 10.0]


class TestDeterminant:
    def test_half_point_value(self):
        assert determinant(Z_HALF, L_HALF) == pytest.approx(2.5, abs=1e-14)

    def test_matches_assembled_system_determinant(self, rng):
        # D equals det [[1,1,1],[1,Y,1/Y],[1,Y-1,1-1/Y]], Y = exp(-omega L)
        for omega in random_frequencies(rng, 20):
            z = 1j * omega
            length = 0.9
            y = cmath.exp(-omega * length)
            m = np.array([[1, 1, 1], [1, y, 1 / y], [1, y - 1, 1 - 1 / y]])
            assert determinant(z, length) == pytest.approx(
                complex(np.linalg.det(m)), rel=1e-10)

    def test_vanishes_at_head_resonances(self):
        length = 1.0
        z = 2 * math.pi / length  # exp(-omega L) = 1
        assert abs(determinant(complex(z), length)) < 1e-12

    def test_vanishes_at_y_equals_three(self):
        omega = -math.log(3.0)  # exp(-omega L) = 3 at L = 1
        z = 1j * omega
        assert abs(determinant(z, 1.0)) < 1e-12


class TestCoefficients:
    @pytest.mark.parametrize("mode", list(CoefficientMode))
    def test_hand_solved_values(self, mode):
        c = coefficients_closed_form(Z_HALF, L_HALF, mode)
        for name, value in HAND_SOLVED[mode].items():
            assert getattr(c, name) == pytest.approx(value, abs=1e-14), name

    def test_oracle_matches_hand_solved(self):
        o = coefficients_oracle(Z_HALF, L_HALF, KirchhoffSign.DERIVED_MINUS)
        assert o.f3 == pytest.approx(-0.4, abs=1e-13)
        o = coefficients_oracle(Z_HALF, L_HALF, KirchhoffSign.PAPER_PLUS)
        assert o.f3 == pytest.approx(0.2, abs=1e-13)

    def test_closed_form_agrees_with_oracle(self, rng):
        length = 1.0
        pairings = [(CoefficientMode.CORRECTED, KirchhoffSign.DERIVED_MINUS),
                    (CoefficientMode.PAPER, KirchhoffSign.PAPER_PLUS)]
        for omega in random_frequencies(rng, 40):
            z = 1j * omega
            for mode, sign in pairings:
                c = coefficients_closed_form(z, length, mode)
                o = coefficients_oracle(z, length, sign)
                for name in ("f1", "f2", "f3", "g1", "g2", "g3", "h1", "h2", "h3"):
                    assert getattr(c, name) == pytest.approx(
                        getattr(o, name), abs=1e-12), (name, mode)

    @settings(max_examples=40, deadline=None)
    @given(re=st.floats(0.05, 3.0), im=st.floats(-9.0, 9.0),
           length=st.floats(0.3, 2.5))
    def test_corrected_satisfies_vertex_systems(self, re, im, length):
        z = 1j * (re + 1j * im)
        c = coefficients_closed_form(z, length, CoefficientMode.CORRECTED)
        res = system_residuals(c, z, length, KirchhoffSign.DERIVED_MINUS)
        assert np.max(res) < 1e-10

    def test_paper_satisfies_printed_system_only(self):
        z = 0.4j + 0.3
        c = coefficients_closed_form(z, 1.0, CoefficientMode.PAPER)
        assert np.max(system_residuals(c, z, 1.0, KirchhoffSign.PAPER_PLUS)) < 1e-12
        assert np.max(system_residuals(c, z, 1.0, KirchhoffSign.DERIVED_MINUS)) > 1e-3

    def test_symmetry_identities_corrected_only(self, rng):
        for omega in random_frequencies(rng, 20):
            z = 1j * omega
            c = coefficients_closed_form(z, 1.3, CoefficientMode.CORRECTED)
            assert c.g1 == pytest.approx(-c.f2, abs=1e-12)
            assert c.h1 == pytest.approx(-c.f3, abs=1e-12)
            assert c.g3 == pytest.approx(c.h2, abs=1e-12)
        p = coefficients_closed_form(Z_HALF, L_HALF, CoefficientMode.PAPER)
        assert abs(p.h1 + p.f3) > 0.1  # 0.4 vs -0.2

    def test_pole_raises_with_index(self):
        length = 1.0
        with pytest.raises(PoleError) as info:
            coefficients_closed_form(complex(4 * math.pi / length), length)
        assert info.value.index == 2
        with pytest.raises(PoleError):
            coefficients_oracle(complex(2 * math.pi), 1.0)


class TestKernelFull:
    def test_worked_queue_value(self):
        x = GraphPoint(Edge.QUEUE, 0.0)
        assert kernel_full(x, x, Z_HALF, L_HALF) == pytest.approx(-0.6, abs=1e-14)

    def test_requires_upper_half_plane(self):
        x = GraphPoint(Edge.QUEUE, 1.0)
        with pytest.raises(ValueError):
            kernel_full(x, x, complex(1.0), 1.0)

    def test_symmetry_all_edge_pairs(self, rng):
        length = 1.3
        for _ in range(50):
            z = rng.uniform(0.2, 3) + 1j * rng.uniform(0.2, 2)
            for ex in Edge:
                for ey in Edge:
                    x = GraphPoint(ex, rng.uniform(0, 5 if ex is Edge.QUEUE else length))
                    y = GraphPoint(ey, rng.uniform(0, 5 if ey is Edge.QUEUE else length))
                    k = kernel_full(x, y, z, length)
                    assert k == pytest.approx(kernel_full(y, x, z, length), abs=1e-12)

    def test_paper_mode_breaks_cross_symmetry(self):
        x = GraphPoint(Edge.QUEUE, 1.0)
        y = GraphPoint(Edge.HEAD, 0.7)
        z = 0.8 + 0.6j
        kxy = kernel_full(x, y, z, 1.3, CoefficientMode.PAPER)
        kyx = kernel_full(y, x, z, 1.3, CoefficientMode.PAPER)
        assert abs(kxy - kyx) > 1e-3

    def test_head_coordinate_range_checked(self):
        with pytest.raises(ValueError):
            kernel_full(GraphPoint(Edge.HEAD, 2.0), GraphPoint(Edge.HEAD, 0.1),
                        1j, 1.0)


class TestKernelPoint:
    def test_zero_off_head(self):
        assert kernel_point(GraphPoint(Edge.QUEUE, 1.0),
                            GraphPoint(Edge.HEAD, 0.5), 1j, 1.0) == 0

    def test_zero_at_vertex_and_at_half_wavenumber(self):
        x = GraphPoint(Edge.HEAD, 0.0)
        y = GraphPoint(Edge.HEAD, 0.5)
        assert kernel_point(x, y, 1j, 1.0) == 0
        # cos(zL/2) vanishes at z = pi / L
        v = kernel_point(GraphPoint(Edge.HEAD, 0.3), y, complex(math.pi), 1.0)
        assert abs(v) < 1e-14

    def test_pole_error_carries_index(self):
        with pytest.raises(PoleError) as info:
            kernel_point(GraphPoint(Edge.HEAD, 0.3), GraphPoint(Edge.HEAD, 0.5),
                         complex(4 * math.pi), 1.0)
        assert info.value.index == 2
        with pytest.raises(PoleError) as info:
            kernel_point(GraphPoint(Edge.HEAD, 0.3), GraphPoint(Edge.HEAD, 0.5),
                         0j, 1.0)
        assert info.value.index == 0

    def test_contour_residue_is_eigenprojection_density(self):
        length = 1.0
        lam = eigenvalue(1, length)
        for xs, ys in [(0.3, 0.7), (0.13, 0.41)]:
            x = GraphPoint(Edge.HEAD, xs)
            y = GraphPoint(Edge.HEAD, ys)
            res = contour_integral_in_lambda(
                lambda z: kernel_point(x, y, z, length), lam, 10.0)
            expect = (2 / length) * math.sin(math.sqrt(lam) * xs) \
                * math.sin(math.sqrt(lam) * ys)
            assert res == pytest.approx(expect, abs=1e-10)


class TestKernelContinuous:
    @pytest.mark.parametrize("mode", list(CoefficientMode))
    def test_split_reconstructs_full_kernel(self, mode, rng):
        length = 1.3
        for _ in range(100):
            z = rng.uniform(0.2, 3) + 1j * rng.uniform(0.2, 2)
            for ex in Edge:
                for ey in Edge:
                    x = GraphPoint(ex, rng.uniform(0, 4 if ex is Edge.QUEUE else length))
                    y = GraphPoint(ey, rng.uniform(0, 4 if ey is Edge.QUEUE else length))
                    total = (kernel_continuous(x, y, z, length, mode)
                             + kernel_point(x, y, z, length))
                    assert total == pytest.approx(
                        kernel_full(x, y, z, length, mode), abs=1e-10)

    def test_boundary_value_continuity_near_removable_point(self):
        length = 1.0
        mu0 = 2 * math.pi / length
        x = GraphPoint(Edge.HEAD, 0.3)
        y = GraphPoint(Edge.HEAD, 0.7)
        for mu in (mu0, 0.98 * mu0, 1.02 * mu0):
            for eps in (1e-3, 1e-4, 1e-5):
                jump = abs(kernel_continuous(x, y, mu + 1j * eps, length)
                           - kernel_continuous(x, y, complex(mu), length))
                assert jump <= 5 * eps

    def test_finite_at_removable_point(self):
        length = 1.0
        v = kernel_continuous(GraphPoint(Edge.HEAD, 0.3),
                              GraphPoint(Edge.HEAD, 0.7),
                              complex(2 * math.pi / length), length)
        assert np.isfinite(v.real) and np.isfinite(v.imag)

    def test_vertex_pair_closed_form(self):
        # at x = y = 0 on the head only the constant terms survive:
        # K_c = (1/2iz) [1 - (3X - 1)/(X - 3)]
        z = 1.7 + 0.4j
        length = 1.1
        ring = cmath.exp(1j * z * length)
        expect = (1 - (3 * ring - 1) / (ring - 3)) / (2j * z)
        x = GraphPoint(Edge.HEAD, 0.0)
        assert kernel_continuous(x, x, z, length) == pytest.approx(expect, rel=1e-12)

    def test_rejects_origin(self):
        x = GraphPoint(Edge.QUEUE, 1.0)
        with pytest.raises(ValueError):
            kernel_continuous(x, x, 0j, 1.0)

    def test_paper_mode_equals_subtraction_on_real_axis(self):
        # independent route: assemble the head-head case formula from the
        # paper-mode coefficients at real z (fine away from poles) and
        # subtract the meromorphic part
        length = 1.3
        x = GraphPoint(Edge.HEAD, 0.35)
        y = GraphPoint(Edge.HEAD, 0.9)
        for mu in (0.8, 1.9, 3.3):
            z = complex(mu)
            c = coefficients_closed_form(z, length, CoefficientMode.PAPER)
            bracket = (cmath.exp(1j * z * abs(x.s - y.s))
                       + c.g2 * cmath.exp(1j * z * (y.s + x.s))
                       + c.g3 * cmath.exp(-1j * z * (y.s - x.s))
                       + c.h2 * cmath.exp(-1j * z * (x.s - y.s))
                       + c.h3 * cmath.exp(-1j * z * (x.s + y.s)))
            subtraction = bracket / (2j * z) - kernel_point(x, y, z, length)
            assert kernel_continuous(x, y, z, length, CoefficientMode.PAPER) \
                == pytest.approx(subtraction, abs=1e-12)


class TestNeumannHalfline:
    def test_vertex_value(self):
        assert kernel_neumann_halfline(0.0, 0.0, 1j) == pytest.approx(-1.0)

    def test_symmetric(self, rng):
        for _ in range(10):
            x, y = rng.uniform(0, 5, 2)
            z = rng.uniform(0.2, 2) + 1j * rng.uniform(0.1, 1)
            assert kernel_neumann_halfline(x, y, z) == pytest.approx(
                kernel_neumann_halfline(y, x, z), abs=1e-14)

    def test_helmholtz_residual_and_neumann_condition(self):
        z = 0.9 + 0.7j
        y = 2.0
        errs = []
        for h in (1e-2, 5e-3):
            x = np.arange(0, 4, h)
            k = np.array([kernel_neumann_halfline(xi, y, z) for xi in x])
            lap = (k[:-2] - 2 * k[1:-1] + k[2:]) / h**2
            interior = ~((np.abs(x[1:-1] - y) < 2 * h))
            resid = np.max(np.abs((-lap - z * z * k[1:-1])[interior]))
            neumann = abs((-3 * k[0] + 4 * k[1] - k[2]) / (2 * h))
            errs.append((resid, neumann))
        assert errs[1][0] < 0.3 * errs[0][0]
        assert errs[1][1] < 0.3 * errs[0][1]


class TestKernelDifference:
    def test_closed_form(self, rng):
        for _ in range(30):
            mu = rng.uniform(0.3, 5.0)
            length = rng.uniform(0.3, 2.0)
            x, y = rng.uniform(0, 8, 2)
            ring = cmath.exp(1j * mu * length)
            closed = (2j / mu) * (ring - 1) / (ring - 3) * cmath.exp(1j * mu * (x + y))
            for mode in CoefficientMode:
                assert kernel_difference(x, y, mu, length, mode) == pytest.approx(
                    closed, abs=1e-12)

    def test_shrinking_head_limit(self):
        values = [abs(kernel_difference(1.0, 2.0, 1.5, length))
                  for length in (0.1, 0.01, 0.001)]
        assert values[2] < values[1] < values[0]
        assert values[2] < 2e-3

    @settings(max_examples=30, deadline=None)
    @given(mu=st.floats(0.1, 6.0), length=st.floats(0.05, 2.0),
           x=st.floats(0, 5), y=st.floats(0, 5))
    def test_modulus_bounded_by_head_length(self, mu, length, x, y):
        assert abs(kernel_difference(x, y, mu, length)) <= length * (1 + 1e-12)

    def test_requires_positive_mu(self):
        with pytest.raises(ValueError):
            kernel_difference(1.0, 1.0, 0.0, 1.0)


class TestApplyResolvent:
    Z = 1.0 + 1.0j

    def _source(self, geom, grid):
        return GraphFunction.from_callables(
            geom, grid,
            lambda x: np.exp(-((x - 3.0) ** 2) / 0.5),
            lambda s: 0.5 * np.sin(math.pi * s / geom.head_length) ** 2)

    def test_requires_upper_half_plane(self, geom, grid):
        with pytest.raises(ValueError):
            apply_resolvent(GraphFunction.zeros(geom, grid), complex(1.0))

    def test_eigenvector_is_rescaled(self, geom):
        grid = GridSpec(10.0, 801, 161)
        phi = eigenfunction(1, geom, grid)
        u = apply_resolvent(phi, self.Z)
        lam = eigenvalue(1, geom.head_length)
        expect = phi * (1.0 / (lam - self.Z ** 2))
        err = max(np.max(np.abs(u.queue_values - expect.queue_values)),
                  np.max(np.abs(u.head_values - expect.head_values)))
        assert err * abs(lam - self.Z ** 2) < 1e-3

    def _residuals(self, geom, n):
        grid = GridSpec(10.0, n, 2 * n // 10 + 1)
        g = self._source(geom, grid)
        u = apply_resolvent(g, self.Z)
        hq, hh = grid.queue_spacing, grid.head_spacing(geom)
        rq = (-(u.queue_values[:-2] - 2 * u.queue_values[1:-1] + u.queue_values[2:])
              / hq**2 - self.Z**2 * u.queue_values[1:-1] - g.queue_values[1:-1])
        rh = (-(u.head_values[:-2] - 2 * u.head_values[1:-1] + u.head_values[2:])
              / hh**2 - self.Z**2 * u.head_values[1:-1] - g.head_values[1:-1])
        ode = max(np.max(np.abs(rq)), np.max(np.abs(rh)))
        return ode, transmission_residuals(u)

    def test_residual_second_order_and_vertex_conditions(self, geom):
        r1, (c1, k1) = self._residuals(geom, 251)
        r2, (c2, k2) = self._residuals(geom, 501)
        r3, (c3, k3) = self._residuals(geom, 1001)
        assert 1.7 < math.log2(r1 / r2) < 2.3
        assert 1.7 < math.log2(r2 / r3) < 2.3
        assert max(c1, c2, c3) < 1e-13          # continuity is exact by construction
        assert 1.7 < math.log2(k1 / k2) < 2.3   # kirchhoff flux residual is O(h^2)

    def test_first_resolvent_identity(self, geom):
        # the second application integrates only over the truncated queue,
        # so the identity defect floors at exp(-2 Im z x_max); keep x_max
        # large enough that quadrature, not truncation, dominates
        grid = GridSpec(25.0, 2001, 161)
        g = self._source(geom, grid)
        z1, z2 = 0.7 + 0.9j, 1.3 + 0.5j
        r2g = apply_resolvent(g, z2)
        lhs = (z1**2 - z2**2) * apply_resolvent(r2g, z1)
        rhs = apply_resolvent(g, z1) - r2g
        diff = lhs - rhs
        scale = max(np.max(np.abs(rhs.queue_values)), np.max(np.abs(rhs.head_values)))
        err = max(np.max(np.abs(diff.queue_values)), np.max(np.abs(diff.head_values)))
        assert err / scale < 5e-3
