import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hermwave.diagnostics import (
    ErrorReport,
    display_grid,
    fill_rates,
    fit_rate,
    h1_distance,
    h1_error,
    l2_error,
    linf_error,
    pairwise_rate,
)
from hermwave.field import SpectralField, project
from hermwave.hermite import BasisSpec
from hermwave.operators import stiffness_matrix


def gauss(x):
    return np.exp(-x**2)


class TestNorms:
    def test_l2_of_gaussian(self):
        zero = SpectralField(BasisSpec(20), np.zeros(21))
        assert l2_error(zero, gauss) == pytest.approx((math.pi / 2) ** 0.25, rel=1e-12)

    def test_l2_unit_coefficient(self):
        f = SpectralField(BasisSpec(10, center=2.0, scale=0.5), np.eye(11)[7])
        assert l2_error(f, lambda x: 0 * x) == pytest.approx(1.0, abs=1e-10)

    def test_identical_is_zero(self):
        f = project(BasisSpec(12), gauss)
        from hermwave.field import evaluate

        assert l2_error(f, lambda x: evaluate(f, x)) <= 1e-15
        assert linf_error(f, lambda x: evaluate(f, x)) == 0.0
        assert h1_error(f, f) == 0.0

    def test_l2_2d_product(self):
        basis = (BasisSpec(10), BasisSpec(10))
        zero = SpectralField(basis, np.zeros((11, 11)))
        ref = math.sqrt(math.pi / 2)
        assert l2_error(zero, lambda x, y: gauss(x) * gauss(y), rule=64) == pytest.approx(ref, rel=1e-12)

    def test_linf_default_grid(self):
        (x,) = display_grid(SpectralField(BasisSpec(3, center=1.0, scale=2.0), np.zeros(4)))
        assert x[0] == -19.0 and x[-1] == 21.0 and x.size == 2001
        zero = SpectralField(BasisSpec(3), np.zeros(4))
        assert linf_error(zero, gauss) == 1.0

    def test_display_grid_2d(self):
        f = SpectralField((BasisSpec(2), BasisSpec(2)), np.zeros((3, 3)))
        X, Y = display_grid(f, window=(0, 20, 0, 10))
        assert X.shape == (201, 201)
        assert X[-1, 0] == 20.0 and Y[0, -1] == 10.0

    def test_h1_pure_coefficients(self):
        spec = BasisSpec(9)
        U = np.random.default_rng(0).standard_normal(10)
        K = stiffness_matrix(spec).matrix
        f = SpectralField(spec, U)
        zero = SpectralField(spec, np.zeros(10))
        assert h1_error(f, zero) == pytest.approx(math.sqrt(U @ U + U @ K @ U), rel=1e-14)

    def test_h1_function_and_field_paths_agree(self):
        spec = BasisSpec(16)
        f = project(spec, lambda x: gauss(x - 0.3))
        fine = project(BasisSpec(60), lambda x: gauss(x - 0.3))
        via_field = h1_error(f, fine)
        via_fn = h1_error(f, lambda x: gauss(x - 0.3), lambda x: -2 * (x - 0.3) * gauss(x - 0.3))
        assert via_fn == pytest.approx(via_field, rel=1e-6)

    def test_h1_gaussian_closed_form(self):
        # |exp(-x^2)|_L2^2 + |(-2x exp(-x^2))|^2 = sqrt(pi/2) (1 + 1)
        zero = SpectralField(BasisSpec(10), np.zeros(11))
        val = h1_error(zero, gauss, lambda x: -2 * x * gauss(x), rule=64)
        assert val == pytest.approx(math.sqrt(2 * math.sqrt(math.pi / 2)), rel=1e-12)

    def test_h1_2d(self):
        basis = (BasisSpec(6), BasisSpec(6))
        C = np.random.default_rng(3).standard_normal((7, 7))
        K = stiffness_matrix(basis[0]).matrix
        f = SpectralField(basis, C)
        zero = SpectralField(basis, np.zeros((7, 7)))
        ref = math.sqrt(np.sum(C * C) + np.sum(C * (K @ C)) + np.sum(C * (C @ K)))
        assert h1_error(f, zero) == pytest.approx(ref, rel=1e-13)
        fn = h1_error(f, lambda x, y: 0 * x, (lambda x, y: 0 * x, lambda x, y: 0 * x))
        assert fn == pytest.approx(ref, rel=1e-10)

    def test_h1_needs_derivative(self):
        with pytest.raises(ValueError):
            h1_error(SpectralField(BasisSpec(2), np.zeros(3)), gauss)

    def test_h1_distance_padding_and_placement(self):
        a = SpectralField(BasisSpec(3), [1.0, 0, 0, 0])
        b = SpectralField(BasisSpec(5), [1.0, 0, 0, 0, 0, 0])
        assert h1_distance(a, b) == 0.0
        with pytest.raises(ValueError):
            h1_distance(a, SpectralField(BasisSpec(3, center=1.0), np.zeros(4)))

    @given(arrays(np.float64, (3, 8), elements=st.floats(-5, 5)))
    @settings(max_examples=40, deadline=None)
    def test_triangle_inequality(self, rows):
        spec = BasisSpec(7)
        a, b, c = (SpectralField(spec, r) for r in rows)
        from hermwave.field import evaluate

        ec = lambda x: evaluate(c, x)
        lhs = abs(l2_error(a, ec) - l2_error(b, ec))
        assert lhs <= np.linalg.norm(rows[0] - rows[1]) + 1e-12


class TestRates:
    def test_pairwise_reference_value(self):
        # The table's rate was computed before the errors were rounded to 4 digits.
        assert pairwise_rate(10, 2.751e-4, 15, 2.855e-5) == pytest.approx(5.588, abs=1e-3)

    def test_fit_power_law(self):
        pts = [(N, N ** (-11 / 12)) for N in (32, 64, 128)]
        assert fit_rate(pts) == pytest.approx(11 / 12, abs=1e-12)

    def test_constant_errors(self):
        assert fit_rate([(10, 1e-3), (20, 1e-3), (40, 1e-3)]) == pytest.approx(0.0, abs=1e-12)

    def test_fit_rejects_bad_input(self):
        with pytest.raises(ValueError):
            fit_rate([(10, 1e-3)])
        with pytest.raises(ValueError):
            fit_rate([(10, 1e-3), (20, 0.0)])

    def test_spectral_rates_increase(self):
        q = 0.5
        Ns = [10, 20, 30, 40, 50]
        rates = [pairwise_rate(a, q**a, b, q**b) for a, b in zip(Ns, Ns[1:])]
        assert all(r1 < r2 for r1, r2 in zip(rates, rates[1:]))

    def test_fill_rates(self):
        rows = [ErrorReport(10, 1e-2, 2e-2), ErrorReport(20, 1e-3, 2e-3, h1_error=1.0), ErrorReport(40, 1e-4, 0.0)]
        fill_rates(rows)
        assert rows[0].rate_l2 is None
        assert rows[1].rate_l2 == pytest.approx(math.log(10) / math.log(2))
        assert rows[1].rate_h1 is None
        assert rows[2].rate_linf is None
