"""Tests for the transformation laws under frame rotation."""

import math
import unittest

import numpy as np

from fracrot.exceptions import DomainError, PreconditionError, ValidationError
from fracrot.field import field_from_power_sum
from fracrot.models.field import PowerSum, Rotation
from fracrot.models.orders import Axis, FracOrder
from fracrot.models.reports import TransformReport
from fracrot.transform import (
    RICHARDSON_WINDOW,
    commutator_x_with_frac,
    conjugation_check,
    frac_deriv_rotated_axis,
    infinitesimal_caputo,
    infinitesimal_rl,
    laplacian,
    laplacian_invariance,
    ratio_in_window,
    richardson_ratio,
)

R2 = PowerSum.from_triples([(1.0, 2.0, 0.0), (1.0, 0.0, 2.0)])
R4 = PowerSum.from_triples([(1.0, 4.0, 0.0), (2.0, 2.0, 2.0), (1.0, 0.0, 4.0)])
ONE = PowerSum.constant(1.0)
HALF = FracOrder(0.5)

RICHARDSON_POINTS = ((1.6, 1.0), (1.5, 1.0), (1.0, 1.5), (2.0, 1.5), (1.5, 2.0))


class TestRotatedAxis(unittest.TestCase):
    """Test derivatives along the primed axes."""

    def test_constant_field(self):
        value = frac_deriv_rotated_axis(field_from_power_sum(ONE), Rotation(0.05), Axis.X, HALF, (1.0, 1.0))
        self.assertAlmostEqual(value, 0.5641895835, places=10)

    def test_zero_angle_is_the_plain_derivative(self):
        value = frac_deriv_rotated_axis(field_from_power_sum(R2), Rotation(0.0), Axis.X, HALF, (1.0, 1.0))
        self.assertAlmostEqual(value, 2.0686951396, places=9)

    def test_rotated_point_outside_quadrant(self):
        with self.assertRaises(DomainError):
            frac_deriv_rotated_axis(field_from_power_sum(R2), Rotation(0.1), Axis.X, HALF, (1.0, -0.5))


class TestInfinitesimalRL(unittest.TestCase):
    """Test the first-order Riemann-Liouville law."""

    def test_right_side_of_r2(self):
        report = infinitesimal_rl(field_from_power_sum(R2), Axis.X, HALF, 0.02, (1.0, 1.0))
        expected = 2.0686951396 + 0.02 * (2.0 / math.gamma(1.5) * 0.5 + 1.0 / math.gamma(-0.5))
        self.assertAlmostEqual(report.rhs, expected, places=9)
        self.assertEqual(report.law, "rl")
        self.assertEqual(report.point, (1.0, 1.0))
        self.assertLess(report.residual, 1e-3)

    def test_constant_field(self):
        phi = 0.01
        report = infinitesimal_rl(field_from_power_sum(ONE), Axis.X, HALF, phi, (1.0, 1.0))
        self.assertAlmostEqual(report.rhs, 1.0 / math.gamma(0.5) + phi / math.gamma(-0.5), places=12)
        rotated_x = math.cos(phi) + math.sin(phi)
        self.assertAlmostEqual(report.lhs, rotated_x**-0.5 / math.gamma(0.5), places=11)

    def test_residual_is_quadratic(self):
        for ps in (R2, R4):
            f = field_from_power_sum(ps)
            for alpha in (0.3, 0.5, 0.7):
                for axis in Axis:
                    for p in RICHARDSON_POINTS:
                        report = infinitesimal_rl(f, axis, FracOrder(alpha), 0.01, p, richardson=True)
                        self.assertTrue(ratio_in_window(report), msg=f"{ps} {alpha} {axis} {p}: {report}")

    def test_vanishing_quadratic_coefficient(self):
        # On r2 at alpha = 0.7 the phi**2 term of the x-axis residual nearly cancels at (1, 1).
        report = infinitesimal_rl(field_from_power_sum(R2), Axis.X, FracOrder(0.7), 0.01, (1.0, 1.0), richardson=True)
        self.assertGreater(report.richardson_ratio, RICHARDSON_WINDOW[1])
        self.assertTrue(ratio_in_window(report), msg=str(report))

    def test_order_between_one_and_two(self):
        report = infinitesimal_rl(field_from_power_sum(R4), Axis.X, FracOrder(1.5), 0.01, (1.5, 1.5), richardson=True)
        self.assertTrue(ratio_in_window(report), msg=str(report))

    def test_order_one_is_exact(self):
        for axis in Axis:
            report = infinitesimal_rl(field_from_power_sum(R4), axis, FracOrder(1.0), 0.3, (1.2, 1.7))
            self.assertTrue(report.within(1e-12), msg=str(report))
            self.assertIsNone(report.richardson_ratio)

    def test_order_one_is_exact_on_r2(self):
        f = field_from_power_sum(R2)
        for axis in Axis:
            for p in ((1.0, 1.0), (1.5, 1.0), (1.0, 1.5), (2.0, 0.5), (0.5, 2.0)):
                report = infinitesimal_rl(f, axis, FracOrder(1.0), 0.02, p)
                self.assertLessEqual(report.residual, 1e-12, msg=f"{axis} {p}: {report}")

    def test_sign_symmetry(self):
        f = field_from_power_sum(R2)
        for axis in Axis:
            plus = infinitesimal_rl(f, axis, HALF, 0.03, (1.0, 1.0))
            minus = infinitesimal_rl(f, axis, HALF, -0.03, (1.0, 1.0))
            base = infinitesimal_rl(f, axis, HALF, 0.0, (1.0, 1.0))
            self.assertAlmostEqual((plus.rhs + minus.rhs) / 2.0, base.rhs, places=12)

    def test_needs_rotation_scalar(self):
        with self.assertRaises(PreconditionError):
            infinitesimal_rl(field_from_power_sum(PowerSum.monomial(1.0, 1.0, 0.0)), Axis.X, HALF, 0.02, (1.0, 1.0))

    def test_point_leaving_the_wedge(self):
        with self.assertRaises(DomainError):
            infinitesimal_rl(field_from_power_sum(R2), Axis.X, HALF, 0.04, (1.0, 0.001))

    def test_order_outside_range(self):
        with self.assertRaises(ValidationError):
            infinitesimal_rl(field_from_power_sum(R2), Axis.X, FracOrder(2.5), 0.02, (1.0, 1.0))


class TestInfinitesimalCaputo(unittest.TestCase):
    """Test the first-order Caputo law."""

    def test_right_side_of_r2(self):
        report = infinitesimal_caputo(field_from_power_sum(R2), Axis.X, HALF, 0.02, (1.0, 1.0))
        expected = 1.5045055561 + 0.02 * (1.1283791671 + 2.0 / math.gamma(0.5))
        self.assertAlmostEqual(report.rhs, expected, places=9)

    def test_constant_field_vanishes(self):
        for phi in (0.0, 0.02, 0.3):
            report = infinitesimal_caputo(field_from_power_sum(ONE), Axis.X, HALF, phi, (1.0, 1.0))
            self.assertEqual(report.rhs, 0.0)
            self.assertAlmostEqual(report.lhs, 0.0, places=14)

    def test_residual_is_quadratic(self):
        for ps in (R2, R4):
            f = field_from_power_sum(ps)
            for alpha in (0.3, 0.5, 0.7):
                for axis in Axis:
                    for p in RICHARDSON_POINTS:
                        report = infinitesimal_caputo(f, axis, FracOrder(alpha), 0.01, p, richardson=True)
                        self.assertTrue(ratio_in_window(report), msg=f"{ps} {alpha} {axis} {p}: {report}")

    def test_order_outside_range(self):
        with self.assertRaises(ValidationError):
            infinitesimal_caputo(field_from_power_sum(R2), Axis.X, FracOrder(1.5), 0.02, (1.0, 1.0))


class TestRichardsonRatio(unittest.TestCase):
    """Test the residual ratio between an angle and its half."""

    def test_ratio(self):
        coarse = TransformReport(1.0, 1.4, 0.04)
        fine = TransformReport(1.0, 1.1, 0.02)
        self.assertAlmostEqual(richardson_ratio(coarse, fine), 4.0, places=12)

    def test_exact_fine_level(self):
        self.assertIsNone(richardson_ratio(TransformReport(1.0, 1.4, 0.04), TransformReport(1.0, 1.0, 0.02)))

    def test_window(self):
        self.assertTrue(ratio_in_window(TransformReport(1.0, 1.001, 0.04, richardson_ratio=4.2)))
        self.assertFalse(ratio_in_window(TransformReport(1.0, 1.001, 0.04, richardson_ratio=2.0)))

    def test_higher_order_agreement(self):
        # Fine residual 1e-9 / 8 against 1e-2 * 0.01**2 * (1 + |rhs|).
        self.assertTrue(ratio_in_window(TransformReport(1.0, 1.0 + 1e-9, 0.02, richardson_ratio=8.0)))
        self.assertFalse(ratio_in_window(TransformReport(1.0, 1.001, 0.02, richardson_ratio=8.0)))
        self.assertFalse(ratio_in_window(TransformReport(1.0, 1.0 + 1e-9, 0.02, richardson_ratio=2.0)))


class TestCommutators(unittest.TestCase):
    """Test the commutators of the fractional derivative with the coordinate and with D1."""

    def test_radial_field(self):
        report = commutator_x_with_frac(field_from_power_sum(R2), HALF, (1.0, 1.0))
        self.assertAlmostEqual(report.position[0], -1.1283791671, places=9)
        self.assertAlmostEqual(report.position[1], -1.1283791671, places=9)
        self.assertAlmostEqual(report.derivative[1], 1.0 / math.gamma(-0.5), places=12)
        position, derivative = report.residuals()
        self.assertLess(position, 1e-9)
        self.assertLess(derivative, 1e-9)

    def test_vanishing_boundary(self):
        report = commutator_x_with_frac(field_from_power_sum(PowerSum.monomial(1.0, 1.0, 1.0)), HALF, (1.3, 0.8))
        self.assertEqual(report.derivative[1], 0.0)
        self.assertAlmostEqual(report.derivative[0], 0.0, places=10)
        self.assertLess(report.residuals()[0], 1e-10)

    def test_y_axis(self):
        report = commutator_x_with_frac(field_from_power_sum(R4), FracOrder(0.3), (1.2, 0.9), axis=Axis.Y)
        position, derivative = report.residuals()
        self.assertLess(position, 1e-9)
        self.assertLess(derivative, 1e-9)

    def test_order_range(self):
        with self.assertRaises(ValidationError):
            commutator_x_with_frac(field_from_power_sum(R2), FracOrder(1.5), (1.0, 1.0))

    def test_random_power_sums(self):
        rng = np.random.default_rng(20240611)
        for index in range(20):
            axis = Axis.X if index % 2 == 0 else Axis.Y
            # One term constant along the axis keeps the boundary trace nonzero.
            pairs = [(0.0, float(rng.uniform(-0.5, 3.0)))]
            pairs += [(float(rng.uniform(0.0, 3.0)), float(rng.uniform(-0.5, 3.0))) for _ in range(2)]
            triples = [
                (float(rng.uniform(0.5, 2.0)) * rng.choice([-1.0, 1.0]), *(pair if axis is Axis.X else pair[::-1]))
                for pair in pairs
            ]
            f = field_from_power_sum(PowerSum.from_triples(triples))
            order = FracOrder(float(rng.uniform(0.1, 0.9)))
            p = tuple(float(v) for v in rng.uniform(0.5, 2.5, size=2))
            report = commutator_x_with_frac(f, order, p, axis=axis)
            self.assertNotEqual(report.derivative[1], 0.0)
            for left, right in (report.position, report.derivative):
                self.assertLessEqual(abs(left - right), 1e-7 * (1.0 + abs(right)), msg=f"{triples} {order} {p}")

    def test_negative_exponent_along_the_axis(self):
        f = field_from_power_sum(PowerSum.monomial(1.0, -0.4, 1.0))
        with self.assertRaises(DomainError):
            commutator_x_with_frac(f, HALF, (1.0, 1.0))


class TestLaplacianAndConjugation(unittest.TestCase):
    """Test Laplacian invariance and the finite-angle conjugation law."""

    def test_laplacian_values(self):
        self.assertEqual(laplacian(field_from_power_sum(R2), (1.0, 2.0)), 4.0)
        self.assertEqual(laplacian(field_from_power_sum(R4), (1.0, 1.0)), 32.0)
        self.assertEqual(laplacian(field_from_power_sum(PowerSum.monomial(1.0, 3.0, 1.0)), (1.0, 2.0)), 12.0)

    def test_laplacian_is_invariant(self):
        for ps in (R2, PowerSum.monomial(1.0, 3.0, 1.0), R4):
            f = field_from_power_sum(ps)
            for phi in (0.1, 0.3, 0.7):
                for p in ((1.0, 1.5), (0.8, 2.0), (1.2, 2.5)):
                    report = laplacian_invariance(f, phi, p)
                    self.assertTrue(report.within(1e-8), msg=f"{ps} {phi} {p}: {report}")

    def test_conjugation_of_monomial(self):
        ps = PowerSum.monomial(1.0, 1.3, 0.7)
        rot = Rotation(0.1)
        for axis in Axis:
            report = conjugation_check(ps, rot, axis, HALF, (2.0, 3.0))
            self.assertTrue(report.within(1e-6), msg=str(report))
        x, y = rot.apply((2.0, 3.0))
        report = conjugation_check(ps, rot, Axis.X, HALF, (2.0, 3.0))
        expected = math.gamma(2.3) / math.gamma(1.8) * x**0.8 * y**0.7
        self.assertAlmostEqual(report.rhs, expected, places=10)
