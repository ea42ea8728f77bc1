"""Tests for invariant expressions, angle scans and the combination fit."""

import math
import unittest
from unittest import mock

from fracrot.exceptions import FitError, ValidationError
from fracrot.field import field_from_power_sum
from fracrot.invariants import (
    EXPRESSIONS,
    evaluate_in_frame,
    fit_combination_constant,
    get_expression,
    normalized_ratio,
    q1_value,
    q2_value,
    scalar_field_check,
    scan_invariant,
)
from fracrot.models.field import PowerSum
from fracrot.models.orders import QuadratureSpec

R2 = field_from_power_sum(PowerSum.from_triples([(1.0, 2.0, 0.0), (1.0, 0.0, 2.0)]), name="r2")
R4 = field_from_power_sum(PowerSum.from_triples([(1.0, 4.0, 0.0), (2.0, 2.0, 2.0), (1.0, 0.0, 4.0)]), name="r4")
CONST1 = field_from_power_sum(PowerSum.constant(1.0), name="const1")

SCAN_ANGLES = (0.0, 0.02, 0.04)


class TestExpressions(unittest.TestCase):
    """Test the expression registry and single evaluations."""

    def test_registry(self):
        self.assertEqual(
            list(EXPRESSIONS),
            ["const-xa", "const-ya", "const-diff", "const-sum", "q1", "q2", "q2-literal", "caputo-q1"],
        )
        self.assertIs(get_expression("q1").evaluator, q1_value)

    def test_unknown_expression(self):
        with self.assertRaises(ValidationError):
            get_expression("q3")

    def test_constant_field_in_any_frame(self):
        expr = get_expression("const-xa")
        for phi in (0.0, 0.1, 0.3):
            self.assertAlmostEqual(evaluate_in_frame(expr, CONST1, 0.5, phi, (1.0, 1.0)), 0.5641895835, places=10)

    def test_q1_of_r2(self):
        # x^a D^a_y (x^2 + y^2) + y^a D^a_x (x^2 + y^2) at (1, 1) is twice the single derivative.
        self.assertAlmostEqual(q1_value(R2, 0.5, (1.0, 1.0)), 2.0 * 2.0686951396, places=9)

    def test_q2_of_r2(self):
        # D^a_x D^a_y (x^2 + y^2) = 2 (x^(2-a) y^-a + x^-a y^(2-a)) / (Gamma(3-a) Gamma(1-a)).
        expected = 2.0 * 2.0 / (math.gamma(2.5) * math.gamma(0.5))
        self.assertAlmostEqual(q2_value(R2, 0.5, (1.0, 1.0)), expected, places=8)

    def test_normalized_ratio(self):
        self.assertAlmostEqual(normalized_ratio(4.0, 1.0, 0.04, 0.02), 1.0, places=15)
        self.assertAlmostEqual(normalized_ratio(2.0, 1.0, 0.04, 0.02), 0.5, places=15)


class TestScan(unittest.TestCase):
    """Test angle scans."""

    def test_constant_column(self):
        report = scan_invariant(get_expression("const-xa"), CONST1, 0.5, SCAN_ANGLES, [(1.0, 1.0)])
        self.assertTrue(report.passed)
        self.assertEqual(len(report.rows), 3)
        for row in report.rows:
            self.assertAlmostEqual(row.value, 0.5641895835, places=10)
        self.assertLess(report.max_deviation, 1e-12)

    def test_radial_field_on_the_diagonal(self):
        for expr_id in ("q1", "q2", "caputo-q1"):
            report = scan_invariant(get_expression(expr_id), R2, 0.5, SCAN_ANGLES, [(1.0, 1.0)])
            self.assertTrue(report.passed, msg=f"{expr_id}: {report.ratios}")
            self.assertEqual([row.phi for row in report.rows], list(SCAN_ANGLES))
            self.assertEqual(report.rows[0].deviation, 0.0)

    def test_radial_field_off_the_diagonal(self):
        # Q1 of r2 drifts at first order away from x = y.
        report = scan_invariant(get_expression("q1"), R2, 0.5, SCAN_ANGLES, [(1.5, 1.0)])
        self.assertFalse(report.passed)
        self.assertEqual(len(report.ratios), 1)
        self.assertLess(report.ratios[0], 0.75)

    def test_skipped_points(self):
        with self.assertLogs("fracrot.invariants", level="WARNING"):
            report = scan_invariant(get_expression("const-xa"), CONST1, 0.5, (0.0, 0.04), [(1.0, 0.001), (1.0, 1.0)])
        self.assertEqual(report.skipped, [(0.04, 1.0, 0.001)])
        self.assertEqual(len(report.rows), 3)


class TestCombinationFit(unittest.TestCase):
    """Test the fit of Q1 + A Q2."""

    def test_off_diagonal_fit(self):
        report = fit_combination_constant(R4, 0.5, (0.01, 0.02, 0.04), [(1.5, 1.0)])
        self.assertFalse(report.degenerate)
        self.assertTrue(report.passed, msg=str(report))
        self.assertTrue(math.isfinite(report.a))
        self.assertEqual(report.points, ((1.5, 1.0),))
        self.assertEqual(len(report.drifts), 1)

    def test_fit_is_stable_in_the_rule_size(self):
        coarse = fit_combination_constant(R4, 0.5, (0.01, 0.02, 0.04), [(1.5, 1.0)], QuadratureSpec(nodes=64))
        fine = fit_combination_constant(R4, 0.5, (0.01, 0.02, 0.04), [(1.5, 1.0)], QuadratureSpec(nodes=128))
        self.assertAlmostEqual(coarse.a, fine.a, delta=1e-4 * (1.0 + abs(fine.a)))

    def test_degenerate_on_the_diagonal(self):
        with self.assertLogs("fracrot.invariants", level="WARNING"):
            report = fit_combination_constant(R2, 0.5, (0.02, 0.04), [(1.0, 1.0)])
        self.assertTrue(report.degenerate)
        self.assertEqual(report.a, 0.0)

    def test_q2_without_drift(self):
        with mock.patch("fracrot.invariants.q2_value", return_value=1.0):
            with self.assertRaises(FitError):
                fit_combination_constant(R2, 0.5, (0.02, 0.04), [(1.5, 1.0)])

    def test_needs_two_angles(self):
        with self.assertRaises(ValidationError):
            fit_combination_constant(R2, 0.5, (0.0, 0.02), [(1.0, 1.0)])
        with self.assertRaises(ValidationError):
            fit_combination_constant(R2, 0.5, (0.01, 0.02), [])


class TestScalarFieldCheck(unittest.TestCase):
    """Test the rotation-scalar condition."""

    def test_check(self):
        points = [(1.0, 1.0), (0.3, 2.0)]
        self.assertTrue(scalar_field_check(R2, points))
        self.assertTrue(scalar_field_check(R4, points))
        self.assertFalse(scalar_field_check(field_from_power_sum(PowerSum.monomial(1.0, 1.0, 0.0)), points))
