"""Tests for suites and table rendering."""

import json
import math
import unittest

import numpy as np

from fracrot import tables
from fracrot.datasources import resolve_field
from fracrot.models.orders import Axis, DerivKind
from fracrot.suites import (
    SUITES,
    CombinationFitSuite,
    DerivativeSuite,
    IdentitySuite,
    InvariantScanSuite,
    TransformCheckSuite,
    random_polynomial,
)


class TestTables(unittest.TestCase):
    """Test cell formatting and rendering."""

    def test_format_value(self):
        self.assertEqual(tables.format_value(None, 10), "")
        self.assertEqual(tables.format_value(True, 10), "true")
        self.assertEqual(tables.format_value(math.nan, 10), "nan")
        self.assertEqual(tables.format_value(2.0686951396133, 10), "2.06869514")
        self.assertEqual(tables.format_value("r2", 10), "r2")

    def test_render_csv(self):
        text = tables.render_csv(("a", "b"), [{"a": 1.5, "b": None}], precision=4)
        self.assertEqual(text, "a,b\n1.5,\n")

    def test_render_json(self):
        text = tables.render(("a",), [{"a": 0.123456789}], "json", precision=3, summary={"passed": True})
        document = json.loads(text)
        self.assertEqual(document["rows"], [{"a": 0.123}])
        self.assertEqual(document["summary"], {"passed": True})


class TestSuites(unittest.TestCase):
    """Test the batch runs."""

    def test_registry(self):
        self.assertEqual(list(SUITES), ["identity", "deriv", "transform", "invariant-scan", "combination-fit"])

    def test_random_polynomial_is_seeded(self):
        first = random_polynomial(np.random.default_rng(1))
        second = random_polynomial(np.random.default_rng(1))
        self.assertEqual(first, second)
        self.assertTrue(first.is_polynomial())

    def test_identity_suite(self):
        result = IdentitySuite().run()
        self.assertTrue(result.passed, msg=[row for row in result.rows if not row["passed"]])
        self.assertEqual(result.columns, tables.IDENTITY_COLUMNS)
        self.assertEqual(result.render(), IdentitySuite().run().render())

    def test_derivative_suite(self):
        result = DerivativeSuite().run(
            f=resolve_field("r2"), kind=DerivKind.CAPUTO, axis=Axis.X, alpha=0.5, points=[(1.0, 1.0)]
        )
        self.assertEqual(len(result.rows), 1)
        self.assertAlmostEqual(result.rows[0]["value"], 1.5045055561, places=9)
        self.assertIn("1.504505556", result.render())

    def test_integral_reads_positive_order(self):
        result = DerivativeSuite().run(
            f=resolve_field("1,1,0"), kind=DerivKind.INTEGRAL, axis=Axis.X, alpha=0.5, points=[(1.0, 1.0)]
        )
        self.assertEqual(result.rows[0]["alpha"], -0.5)
        self.assertAlmostEqual(result.rows[0]["value"], 0.7522527780, places=9)

    def test_transform_suite(self):
        result = TransformCheckSuite().run(
            law="rl", f=resolve_field("r2"), axes=[Axis.X], alpha=0.5, phis=[0.02, 0.04], points=[(1.0, 1.0)]
        )
        self.assertTrue(result.passed)
        self.assertEqual([row["phi"] for row in result.rows], [0.04, 0.02])
        self.assertIsNone(result.rows[0]["ratio"])
        self.assertTrue(3.0 <= result.rows[1]["ratio"] <= 5.0)

    def test_transform_suite_at_vanishing_quadratic_coefficient(self):
        result = TransformCheckSuite().run(
            law="rl", f=resolve_field("r2"), axes=[Axis.X], alpha=0.7, phis=[0.01, 0.005], points=[(1.0, 1.0)]
        )
        self.assertTrue(result.passed)
        self.assertGreater(result.rows[1]["ratio"], 5.0)

    def test_laplacian_law(self):
        result = TransformCheckSuite().run(
            law="laplacian", f=resolve_field("x3y"), axes=[Axis.X], alpha=0.5, phis=[0.3], points=[(1.0, 2.0)]
        )
        self.assertTrue(result.passed)

    def test_scan_suite(self):
        result = InvariantScanSuite().run(
            expr_id="const-xa", f=resolve_field("const1"), alpha=0.5, phis=[0.0, 0.02, 0.04], points=[(1.0, 1.0)]
        )
        self.assertTrue(result.passed)
        self.assertEqual(result.summary["expr_id"], "const-xa")
        self.assertEqual(len(result.rows), 3)

    def test_fit_suite(self):
        result = CombinationFitSuite().run(
            f=resolve_field("r4"), alpha=0.5, phis=[0.01, 0.02, 0.04], points=[(1.5, 1.0)]
        )
        self.assertTrue(result.passed)
        self.assertEqual(len(result.rows), 1)
        self.assertEqual(result.rows[0]["a"], result.summary["a"])
        self.assertFalse(result.summary["degenerate"])
