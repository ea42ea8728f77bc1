"""Batch runs of Fracrot checks, each producing table rows and a pass/fail verdict."""

import logging
import math
from collections import OrderedDict
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from fracrot import rotation, tables
from fracrot.field import format_power_sum
from fracrot.fracderiv import DEFAULT_QUADRATURE, evaluate
from fracrot.invariants import fit_combination_constant, get_expression, normalized_ratio, scan_invariant
from fracrot.models.field import PowerSum, Rotation
from fracrot.models.orders import DerivKind, DerivSpec, FracOrder
from fracrot.models.reports import EXACT_TOLERANCE, IdentityCheck
from fracrot.transform import (
    RICHARDSON_WINDOW,
    conjugation_check,
    higher_order_agreement,
    infinitesimal_caputo,
    infinitesimal_rl,
    laplacian_invariance,
)

# Angles of the series-versus-substitution rows.
SUBSTITUTION_ANGLES = (-math.pi / 4, -0.3, 0.1, 0.5, math.pi / 4)

# Seed and count of the random polynomial pairs of the product-rule rows.
PRODUCT_RULE_SEED = 20240501
PRODUCT_RULE_PAIRS = 20

LAPLACIAN_TOLERANCE = 1e-8
CONJUGATION_TOLERANCE = 1e-6


@dataclass
class SuiteResult:
    """Rows of a suite run, the columns they are rendered with and the verdict."""

    columns: tuple
    rows: List[dict] = field(default_factory=list)
    passed: bool = True
    summary: Optional[dict] = None

    def render(self, output_format="csv", precision=10):
        """Render the rows as CSV or JSON."""
        return tables.render(self.columns, self.rows, output_format, precision, self.summary)


class Suite:
    """Base class of the batch runs."""

    class Meta:  # pylint: disable=too-few-public-methods
        """Meta for a suite."""

        name = "suite"
        description = ""

    @property
    def logger(self):
        """Logger named after the suite."""
        return logging.getLogger(f"fracrot.suites.{self.Meta.name}")

    def run(self, **kwargs):
        """Run the suite and return a SuiteResult."""
        raise NotImplementedError


def random_polynomial(rng, degree=3, terms=3):
    """Polynomial with small integer coefficients and total degree at most ``degree``."""
    triples = []
    for _ in range(terms):
        beta = int(rng.integers(0, degree + 1))
        lam = int(rng.integers(0, degree - beta + 1))
        triples.append((float(rng.integers(-3, 4)), float(beta), float(lam)))
    return PowerSum.from_triples(triples)


class IdentitySuite(Suite):
    """Identities of the rotation generator on polynomials."""

    class Meta:  # pylint: disable=too-few-public-methods
        """Meta for the identity suite."""

        name = "identity"
        description = "Commutators of L, L' = L, series against substitution, product rule and group law"

    def run(self, tol=1e-10, **kwargs):  # pylint: disable=arguments-differ
        """Run every generator identity; the row order is fixed."""
        checks = rotation.commutator_integer_checks(tol)

        fields = OrderedDict(rotation.monomials_up_to(6))
        fields.update(rotation.TEST_FIELDS)
        checks += rotation.series_substitution_checks(fields, SUBSTITUTION_ANGLES, tol=max(tol, 1e-11))

        rng = np.random.default_rng(PRODUCT_RULE_SEED)
        for index in range(PRODUCT_RULE_PAIRS):
            first, second = random_polynomial(rng), random_polynomial(rng)
            phi = float(rng.uniform(-0.5, 0.5))
            passed = rotation.check_product_rule(first, second, phi, tol)
            checks.append(IdentityCheck("product-rule", f"pair{index}", phi, 0.0 if passed else math.nan, passed))

        for name, ps in rotation.TEST_FIELDS.items():
            residual = rotation.group_law_residual(ps, 0.2, 0.3)
            checks.append(IdentityCheck("group-law", name, 0.5, residual, residual <= tol))

        failed = [check for check in checks if not check.passed]
        for check in failed:
            self.logger.error(
                "%s failed on %s at phi=%g: residual %.3g", check.identity, check.field, check.phi, check.residual
            )
        self.logger.info("Ran %d identity checks, %d failed", len(checks), len(failed))
        return SuiteResult(tables.IDENTITY_COLUMNS, [asdict(check) for check in checks], not failed)


class DerivativeSuite(Suite):
    """Fractional derivatives and integrals of one field at several points."""

    class Meta:  # pylint: disable=too-few-public-methods
        """Meta for the derivative batch."""

        name = "deriv"
        description = "Riemann-Liouville, Caputo or integral values at the requested points"

    def run(self, f, kind, axis, alpha, points, q=DEFAULT_QUADRATURE, **kwargs):  # pylint: disable=arguments-differ
        """Evaluate the operator at every point.

        For integrals a positive ``alpha`` is read as the order of integration. The summary carries the
        field definition as ``coeff,beta,lam`` rows when the field is a power sum.
        """
        if kind is DerivKind.INTEGRAL and alpha > 0:
            alpha = -alpha
        spec = DerivSpec(kind, axis, FracOrder(alpha))
        rows = []
        for p in points:
            value = evaluate(f, spec, p, q)
            self.logger.debug("%s %s^%g of %s at %s = %r", kind.value, axis.value, alpha, f.name, p, value)
            rows.append(
                {
                    "field": f.name,
                    "kind": kind.value,
                    "axis": axis.value,
                    "alpha": alpha,
                    "point_x": p[0],
                    "point_y": p[1],
                    "value": value,
                }
            )
        definition = None if f.source is None else format_power_sum(f.source)
        return SuiteResult(tables.DERIVATIVE_COLUMNS, rows, summary={"field": f.name, "definition": definition})


def _transform_row(report, ratio, passed):
    return {
        "law": report.law,
        "axis": report.axis,
        "alpha": report.alpha,
        "phi": report.phi,
        "point_x": report.point[0],
        "point_y": report.point[1],
        "lhs": report.lhs,
        "rhs": report.rhs,
        "residual": report.residual,
        "ratio": ratio,
        "passed": passed,
    }


class TransformCheckSuite(Suite):
    """Transformation laws at several angles with Richardson ratios between consecutive angles."""

    class Meta:  # pylint: disable=too-few-public-methods
        """Meta for the transformation checks."""

        name = "transform"
        description = "First-order RL and Caputo laws, Laplacian invariance and finite-angle conjugation"

    LAWS = ("rl", "caputo", "laplacian", "conjugation")

    def _report(self, law, f, axis, order, phi, p, q):  # pylint: disable=too-many-arguments
        if law == "rl":
            return infinitesimal_rl(f, axis, order, phi, p, q)
        if law == "caputo":
            return infinitesimal_caputo(f, axis, order, phi, p, q)
        if law == "laplacian":
            return laplacian_invariance(f, phi, p)
        return conjugation_check(f.source, Rotation(phi), axis, order, p, q)

    def run(  # pylint: disable=arguments-differ
        self, law, f, axes, alpha, phis, points, q=DEFAULT_QUADRATURE, **kwargs
    ):
        """Check ``law`` for every axis, point and angle.

        A row fails when its ratio to the previous (larger) angle leaves the window around 4, scaled to
        the actual angle ratio, unless the ratio is larger and the residual is small against phi**2 (the
        law then agrees to higher order); at order 1 and for the exact laws the residual itself must vanish.
        """
        order = FracOrder(alpha)
        angles = sorted(phis, key=abs, reverse=True)
        result = SuiteResult(tables.TRANSFORM_COLUMNS)
        for axis in axes:
            for p in points:
                previous = None
                for phi in angles:
                    report = self._report(law, f, axis, order, phi, p, q)
                    ratio, passed = self._verdict(law, order, report, previous)
                    previous = report
                    result.rows.append(_transform_row(report, ratio, passed))
                    if not passed:
                        self.logger.warning(
                            "%s law failed along %s at %s, phi=%g: residual %.3g, ratio %s",
                            law,
                            axis.value,
                            p,
                            phi,
                            report.residual,
                            ratio,
                        )
                        result.passed = False
        return result

    @staticmethod
    def _verdict(law, order, report, previous):
        if law == "laplacian":
            return None, report.within(LAPLACIAN_TOLERANCE)
        if law == "conjugation":
            return None, report.within(CONJUGATION_TOLERANCE)
        if order.is_integer:
            return None, report.exact
        if previous is None or report.phi == 0.0:
            return None, True
        if report.exact:
            return None, previous.within(4.0 * EXACT_TOLERANCE)
        ratio = 4.0 * normalized_ratio(previous.residual, report.residual, abs(previous.phi), abs(report.phi))
        low, high = RICHARDSON_WINDOW
        if low <= ratio <= high:
            return ratio, True
        return ratio, higher_order_agreement(ratio, report.residual, abs(report.phi), report.rhs)


class InvariantScanSuite(Suite):
    """Angle scan of one invariant expression."""

    class Meta:  # pylint: disable=too-few-public-methods
        """Meta for the invariant scan."""

        name = "invariant-scan"
        description = "Deviation of an invariant expression between rotated frames"

    def run(self, expr_id, f, alpha, phis, points, q=DEFAULT_QUADRATURE, **kwargs):  # pylint: disable=arguments-differ
        """Scan ``expr_id`` and report one row per evaluated frame."""
        report = scan_invariant(get_expression(expr_id), f, alpha, phis, points, q)
        if report.skipped:
            self.logger.warning("%d (phi, point) pairs skipped outside the positive quadrant", len(report.skipped))
        if not report.passed:
            self.logger.warning("%s is not first-order invariant on %s: ratios %s", expr_id, f.name, report.ratios)
        summary = {
            "expr_id": expr_id,
            "max_deviation": report.max_deviation,
            "skipped": len(report.skipped),
            "passed": report.passed,
        }
        return SuiteResult(tables.SCAN_COLUMNS, [asdict(row) for row in report.rows], report.passed, summary)


class CombinationFitSuite(Suite):
    """Fit of the constant A making Q1 + A Q2 first-order invariant."""

    class Meta:  # pylint: disable=too-few-public-methods
        """Meta for the combination fit."""

        name = "combination-fit"
        description = "Least-squares combination constant and its post-fit Richardson ratios"

    def run(self, f, alpha, phis, points, q=DEFAULT_QUADRATURE, **kwargs):  # pylint: disable=arguments-differ
        """Fit A and report the drifts it was fitted on."""
        report = fit_combination_constant(f, alpha, phis, points, q)
        self.logger.info("Fitted A=%.10g (degenerate: %s) on %s", report.a, report.degenerate, f.name)
        rows = [
            {
                "a": report.a,
                "degenerate": report.degenerate,
                "point_x": p[0],
                "point_y": p[1],
                "drift_q1": d1,
                "drift_q2": d2,
                "passed": report.passed,
            }
            for p, (d1, d2) in zip(report.points, report.drifts)
        ]
        summary = {
            "a": report.a,
            "degenerate": report.degenerate,
            "ratios": list(report.ratios),
            "passed": report.passed,
        }
        return SuiteResult(tables.FIT_COLUMNS, rows, report.passed, summary)


SUITES = OrderedDict()
for _suite in (IdentitySuite, DerivativeSuite, TransformCheckSuite, InvariantScanSuite, CombinationFitSuite):
    SUITES[_suite.Meta.name] = _suite
