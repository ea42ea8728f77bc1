"""Rotation invariants built from fractional derivatives.

Every expression is evaluated in a frame: the field seen from that frame, the point in that frame's
coordinates and fractional operators along that frame's axes. Scans compare rotated frames with the
original one and measure how the deviation scales with the angle.
"""

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable

import numpy as np

from fracrot.exceptions import FitError, ValidationError
from fracrot.field import in_wedge, is_rotation_scalar, pullback
from fracrot.fracderiv import DEFAULT_QUADRATURE, caputo_quadrature, frac_field, rl_operator
from fracrot.models.field import Rotation
from fracrot.models.orders import Axis, FracOrder
from fracrot.models.reports import EXACT_TOLERANCE, FitReport, ScanReport, ScanRow

logger = logging.getLogger("fracrot.invariants")

# Normalized Richardson window: (dev(phi1) / dev(phi2)) / (phi1 / phi2)**2.
NORMALIZED_WINDOW = (0.75, 1.25)

# First-order drift coefficients below this multiple of 1 + |Q| are taken as zero.
DRIFT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class InvariantExpr:
    """A named combination of coordinates and fractional derivatives.

    ``evaluator(field, alpha, point, q)`` evaluates the combination for ``field`` at ``point``, both
    expressed in the same frame.
    """

    id: str  # pylint: disable=invalid-name
    description: str
    evaluator: Callable


def _rl(f, axis, alpha, p, q):
    return rl_operator(f, axis, alpha, p, q)


def _const_xa(f, alpha, p, q):
    return p[0] ** alpha * _rl(f, Axis.X, alpha, p, q)


def _const_ya(f, alpha, p, q):
    return p[1] ** alpha * _rl(f, Axis.Y, alpha, p, q)


def _const_diff(f, alpha, p, q):
    x, y = p
    return y**-alpha * _rl(f, Axis.X, alpha, p, q) - x**-alpha * _rl(f, Axis.Y, alpha, p, q)


def _const_sum(f, alpha, p, q):
    x, y = p
    return x ** (2.0 + alpha) * _rl(f, Axis.X, alpha, p, q) + y ** (2.0 + alpha) * _rl(f, Axis.Y, alpha, p, q)


def q1_value(f, alpha, p, q=DEFAULT_QUADRATURE):
    """x^a D^a_y f + y^a D^a_x f."""
    x, y = p
    return x**alpha * _rl(f, Axis.Y, alpha, p, q) + y**alpha * _rl(f, Axis.X, alpha, p, q)


def q2_value(f, alpha, p, q=DEFAULT_QUADRATURE):
    """x^a y^a D^a_x D^a_y f."""
    x, y = p
    inner = frac_field(f, Axis.Y, alpha, q)
    return x**alpha * y**alpha * _rl(inner, Axis.X, alpha, p, q)


def _q2_literal(f, alpha, p, q):
    x, y = p
    inner = frac_field(f, Axis.Y, alpha, q)
    return x**alpha * y**alpha * _rl(inner, Axis.Y, alpha, p, q)


def _caputo_q1(f, alpha, p, q):
    x, y = p
    order = FracOrder(alpha)
    return x**alpha * caputo_quadrature(f, Axis.Y, order, p, q) + y**alpha * caputo_quadrature(f, Axis.X, order, p, q)


EXPRESSIONS = OrderedDict()
for _expr in (
    InvariantExpr("const-xa", "x^a D^a_x f", _const_xa),
    InvariantExpr("const-ya", "y^a D^a_y f", _const_ya),
    InvariantExpr("const-diff", "y^-a D^a_x f - x^-a D^a_y f", _const_diff),
    InvariantExpr("const-sum", "x^(2+a) D^a_x f + y^(2+a) D^a_y f", _const_sum),
    InvariantExpr("q1", "x^a D^a_y f + y^a D^a_x f", q1_value),
    InvariantExpr("q2", "x^a y^a D^a_x D^a_y f", q2_value),
    InvariantExpr("q2-literal", "x^a y^a D^a_y D^a_y f", _q2_literal),
    InvariantExpr("caputo-q1", "x^a ^C D^a_y f + y^a ^C D^a_x f", _caputo_q1),
):
    EXPRESSIONS[_expr.id] = _expr


def get_expression(expr_id):
    """Look up a registered expression by id."""
    try:
        return EXPRESSIONS[expr_id]
    except KeyError:
        known = list(EXPRESSIONS)
        raise ValidationError({"expr": f"unknown expression {expr_id!r}, expected one of {known}"}) from None


def evaluate_in_frame(expr, f, alpha, phi, p, q=DEFAULT_QUADRATURE):
    """Value of ``expr`` in the frame rotated by ``phi``, at the image of ``p``."""
    rot = Rotation(phi)
    return expr.evaluator(pullback(f, rot), alpha, rot.apply(p), q)


def _is_exact(deviation, reference):
    return deviation <= EXACT_TOLERANCE * (1.0 + abs(reference))


def normalized_ratio(coarse, fine, coarse_phi, fine_phi):
    """Deviation ratio between two angles divided by the ratio expected for a quadratic deviation."""
    return (coarse / fine) / (coarse_phi / fine_phi) ** 2


def _scan_point_ratios(levels, reference):
    """Normalized ratios between consecutive angles (largest first); None entries mean both exact."""
    ratios = []
    ordered = sorted(levels, key=lambda item: -abs(item[0]))
    for (coarse_phi, coarse), (fine_phi, fine) in zip(ordered, ordered[1:]):
        if _is_exact(fine, reference):
            ratios.append(None if _is_exact(coarse, reference) else math.inf)
        else:
            ratios.append(normalized_ratio(coarse, fine, abs(coarse_phi), abs(fine_phi)))
    return ratios


def _ratio_passes(ratio):
    low, high = NORMALIZED_WINDOW
    return ratio is None or low <= ratio <= high


def scan_invariant(expr, f, alpha, phis, points, q=DEFAULT_QUADRATURE):
    """Evaluate ``expr`` in rotated frames and measure its deviation from the original frame.

    Args:
        expr (InvariantExpr): Expression to scan.
        f (ScalarField): Field in the original frame.
        alpha (float): Fractional order.
        phis (list): Angles; 0 is always evaluated as the reference.
        points (list): Points in the original frame.
        q (QuadratureSpec): Rule sizes.

    Returns:
        ScanReport: One row per evaluated (point, angle); points whose rotated image leaves the quadrant
        are skipped and listed. ``passed`` is True when every point shows a deviation quadratic in the
        angle, or no deviation at all.
    """
    report = ScanReport(expr.id)
    for p in points:
        reference = expr.evaluator(f, alpha, tuple(p), q)
        levels = []
        for phi in phis:
            if phi == 0.0:
                report.rows.append(ScanRow(expr.id, alpha, 0.0, p[0], p[1], reference, 0.0))
                continue
            if not in_wedge(Rotation(phi), p):
                logger.warning("Skipping %s at %s: rotation by %g leaves the positive quadrant", expr.id, p, phi)
                report.skipped.append((phi, p[0], p[1]))
                continue
            value = evaluate_in_frame(expr, f, alpha, phi, p, q)
            deviation = abs(value - reference)
            report.rows.append(ScanRow(expr.id, alpha, phi, p[0], p[1], value, deviation))
            levels.append((phi, deviation))
        for ratio in _scan_point_ratios(levels, reference):
            if ratio is not None:
                report.ratios.append(ratio)
            if not _ratio_passes(ratio):
                report.passed = False
    logger.debug(
        "Scan of %s: %d rows, %d skipped, ratios %s", expr.id, len(report.rows), len(report.skipped), report.ratios
    )
    return report


def _frame_value(evaluator, f, alpha, phi, p, q):
    rot = Rotation(phi)
    return evaluator(pullback(f, rot), alpha, rot.apply(p), q)


def _first_order_drift(phis, slopes):
    """Extrapolate symmetric slopes (Q(phi) - Q(-phi)) / (2 phi) to phi = 0 in powers of phi^2."""
    columns = min(len(phis), 3)
    design = np.array([[phi ** (2 * k) for k in range(columns)] for phi in phis], dtype=float)
    coefficients, *_ = np.linalg.lstsq(design, np.asarray(slopes, dtype=float), rcond=None)
    return float(coefficients[0])


def _drift_sample(f, alpha, p, usable, q):
    """Reference values, one-sided drifts Q(phi) - Q(0) and first-order drift coefficients of Q1 and Q2."""
    sample = {"point": p, "angles": usable}
    for key, evaluator in (("q1", q1_value), ("q2", q2_value)):
        base = evaluator(f, alpha, p, q)
        plus = [_frame_value(evaluator, f, alpha, phi, p, q) for phi in usable]
        minus = [_frame_value(evaluator, f, alpha, -phi, p, q) for phi in usable]
        slopes = [(up - down) / (2.0 * phi) for phi, up, down in zip(usable, plus, minus)]
        sample[key] = (base, [value - base for value in plus], _first_order_drift(usable, slopes))
    return sample


def fit_combination_constant(f, alpha, phis, points, q=DEFAULT_QUADRATURE):
    """Find A such that Q1 + A Q2 has no first-order drift under rotation.

    Q1 = x^a D^a_y f + y^a D^a_x f and Q2 = x^a y^a D^a_x D^a_y f. At every point the first-order drift
    coefficient of each is the limit of (Q(phi) - Q(-phi)) / (2 phi), extrapolated in phi^2 from the
    requested angles, and A minimizes the sum over points of (d1 + A d2)^2.

    Args:
        f (ScalarField): Field in the original frame.
        alpha (float): Fractional order.
        phis (list): Angles; the signs are ignored and at least two distinct non-zero magnitudes are needed.
        points (list): Points in the original frame.
        q (QuadratureSpec): Rule sizes.

    Returns:
        FitReport: A, whether the fit was degenerate (Q1 already without drift), the fitted drifts and the
        normalized Richardson ratios of Q1 + A Q2.

    Raises:
        ValidationError: With fewer than two distinct non-zero angles or no points.
        FitError: When Q2 has no first-order drift while Q1 does.
    """
    angles = sorted({abs(float(phi)) for phi in phis if phi != 0.0}, reverse=True)
    if len(angles) < 2:
        raise ValidationError({"phi": f"the fit needs at least two distinct non-zero angles, got {list(phis)}"})
    if not points:
        raise ValidationError({"point": "the fit needs at least one point"})

    samples = []
    for p in points:
        p = tuple(p)
        usable = [phi for phi in angles if in_wedge(Rotation(phi), p) and in_wedge(Rotation(-phi), p)]
        if len(usable) < len(angles):
            dropped = sorted(set(angles) - set(usable))
            logger.warning("Dropping angles %s at %s: outside the positive quadrant", dropped, p)
        if len(usable) < 2:
            continue
        samples.append(_drift_sample(f, alpha, p, usable, q))
    if not samples:
        raise ValidationError({"point": "no point admits two of the requested angles"})

    d1 = np.array([sample["q1"][2] for sample in samples])
    d2 = np.array([sample["q2"][2] for sample in samples])
    scale1 = np.array([DRIFT_TOLERANCE * (1.0 + abs(sample["q1"][0])) for sample in samples])
    scale2 = np.array([DRIFT_TOLERANCE * (1.0 + abs(sample["q2"][0])) for sample in samples])
    logger.debug("Fitted first-order drifts: Q1 %s, Q2 %s", d1, d2)

    if np.all(np.abs(d1) <= scale1):
        logger.warning("Q1 has no first-order drift at any point; the combination constant is degenerate")
        a, degenerate = 0.0, True
    elif np.all(np.abs(d2) <= scale2):
        raise FitError("Q2 has no first-order drift while Q1 does; no combination constant removes it")
    else:
        a, degenerate = float(-np.dot(d1, d2) / np.dot(d2, d2)), False

    ratios = []
    passed = True
    for sample in samples:
        (base1, drifts1, _), (base2, drifts2, _) = sample["q1"], sample["q2"]
        combined = [abs(one + a * two) for one, two in zip(drifts1, drifts2)]
        for ratio in _scan_point_ratios(list(zip(sample["angles"], combined)), base1 + a * base2):
            if ratio is not None:
                ratios.append(ratio)
            passed = passed and _ratio_passes(ratio)
    return FitReport(
        a=a,
        degenerate=degenerate,
        points=tuple(sample["point"] for sample in samples),
        drifts=tuple(zip(d1.tolist(), d2.tolist())),
        ratios=tuple(ratios),
        passed=passed,
    )


def scalar_field_check(f, points, tol=1e-8):
    """Whether L f vanishes at every point, relative to 1 + |grad f|."""
    return all(is_rotation_scalar(f, tuple(p), tol) for p in points)
