"""Transformation of fractional partial derivatives under frame rotation.

The left side of every law is computed on the pulled-back field along the primed axis, by the same
quadrature routes as any other derivative; the right side is assembled from derivatives in the
original frame. The two sides share no code beyond the quadrature itself.
"""

import logging
import math

from fracrot.exceptions import DomainError, PreconditionError, ValidationError
from fracrot.field import field_from_power_sum, in_wedge, is_rotation_scalar, pullback, require_positive, transport
from fracrot.fracderiv import DEFAULT_QUADRATURE, evaluate, rl_closed_form, rl_operator
from fracrot.models.field import Rotation
from fracrot.models.orders import Axis, DerivKind, DerivSpec
from fracrot.models.reports import EXACT_TOLERANCE, CommutatorReport, TransformReport
from fracrot.specfun import rgamma

logger = logging.getLogger("fracrot.transform")

# Accepted band for residual(phi) / residual(phi / 2) when the residual is quadratic in phi.
RICHARDSON_WINDOW = (3.0, 5.0)

# A ratio above the window still passes when the finer residual is below this multiple of
# phi**2 (1 + |rhs|): the quadratic coefficient vanishes at that point and the residual is cubic.
HIGHER_ORDER_TOLERANCE = 1e-2


def _sign(axis):
    return 1.0 if axis is Axis.X else -1.0


def frac_deriv_rotated_axis(f, rot, axis, order, p_prime, q=DEFAULT_QUADRATURE, kind=DerivKind.RIEMANN_LIOUVILLE):
    """Fractional derivative along a primed axis of the field seen from the rotated frame.

    Args:
        f (ScalarField): Field in the original frame.
        rot (Rotation): Frame rotation.
        axis (Axis): Primed axis.
        order (FracOrder): Positive order.
        p_prime (tuple): Evaluation point in rotated coordinates.
        q (QuadratureSpec): Rule sizes.
        kind (DerivKind): Riemann-Liouville or Caputo.

    Returns:
        float: D^alpha along the primed axis of f(R^-1(x', y')) at ``p_prime``.

    Raises:
        DomainError: When ``p_prime`` or a point of its integration segment is outside the domain.
    """
    require_positive(p_prime, frame="rotated")
    return evaluate(pullback(f, rot), DerivSpec(kind, axis, order), p_prime, q)


def _check_law_inputs(f, order, p, rot, allowed):
    if not allowed(order):
        raise ValidationError({"alpha": f"order {order.alpha} is outside the range of this law"})
    if not is_rotation_scalar(f, p):
        raise PreconditionError(f"{f.name} is not a rotation scalar at {tuple(p)}")
    if not in_wedge(rot, p):
        raise DomainError(f"point {tuple(p)} or its image under a rotation by {rot.phi} leaves the positive quadrant")


def _rl_allowed(order):
    alpha = order.alpha
    if order.is_integer:
        return order.n == 1
    return 0.0 < alpha < 2.0


def _caputo_allowed(order):
    return not order.is_integer and 0.0 < order.alpha < 1.0


def _rl_first_order_rhs(f, axis, order, phi, p, q):
    alpha = order.alpha
    along, across = axis.coordinate(p), axis.other.coordinate(p)
    if order.is_integer:
        # Exact rotated gradient; its first-order part is D1_a + s phi D1_b.
        nx, ny = axis.orders(1)
        mx, my = axis.other.orders(1)
        return math.cos(phi) * f.partial_value(nx, ny, *p) + _sign(axis) * math.sin(phi) * f.partial_value(mx, my, *p)
    base = rl_operator(f, axis, alpha, p, q)
    crossed = f.derivative_field(*axis.other.orders(1))
    lowered = alpha * rl_operator(crossed, axis, alpha - 1.0, p, q)
    boundary = across * f.trace(axis, across, 0) * along ** (-alpha - 1.0) * rgamma(-alpha)
    return base + _sign(axis) * phi * (lowered + boundary)


def _caputo_first_order_rhs(f, axis, order, phi, p, q):
    alpha = order.alpha
    along, across = axis.coordinate(p), axis.other.coordinate(p)
    base = evaluate(f, DerivSpec(DerivKind.CAPUTO, axis, order), p, q)
    crossed = f.derivative_field(*axis.other.orders(1))
    lowered = alpha * rl_operator(crossed, axis, alpha - 1.0, p, q)
    boundary = along ** (1.0 - alpha) * crossed.trace(axis, across, 0) * rgamma(1.0 - alpha)
    return base + _sign(axis) * phi * (lowered + boundary)


def _law_report(law, kind, rhs_builder, allowed, f, axis, order, phi, p, q):  # pylint: disable=too-many-arguments
    rot = Rotation(phi)
    _check_law_inputs(f, order, p, rot, allowed)
    lhs = frac_deriv_rotated_axis(f, rot, axis, order, rot.apply(p), q, kind)
    rhs = rhs_builder(f, axis, order, phi, p, q)
    return TransformReport(lhs, rhs, phi, law=law, axis=axis.value, alpha=order.alpha, point=tuple(p))


def richardson_ratio(coarse, fine):
    """residual(phi) / residual(phi / 2), or None when the finer residual is at rounding level."""
    if fine.exact:
        return None
    return coarse.residual / fine.residual


def _with_richardson(report, half):
    return TransformReport(
        report.lhs,
        report.rhs,
        report.phi,
        law=report.law,
        axis=report.axis,
        alpha=report.alpha,
        point=report.point,
        richardson_ratio=richardson_ratio(report, half),
    )


def infinitesimal_rl(f, axis, order, phi, p, q=DEFAULT_QUADRATURE, richardson=False):
    """First-order transformation law of the Riemann-Liouville derivative of a rotation scalar.

    The right side is D^a Psi + s phi (a D^(a-1) D1_b Psi + o Psi|_(a=0) t^(-a-1) / Gamma(-a)) at ``p``,
    with s = +1 on the x-axis and -1 on the y-axis, t the coordinate along the axis and o the one
    across it. At order 1 the exact rotated gradient is used instead.

    Args:
        f (ScalarField): Rotation-scalar field.
        axis (Axis): Axis of differentiation.
        order (FracOrder): Order in (0, 1), (1, 2), or exactly 1.
        phi (float): Rotation angle.
        p (tuple): Point in the original frame.
        q (QuadratureSpec): Rule sizes.
        richardson (bool): Also evaluate at phi / 2 and report the residual ratio.

    Returns:
        TransformReport: Both sides at ``phi``.

    Raises:
        ValidationError: For an order outside the law's range.
        PreconditionError: When ``f`` is not a rotation scalar at ``p``.
        DomainError: When ``p`` or its rotated image leaves the positive quadrant.
    """
    report = _law_report("rl", DerivKind.RIEMANN_LIOUVILLE, _rl_first_order_rhs, _rl_allowed, f, axis, order, phi, p, q)
    if richardson:
        half = infinitesimal_rl(f, axis, order, phi / 2.0, p, q)
        report = _with_richardson(report, half)
    logger.debug("RL law on %s along %s at %s, phi=%g: residual %.3g", f.name, axis.value, p, phi, report.residual)
    return report


def infinitesimal_caputo(f, axis, order, phi, p, q=DEFAULT_QUADRATURE, richardson=False):
    """First-order transformation law of the Caputo derivative of a rotation scalar.

    The right side is ^C D^a Psi + s phi (a D^(a-1) D1_b Psi + t^(1-a) D1_b Psi|_(a=0) / Gamma(1-a)).
    """
    report = _law_report(
        "caputo", DerivKind.CAPUTO, _caputo_first_order_rhs, _caputo_allowed, f, axis, order, phi, p, q
    )
    if richardson:
        half = infinitesimal_caputo(f, axis, order, phi / 2.0, p, q)
        report = _with_richardson(report, half)
    logger.debug("Caputo law on %s along %s at %s, phi=%g: residual %.3g", f.name, axis.value, p, phi, report.residual)
    return report


def higher_order_agreement(ratio, fine_residual, fine_phi, rhs):
    """Whether a ratio above the window comes from a residual of order phi**3 or higher."""
    return ratio > RICHARDSON_WINDOW[1] and fine_residual <= HIGHER_ORDER_TOLERANCE * fine_phi**2 * (1.0 + abs(rhs))


def ratio_in_window(report):
    """Whether a law report certifies first-order agreement.

    Passes when both levels are exact, when the ratio is near 4, or when the ratio is larger and the
    residual at phi / 2 is small against phi**2, where the law agrees to higher order.
    """
    ratio = report.richardson_ratio
    if ratio is None:
        return report.within(4.0 * EXACT_TOLERANCE)
    low, high = RICHARDSON_WINDOW
    if low <= ratio <= high:
        return True
    return ratio > high and higher_order_agreement(ratio, report.residual / ratio, report.phi / 2.0, report.rhs)


def commutator_x_with_frac(f, order, p, q=DEFAULT_QUADRATURE, axis=Axis.X):
    """Both sides of the commutators of D^alpha with the coordinate and with D1 along ``axis``.

    With h = D1_b Psi, t the coordinate along ``axis`` and o the one across:

    - position: t D^a h - D^a (t h) against -a D^(a-1) h;
    - derivative: D1 D^a (o Psi) - D^a D1 (o Psi) against o Psi|_(t=0) t^(-a-1) / Gamma(-a).

    Returns:
        CommutatorReport: ``(left, right)`` for each identity.
    """
    if order.is_integer or not 0.0 < order.alpha < 1.0:
        raise ValidationError({"alpha": f"expected a non-integer order in (0, 1), got {order.alpha}"})
    alpha = order.alpha
    along, across = axis.coordinate(p), axis.other.coordinate(p)

    crossed = f.derivative_field(*axis.other.orders(1))
    shifted = crossed.times_coordinate(axis)
    left = along * rl_operator(crossed, axis, alpha, p, q) - rl_operator(shifted, axis, alpha, p, q)
    right = -alpha * rl_operator(crossed, axis, alpha - 1.0, p, q)

    weighted = f.times_coordinate(axis.other)
    # D1 after D^alpha is D^(alpha + 1).
    raised = rl_operator(weighted, axis, alpha + 1.0, p, q)
    lowered = rl_operator(weighted.derivative_field(*axis.orders(1)), axis, alpha, p, q)
    boundary = across * f.trace(axis, across, 0) * along ** (-alpha - 1.0) * rgamma(-alpha)
    return CommutatorReport(position=(left, right), derivative=(raised - lowered, boundary))


def laplacian(f, p):
    """Classical Laplacian at ``p``."""
    return f.partial_value(2, 0, *p) + f.partial_value(0, 2, *p)


def laplacian_invariance(f, phi, p):
    """Laplacian of the pulled-back field at the rotated point against the Laplacian at ``p``."""
    rot = Rotation(phi)
    lhs = laplacian(pullback(f, rot), rot.apply(p))
    return TransformReport(lhs, laplacian(f, p), phi, law="laplacian", alpha=2.0, point=tuple(p))


def conjugation_check(ps, rot, axis, order, p, q=DEFAULT_QUADRATURE):
    """Finite-angle conjugation law on a PowerSum.

    The left side differentiates the transported field e^{phi L} ps along the primed axis by quadrature;
    the right side is the power-rule derivative of ps at the rotated point.

    Returns:
        TransformReport: Both sides, ``point`` being the original-frame point.
    """
    rotated = rot.apply(p)
    source = field_from_power_sum(ps, name="ps")
    lhs = frac_deriv_rotated_axis(transport(source, rot), rot, axis, order, rotated, q)
    rhs = rl_closed_form(ps, axis, order).evaluate(*rotated)
    return TransformReport(lhs, rhs, rot.phi, law="conjugation", axis=axis.value, alpha=order.alpha, point=tuple(p))


__all__ = [
    "commutator_x_with_frac",
    "conjugation_check",
    "frac_deriv_rotated_axis",
    "infinitesimal_caputo",
    "infinitesimal_rl",
    "laplacian_invariance",
]
