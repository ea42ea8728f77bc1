"""Riemann-Liouville and Caputo partial fractional derivatives and integrals.

Lower limits are 0 on both axes. Black-box fields are handled by quadrature: Caputo derivatives
integrate the n-th integer partial against the weakly singular kernel, and Riemann-Liouville
derivatives are the Caputo value plus the boundary terms of the bridge relation, so the singular
integral is never differentiated numerically. PowerSums are handled in closed form by the power rule.
"""

import logging
import math

from fracrot.exceptions import DomainError, ValidationError
from fracrot.models.field import PowerSum, PowerTerm, ScalarField, power
from fracrot.models.orders import Axis, DerivKind, DerivSpec, FracOrder, QuadratureSpec
from fracrot.models.reports import LeibnizResult
from fracrot.quadrature import abel_integral, power_abel_integral
from fracrot.specfun import binomial, gamma_ratio, rgamma

logger = logging.getLogger("fracrot.fracderiv")

DEFAULT_QUADRATURE = QuadratureSpec()

# Default truncation of the Leibniz series for non-polynomial factors.
LEIBNIZ_TERMS = 40


def _segment_integral(evaluator, regular, axis, p, exponent, q):
    """Integrate an evaluator along the axis segment ending at p against (t - u)**exponent."""
    along, across = axis.coordinate(p), axis.other.coordinate(p)

    def integrand(u):
        point = axis.point(u, across)
        try:
            return evaluator(*point)
        except DomainError as exc:
            raise DomainError(f"segment point {point} toward {tuple(p)} is outside the domain: {exc}") from exc

    return abel_integral(integrand, along, exponent, q, regular=regular)


def _require_segment(axis, p):
    along = axis.coordinate(p)
    if not along > 0.0:
        raise DomainError(f"point {tuple(p)} has no integration segment along {axis.value}: coordinate {along} <= 0")


def _require_fractional(order, low, high, name="order"):
    if order.is_integer or not low < order.alpha < high:
        raise ValidationError({name: f"expected a non-integer order in ({low}, {high}), got {order.alpha}"})


def _unit(_u):
    return 1.0


def _power_terms(f, axis, p):
    """Pairs (weight, beta) with f = sum weight * u**beta on the segment along ``axis`` ending at p."""
    other = axis.other
    across = other.coordinate(p)
    return [(term.coeff * power(across, term.exponent(other), other.value), term.exponent(axis)) for term in f.source]


def _integral_of_power(weight, beta, along, nu, q):
    """(1 / Gamma(nu)) int_0^t weight u**beta (t - u)**(nu - 1) du."""
    if beta <= -1.0:
        raise DomainError(f"u^{beta} is not integrable at the lower limit")
    return weight * rgamma(nu) * power_abel_integral(_unit, along, beta, nu - 1.0, q)


def _caputo_of_power(weight, beta, along, order, q):
    """Caputo derivative of weight * u**beta at t = ``along``."""
    n = order.n
    if beta.is_integer() and 0.0 <= beta < n:
        return 0.0
    if beta - n <= -1.0:
        raise DomainError(
            f"Caputo derivative of order {order.alpha} of u^{beta} does not exist: "
            f"its {n}-th derivative is not integrable at 0"
        )
    falling = math.prod(beta - j for j in range(n))
    return falling * _integral_of_power(weight, beta - n, along, n - order.alpha, q)


def _rl_of_power(weight, beta, along, order, q):
    """Riemann-Liouville derivative of weight * u**beta at t = ``along``.

    Exponents above n - 1, and integers, go through the Caputo value and the boundary terms. Below n - 1
    the boundary traces are infinite, so the integral of order n - alpha is taken by quadrature and the
    resulting power t**(beta + n - alpha) is differentiated n times exactly.
    """
    n = order.n
    if beta > n - 1 or (beta.is_integer() and beta >= 0.0):
        value = _caputo_of_power(weight, beta, along, order, q)
        if beta.is_integer() and beta < n:
            k = int(beta)
            value += weight * math.factorial(k) * along ** (k - order.alpha) * rgamma(k + 1.0 - order.alpha)
        return value
    raised = beta + n - order.alpha
    falling = math.prod(raised - j for j in range(n))
    return falling * _integral_of_power(weight, beta, along, n - order.alpha, q) / along**n


def rl_fractional_integral(f, spec, p, q=DEFAULT_QUADRATURE):
    """Riemann-Liouville fractional integral of order -alpha > 0 along an axis.

    Args:
        f (ScalarField): Integrand field.
        spec (DerivSpec): Integral spec with a negative order.
        p (tuple): Evaluation point, strictly inside the positive quadrant.
        q (QuadratureSpec): Rule sizes.

    Returns:
        float: (1 / Gamma(-alpha)) int_0^t f(u) (t - u)**(-1 - alpha) du along the axis.
    """
    if spec.kind is not DerivKind.INTEGRAL:
        raise ValidationError({"kind": f"expected an integral spec, got {spec.kind.value}"})
    _require_segment(spec.axis, p)
    nu = -spec.order.alpha
    if f.source is not None:
        along = spec.axis.coordinate(p)
        return math.fsum(_integral_of_power(w, beta, along, nu, q) for w, beta in _power_terms(f, spec.axis, p))
    return rgamma(nu) * _segment_integral(f.value, f.is_regular(spec.axis), spec.axis, p, nu - 1.0, q)


def caputo_quadrature(f, axis, order, p, q=DEFAULT_QUADRATURE):
    """Caputo partial fractional derivative by quadrature of the n-th integer partial.

    Args:
        f (ScalarField): Field with (analytic or finite-difference) n-th partial along ``axis``.
        axis (Axis): Differentiation axis.
        order (FracOrder): Non-integer positive order.
        p (tuple): Evaluation point.
        q (QuadratureSpec): Rule sizes.

    Returns:
        float: (1 / Gamma(n - alpha)) int_0^t D^n f(u) (t - u)**(n - alpha - 1) du.
    """
    if order.is_integer or order.alpha <= 0:
        raise ValidationError({"order": f"Caputo quadrature needs a positive non-integer order, got {order.alpha}"})
    _require_segment(axis, p)
    if f.source is not None:
        along = axis.coordinate(p)
        return math.fsum(_caputo_of_power(w, beta, along, order, q) for w, beta in _power_terms(f, axis, p))
    n = order.n
    nx, ny = axis.orders(n)
    exponent = n - order.alpha - 1.0

    def derivative(x, y):
        return f.partial_value(nx, ny, x, y)

    return rgamma(n - order.alpha) * _segment_integral(derivative, f.is_regular(axis), axis, p, exponent, q)


def bridge_terms(f, axis, order, p):
    """Boundary terms sum_k t**(k - alpha) / Gamma(k + 1 - alpha) D^k f(0) turning Caputo into RL."""
    along, across = axis.coordinate(p), axis.other.coordinate(p)
    total = 0.0
    for k in range(order.n):
        total += along ** (k - order.alpha) * rgamma(k + 1.0 - order.alpha) * f.trace(axis, across, k)
    return total


def rl_via_bridge(f, axis, order, p, q=DEFAULT_QUADRATURE):
    """Riemann-Liouville derivative: Caputo value plus boundary terms.

    A black-box field needs finite traces D^k f(0) for k < n; for exponents below n - 1 along the axis
    they are infinite and a DomainError is raised. Fields built from a PowerSum are taken term by term,
    which covers every exponent above -1.
    """
    if f.source is not None:
        _require_segment(axis, p)
        along = axis.coordinate(p)
        return math.fsum(_rl_of_power(w, beta, along, order, q) for w, beta in _power_terms(f, axis, p))
    return caputo_quadrature(f, axis, order, p, q) + bridge_terms(f, axis, order, p)


def classical_derivative(f, axis, count, p):
    """Integer-order partial derivative along ``axis`` at ``p``."""
    return f.partial_value(*axis.orders(count), *p)


def evaluate(f, spec, p, q=DEFAULT_QUADRATURE):
    """Apply the operator described by ``spec`` to ``f`` at ``p``.

    Integer orders are routed to classical derivatives (or repeated integrals, which the quadrature
    handles exactly).
    """
    if spec.kind is DerivKind.INTEGRAL:
        return rl_fractional_integral(f, spec, p, q)
    if spec.order.is_integer:
        return classical_derivative(f, spec.axis, spec.order.n, p)
    if spec.kind is DerivKind.CAPUTO:
        return caputo_quadrature(f, spec.axis, spec.order, p, q)
    return rl_via_bridge(f, spec.axis, spec.order, p, q)


def rl_operator(f, axis, alpha, p, q=DEFAULT_QUADRATURE):
    """Riemann-Liouville operator of any real order: integral, identity, classical or fractional."""
    order = FracOrder(alpha)
    if order.is_integer and round(alpha) == 0:
        return f.value(*p)
    if alpha < 0:
        return rl_fractional_integral(f, DerivSpec(DerivKind.INTEGRAL, axis, order), p, q)
    return evaluate(f, DerivSpec(DerivKind.RIEMANN_LIOUVILLE, axis, order), p, q)


def frac_field(f, axis, alpha, q=DEFAULT_QUADRATURE, kind=DerivKind.RIEMANN_LIOUVILLE):
    """The fractional derivative of ``f`` along ``axis`` as a ScalarField.

    Partials across the axis commute with the operator and are evaluated analytically when ``f`` has
    them; partials along the axis fall back to finite differences.
    """
    other = axis.other

    def apply(g, x, y):
        if kind is DerivKind.CAPUTO and not FracOrder(alpha).is_integer:
            return caputo_quadrature(g, axis, FracOrder(alpha), (x, y), q)
        return rl_operator(g, axis, alpha, (x, y), q)

    def evaluator(x, y):
        return apply(f, x, y)

    def provider(a, b):
        if axis.coordinate((a, b)) != 0:
            return None
        derived = f.derivative_field(a, b)
        return lambda x, y: apply(derived, x, y)

    return ScalarField(
        evaluator=evaluator,
        partials=provider,
        regular_axes=frozenset({other}) if f.is_regular(other) else frozenset(),
        name=f"D{alpha:g}{axis.value}({f.name})",
    )


def rl_closed_form(ps, axis, order):
    """Power-rule fractional derivative (or integral) of a PowerSum along ``axis``.

    Each term c x**beta y**lam maps to c Gamma(beta + 1) / Gamma(beta - alpha + 1) x**(beta - alpha) y**lam
    (mirrored for y). Output exponents may drop to -1 or below.

    Raises:
        ValidationError: When an exponent along the axis is not greater than -1.
    """
    alpha = order.alpha
    terms = []
    for term in ps:
        exponent = term.exponent(axis)
        if exponent <= -1.0:
            raise ValidationError({"field": f"exponent {exponent} along {axis.value} must exceed -1"})
        coeff = term.coeff * gamma_ratio(exponent + 1.0, exponent - alpha + 1.0)
        if axis is Axis.X:
            terms.append(PowerTerm(coeff, term.beta - alpha, term.lam))
        else:
            terms.append(PowerTerm(coeff, term.beta, term.lam - alpha))
    return PowerSum(tuple(terms))


def leibniz_series(f, g, axis, order, K=LEIBNIZ_TERMS):  # pylint: disable=invalid-name
    """Fractional Leibniz rule D^alpha (f g) = sum_k binom(alpha, k) D^(alpha - k) f D^k g.

    Args:
        f (PowerSum): Factor differentiated fractionally.
        g (PowerSum): Factor differentiated by integer orders.
        axis (Axis): Differentiation axis.
        order (FracOrder): Order alpha.
        K (int): Largest k included.

    Returns:
        LeibnizResult: The truncated sum, the number of terms used, whether the series terminated
        exactly and the size of the last included term otherwise.
    """
    if K < 0:
        raise ValidationError({"K": f"truncation must be non-negative, got {K}"})
    total = PowerSum()
    last = PowerSum()
    used = 0
    for k in range(K + 1):
        derivative = g.derivative(axis, k)
        if not derivative:
            logger.debug("Leibniz series terminated exactly after %d terms", used)
            return LeibnizResult(total, used, True, 0.0)
        coefficient = binomial(order.alpha, k)
        last = (rl_closed_form(f, axis, order.shifted(-k)) * derivative).scale(coefficient)
        total = total + last
        used += 1
    tail = last.sup_norm()
    if tail > 0.0:
        logger.warning("Leibniz series cut at K=%d with last term of size %.3g", K, tail)
    return LeibnizResult(total, used, False, tail)


def rl_of_first_derivative(f, axis, order, p, q=DEFAULT_QUADRATURE):
    """D^alpha applied to D^1 f along ``axis``, as D^(alpha+1) f - t**(-alpha-1) f(0) / Gamma(-alpha)."""
    _require_fractional(order, 0.0, 1.0)
    along, across = axis.coordinate(p), axis.other.coordinate(p)
    raised = rl_via_bridge(f, axis, order.shifted(1.0), p, q)
    return raised - along ** (-order.alpha - 1.0) * f.trace(axis, across, 0) * rgamma(-order.alpha)


def commutes_check(ps, alpha_x, alpha_y, rel_tol=1e-13):
    """Whether D^alpha_x_x D^alpha_y_y and D^alpha_y_y D^alpha_x_x agree on ``ps`` coefficientwise."""
    x_first = rl_closed_form(rl_closed_form(ps, Axis.X, FracOrder(alpha_x)), Axis.Y, FracOrder(alpha_y))
    y_first = rl_closed_form(rl_closed_form(ps, Axis.Y, FracOrder(alpha_y)), Axis.X, FracOrder(alpha_x))
    scale = max(x_first.sup_norm(), y_first.sup_norm(), 1.0)
    return len(x_first) == len(y_first) and x_first.allclose(y_first, rel_tol * scale) and math.isfinite(scale)
