"""Quadrature for Abel-type integrals with a weakly singular kernel.

All integrals have the form ``int_0^t h(u) (t - u)**e du`` with ``e > -1``. Substituting
``u = t s`` gives ``t**(e + 1) int_0^1 h(t s) (1 - s)**e ds``, so a reference rule on [0, 1]
depends only on the exponent and the quadrature settings and is built once.
"""

import functools
import logging

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from fracrot.exceptions import EvaluationError, ValidationError

logger = logging.getLogger("fracrot.quadrature")

# Ratio between consecutive panels of the geometric grading toward s = 0.
GRADING_RATIO = 0.15


def _frozen(*arrays):
    for array in arrays:
        array.setflags(write=False)
    return arrays


@functools.lru_cache(maxsize=None)
def jacobi_rule(nodes, exponent, lower=0.0):
    """Gauss-Jacobi nodes and weights on [-1, 1] for the weight (1 - t)**exponent (1 + t)**lower."""
    points, weights = roots_jacobi(nodes, exponent, lower)
    return _frozen(np.asarray(points, dtype=float), np.asarray(weights, dtype=float))


@functools.lru_cache(maxsize=None)
def legendre_rule(nodes):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    points, weights = roots_legendre(nodes)
    return _frozen(np.asarray(points, dtype=float), np.asarray(weights, dtype=float))


@functools.lru_cache(maxsize=None)
def reference_rule(exponent, spec, regular):
    """Nodes and weights on [0, 1] for the weight (1 - s)**exponent.

    Args:
        exponent (float): Kernel exponent, greater than -1.
        spec (QuadratureSpec): Rule sizes.
        regular (bool): The integrand is a polynomial, so one Gauss-Jacobi rule is exact.

    Returns:
        tuple: Read-only ``(nodes, weights)`` arrays.
    """
    if exponent <= -1.0:
        raise ValidationError({"exponent": f"kernel exponent must exceed -1, got {exponent}"})
    points, weights = jacobi_rule(spec.nodes, exponent)
    if regular:
        logger.debug("Gauss-Jacobi rule: %d nodes, exponent %g", spec.nodes, exponent)
        return _frozen(0.5 * (1.0 + points), weights / 2.0 ** (exponent + 1.0))

    # Upper half [1/2, 1]: kernel singularity carried by the Jacobi weight.
    nodes = [0.5 + 0.25 * (1.0 + points)]
    scaled = [weights / 4.0 ** (exponent + 1.0)]
    # Lower half [0, 1/2]: geometric panels toward 0, the last `levels` blocks of `panel_nodes` nodes.
    # The gap below the last level is estimated by abel_integral from the two innermost panels.
    panel_points, panel_weights = legendre_rule(spec.panel_nodes)
    upper = 0.5
    for _ in range(spec.levels):
        lower = upper * GRADING_RATIO
        half_width = 0.5 * (upper - lower)
        local = 0.5 * (upper + lower) + half_width * panel_points
        nodes.append(local)
        scaled.append(half_width * panel_weights * (1.0 - local) ** exponent)
        upper = lower
    logger.debug(
        "Graded rule: %d Jacobi nodes, %d panels of %d nodes, exponent %g",
        spec.nodes,
        spec.levels,
        spec.panel_nodes,
        exponent,
    )
    return _frozen(np.concatenate(nodes), np.concatenate(scaled))


def _graded_tail(weights, values, spec):
    """Estimate of the integral below the innermost graded panel.

    Near 0 an integrand behaving like u**gamma gives panel integrals in the geometric ratio
    GRADING_RATIO**(gamma + 1), so the neglected panels sum to ``last * ratio / (1 - ratio)``.
    """
    if spec.levels < 2:
        return 0.0
    width = spec.panel_nodes
    last = float(np.dot(weights[-width:], values[-width:]))
    previous = float(np.dot(weights[-2 * width : -width], values[-2 * width : -width]))
    if previous == 0.0:
        return 0.0
    ratio = last / previous
    if ratio >= 1.0:
        logger.warning(
            "Integrand grows toward the lower limit (panel ratio %.3g); the integral may not exist", ratio
        )
        return 0.0
    if ratio <= 0.0:
        logger.debug("No tail estimate: innermost panel ratio %g", ratio)
        return 0.0
    return last * ratio / (1.0 - ratio)


def abel_integral(integrand, upper, exponent, spec, regular=True):
    """Return ``int_0^upper integrand(u) (upper - u)**exponent du``.

    Args:
        integrand (callable): Scalar function of u.
        upper (float): Positive upper limit.
        exponent (float): Kernel exponent, greater than -1.
        spec (QuadratureSpec): Rule sizes.
        regular (bool): The integrand is a polynomial in u.

    Returns:
        float: The integral.

    Raises:
        EvaluationError: When the integrand is not finite at a node.
    """
    nodes, weights = reference_rule(float(exponent), spec, bool(regular))
    values = np.array([integrand(upper * s) for s in nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        bad = float(upper * nodes[~np.isfinite(values)][0])
        raise EvaluationError(f"integrand is not finite at u={bad}")
    total = float(np.dot(weights, values))
    if not regular:
        total += _graded_tail(weights, values, spec)
    return upper ** (exponent + 1.0) * total


def power_abel_integral(smooth, upper, power, exponent, spec):
    """Return ``int_0^upper smooth(u) u**power (upper - u)**exponent du``.

    Both endpoint singularities are carried by a two-sided Gauss-Jacobi weight, so the rule is exact
    when ``smooth`` is a polynomial of degree below ``2 * spec.nodes``.

    Raises:
        ValidationError: When ``power`` or ``exponent`` is not greater than -1.
    """
    if power <= -1.0:
        raise ValidationError({"power": f"power at the lower limit must exceed -1, got {power}"})
    if exponent <= -1.0:
        raise ValidationError({"exponent": f"kernel exponent must exceed -1, got {exponent}"})
    points, weights = jacobi_rule(spec.nodes, float(exponent), float(power))
    nodes = 0.5 * (1.0 + points)
    values = np.array([smooth(upper * s) for s in nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"smooth factor is not finite on [0, {upper}]")
    scale = 2.0 ** (power + exponent + 1.0)
    return upper ** (power + exponent + 1.0) * float(np.dot(weights, values)) / scale
