"""Field construction, coordinate rotation and the domain wedge."""

import csv
import functools
import io
import logging
import math

from fracrot.exceptions import DomainError, ValidationError
from fracrot.models.field import PowerSum, Rotation, ScalarField
from fracrot.models.orders import Axis

logger = logging.getLogger("fracrot.field")


def rotate_point(rot, p):
    """Coordinates of ``p`` in the frame rotated by ``rot`` (passive convention)."""
    return rot.apply(p)


def in_wedge(rot, p):
    """Whether ``p`` and its rotated image both lie strictly inside the positive quadrant.

    For 0 < phi < pi/2 this is x > 0, y > 0 and y/x > tan(phi); the same rotated-positivity test is
    used for every other angle.
    """
    return rot.admits(p)


def eval_power_sum(ps, p):
    """Evaluate a PowerSum at a point.

    Raises:
        DomainError: For a non-integer power of a negative coordinate or a non-positive power of zero.
    """
    return ps.evaluate(*p)


@functools.lru_cache(maxsize=1024)
def _derived_sum(ps, nx, ny):
    return ps.mixed_derivative(nx, ny)


def field_from_power_sum(ps, name="field"):
    """Wrap a PowerSum as a ScalarField with exact partials and boundary traces."""

    def provider(nx, ny):
        return _derived_sum(ps, nx, ny).evaluate

    return ScalarField(
        evaluator=ps.evaluate,
        partials=provider,
        boundary_trace_x=lambda y: ps.evaluate(0.0, y),
        boundary_trace_y=lambda x: ps.evaluate(x, 0.0),
        regular_axes=frozenset(axis for axis in Axis if ps.is_polynomial(axis)),
        name=name,
        source=ps,
    )


def _chain_coefficients(rot, a, b):
    """Expand (c dx + s dy)^a (-s dx + c dy)^b into {(i, j): coefficient of dx^i dy^j}."""
    expansion = {(0, 0): 1.0}
    steps = [(rot.cos, rot.sin)] * a + [(-rot.sin, rot.cos)] * b
    for along_x, along_y in steps:
        grown = {}
        for (i, j), coeff in expansion.items():
            for key, factor in (((i + 1, j), along_x), ((i, j + 1), along_y)):
                if factor != 0.0:
                    grown[key] = grown.get(key, 0.0) + coeff * factor
        expansion = grown
    return expansion


def pullback(f, rot):
    """The field seen from the rotated frame.

    The returned field g satisfies g(x', y') = f(x, y) where (x, y) is the inverse rotation of
    (x', y'). Analytic partials are carried over by the chain rule, and pullbacks of pullbacks compose
    by adding their angles.

    Args:
        f (ScalarField): Field in the original frame.
        rot (Rotation): Frame rotation.

    Returns:
        ScalarField: The pulled-back field; evaluating it outside the domain of ``f`` raises DomainError.
    """
    if f.frame is not None:
        base, inner = f.frame
        return pullback(base, inner.compose(rot))
    if rot.phi == 0.0:
        return f

    def evaluator(x, y):
        return f.value(*rot.apply_inverse((x, y)))

    def provider(a, b):
        expansion = _chain_coefficients(rot, a, b)
        partials = {key: f.analytic_partial(*key) for key in expansion}
        if any(partial is None for partial in partials.values()):
            return None

        def combined(x, y):
            origin = rot.apply_inverse((x, y))
            return math.fsum(coeff * partials[key](*origin) for key, coeff in expansion.items())

        return combined

    polynomial = all(f.is_regular(axis) for axis in Axis)
    return ScalarField(
        evaluator=evaluator,
        partials=provider if f.partials is not None else None,
        regular_axes=frozenset(Axis) if polynomial else frozenset(),
        name=f"{f.name}@{rot.phi:g}",
        frame=(f, rot),
    )


def transport(f, rot):
    """The actively rotated field e^{phi L} f, i.e. (x, y) -> f(rotated coordinates of (x, y))."""
    return pullback(f, rot.inverse())


def generator_residual(f, p):
    """Return (L f at p, |grad f| at p) with L = y d/dx - x d/dy."""
    x, y = p
    fx = f.partial_value(1, 0, x, y)
    fy = f.partial_value(0, 1, x, y)
    return y * fx - x * fy, math.hypot(fx, fy)


def is_rotation_scalar(f, p, tol=1e-8):
    """Whether L f vanishes at ``p`` relative to the gradient size."""
    residual, gradient = generator_residual(f, p)
    return abs(residual) <= tol * (1.0 + gradient)


def require_positive(p, frame="original"):
    """Reject points outside the open positive quadrant."""
    x, y = p
    if not (x > 0.0 and y > 0.0):
        raise DomainError(f"point ({x}, {y}) of the {frame} frame is outside the positive quadrant")


def parse_power_sum(text, strict=True):
    """Read a PowerSum from ``coeff,beta,lam`` CSV rows.

    Args:
        text (str): CSV text; blank lines and lines starting with ``#`` are skipped.
        strict (bool): Require every exponent to be greater than -1.

    Returns:
        PowerSum: The parsed sum.

    Raises:
        ValidationError: On malformed rows or out-of-range exponents.
    """
    triples = []
    lines = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    for number, row in enumerate(csv.reader(lines), start=1):
        if len(row) != 3:
            raise ValidationError({"field": f"row {number} must hold coeff,beta,lam, got {row}"})
        try:
            coeff, beta, lam = (float(value) for value in row)
        except ValueError as exc:
            raise ValidationError({"field": f"row {number} is not numeric: {row}"}) from exc
        if strict and (beta <= -1.0 or lam <= -1.0):
            raise ValidationError({"field": f"row {number} has an exponent not greater than -1: {row}"})
        triples.append((coeff, beta, lam))
    logger.debug("Parsed %d power terms", len(triples))
    return PowerSum.from_triples(triples)


def format_power_sum(ps):
    """Write a PowerSum as ``coeff,beta,lam`` CSV rows."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for term in ps:
        writer.writerow([repr(term.coeff), repr(term.beta), repr(term.lam)])
    return buffer.getvalue()


__all__ = [
    "PowerSum",
    "Rotation",
    "ScalarField",
    "eval_power_sum",
    "field_from_power_sum",
    "format_power_sum",
    "generator_residual",
    "in_wedge",
    "is_rotation_scalar",
    "parse_power_sum",
    "pullback",
    "require_positive",
    "rotate_point",
    "transport",
]
