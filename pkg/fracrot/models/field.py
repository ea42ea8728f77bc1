"""Scalar fields, power sums and rotations."""

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, Optional, Tuple

import numpy as np

from fracrot.exceptions import DomainError, EvaluationError, ValidationError
from fracrot.models.orders import Axis

# Exponent pairs closer than this are merged into one term.
EXPONENT_TOLERANCE = 1e-12

_EPSILON = float(np.finfo(float).eps)


def _snap(exponent):
    nearest = round(exponent)
    if abs(exponent - nearest) < EXPONENT_TOLERANCE:
        return float(nearest)
    return float(exponent)


def power(base, exponent, name="coordinate"):
    """Real power with the domain rules of the engine.

    Args:
        base (float): Coordinate value.
        exponent (float): Real exponent.
        name (str): Coordinate name used in error messages.

    Returns:
        float: ``base ** exponent``.

    Raises:
        DomainError: For a non-integer power of a negative coordinate or a non-positive power of zero.
    """
    if exponent == 0.0:
        return 1.0
    if base > 0.0:
        return base**exponent
    if base == 0.0:
        if exponent > 0.0:
            return 0.0
        raise DomainError(f"{name}=0 raised to the non-positive power {exponent}")
    if float(exponent).is_integer():
        return float(base ** int(exponent))
    raise DomainError(f"non-integer power {exponent} of negative {name}={base}")


@dataclass(frozen=True)
class PowerTerm:
    """One term coeff * x**beta * y**lam."""

    coeff: float
    beta: float
    lam: float

    def __post_init__(self):
        for name in ("coeff", "beta", "lam"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError({name: f"must be finite, got {getattr(self, name)}"})

    def exponent(self, axis):
        """Exponent of the coordinate along ``axis``."""
        return self.beta if axis is Axis.X else self.lam

    def evaluate(self, x, y):
        """Value of the term at (x, y)."""
        return self.coeff * power(x, self.beta, "x") * power(y, self.lam, "y")

    def derivative(self, axis, count):
        """Integer-order partial derivative of the term."""
        exponent = self.exponent(axis)
        coeff = self.coeff
        for step in range(count):
            coeff *= exponent - step
        if axis is Axis.X:
            return PowerTerm(coeff, self.beta - count, self.lam)
        return PowerTerm(coeff, self.beta, self.lam - count)


def _normalize(terms):
    merged = []
    for term in terms:
        beta, lam = _snap(term.beta), _snap(term.lam)
        for index, (key_beta, key_lam, coeff) in enumerate(merged):
            if abs(key_beta - beta) < EXPONENT_TOLERANCE and abs(key_lam - lam) < EXPONENT_TOLERANCE:
                merged[index] = (key_beta, key_lam, coeff + term.coeff)
                break
        else:
            merged.append((beta, lam, term.coeff))
    return tuple(
        PowerTerm(coeff, beta, lam) for beta, lam, coeff in sorted(merged, key=lambda item: item[:2]) if coeff != 0.0
    )


@dataclass(frozen=True)
class PowerSum:
    """Finite sum of PowerTerms in canonical form.

    Terms are sorted by exponent pair, merged when their exponents agree to EXPONENT_TOLERANCE, and
    dropped when their coefficient is exactly zero.
    """

    terms: Tuple[PowerTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", _normalize(self.terms))

    @classmethod
    def from_triples(cls, triples):
        """Build from ``(coeff, beta, lam)`` triples."""
        return cls(tuple(PowerTerm(float(c), float(b), float(lam)) for c, b, lam in triples))

    @classmethod
    def monomial(cls, coeff=1.0, beta=0.0, lam=0.0):
        """Single term coeff * x**beta * y**lam."""
        return cls((PowerTerm(float(coeff), float(beta), float(lam)),))

    @classmethod
    def constant(cls, value):
        """The constant field ``value``."""
        return cls.monomial(value)

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        if not isinstance(other, PowerSum):
            return NotImplemented
        return PowerSum(self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        if not isinstance(other, PowerSum):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PowerSum):
            return PowerSum(
                tuple(
                    PowerTerm(a.coeff * b.coeff, a.beta + b.beta, a.lam + b.lam)
                    for a in self.terms
                    for b in other.terms
                )
            )
        if isinstance(other, (int, float)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, factor):
        """Multiply every coefficient by ``factor``."""
        return PowerSum(tuple(PowerTerm(t.coeff * factor, t.beta, t.lam) for t in self.terms))

    def derivative(self, axis, count=1):
        """Integer-order partial derivative along ``axis``."""
        if count == 0:
            return self
        return PowerSum(tuple(term.derivative(axis, count) for term in self.terms))

    def mixed_derivative(self, nx, ny):
        """The partial derivative d^nx/dx^nx d^ny/dy^ny."""
        return self.derivative(Axis.X, nx).derivative(Axis.Y, ny)

    def evaluate(self, x, y):
        """Sum of the terms at (x, y)."""
        return math.fsum(term.evaluate(x, y) for term in self.terms)

    def sup_norm(self):
        """Largest absolute coefficient, 0 for the empty sum."""
        return max((abs(term.coeff) for term in self.terms), default=0.0)

    def is_polynomial(self, axis=None):
        """Whether all exponents (along ``axis`` only, when given) are non-negative integers."""
        for term in self.terms:
            exponents = (term.beta, term.lam) if axis is None else (term.exponent(axis),)
            if any(e < 0 or not e.is_integer() for e in exponents):
                return False
        return True

    def allclose(self, other, tol):
        """Coefficientwise comparison of two sums, missing terms counting as zero."""
        return (self - other).sup_norm() <= tol

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{t.coeff:.12g}*x^{t.beta:g}*y^{t.lam:g}" for t in self.terms)


Evaluator = Callable[[float, float], float]
PartialProvider = Callable[[int, int], Optional[Evaluator]]


def central_difference(evaluator, nx, ny, x, y):
    """Tensor central difference for d^nx/dx^nx d^ny/dy^ny at (x, y).

    The step along each coordinate is max(|coordinate|, 1) * eps**(1/(n+2)) with n = nx + ny.
    """
    order = nx + ny
    exponent = 1.0 / (order + 2)
    hx = max(abs(x), 1.0) * _EPSILON**exponent
    hy = max(abs(y), 1.0) * _EPSILON**exponent
    total = 0.0
    for i in range(nx + 1):
        for j in range(ny + 1):
            weight = (-1.0) ** (i + j) * math.comb(nx, i) * math.comb(ny, j)
            total += weight * evaluator(x + (nx / 2.0 - i) * hx, y + (ny / 2.0 - j) * hy)
    return total / (hx**nx * hy**ny)


@dataclass(frozen=True)
class ScalarField:  # pylint: disable=too-many-instance-attributes
    """Black-box real field on the plane with optional analytic partials.

    Attributes:
        evaluator: Callable ``(x, y) -> float``.
        partials: Optional provider ``(nx, ny) -> evaluator or None`` of analytic partial derivatives.
        boundary_trace_x: Optional ``y -> f(0, y)``.
        boundary_trace_y: Optional ``x -> f(x, 0)``.
        regular_axes: Axes along which the field is a polynomial, so plain Gauss-Jacobi is exact.
        name: Label used in reports.
        source: PowerSum the field was built from, when there is one.
        frame: ``(base, rotation)`` when the field is a pullback of ``base``.
    """

    evaluator: Evaluator
    partials: Optional[PartialProvider] = None
    boundary_trace_x: Optional[Callable[[float], float]] = None
    boundary_trace_y: Optional[Callable[[float], float]] = None
    regular_axes: FrozenSet[Axis] = frozenset()
    name: str = "field"
    source: Optional[PowerSum] = None
    frame: Optional[Tuple["ScalarField", "Rotation"]] = field(default=None, repr=False)

    def value(self, x, y):
        """Evaluate the field, rejecting non-finite values."""
        result = float(self.evaluator(x, y))
        if not math.isfinite(result):
            raise EvaluationError(f"{self.name} is not finite at ({x}, {y})")
        return result

    def is_regular(self, axis):
        """Whether the field is polynomial along ``axis``."""
        return axis in self.regular_axes

    def analytic_partial(self, nx, ny):
        """Analytic evaluator of d^nx/dx^nx d^ny/dy^ny, or None when the field supplies none."""
        if nx == 0 and ny == 0:
            return self.evaluator
        if self.partials is None:
            return None
        return self.partials(nx, ny)

    def partial(self, nx, ny):
        """Evaluator of a partial derivative, analytic when available, central differences otherwise."""
        analytic = self.analytic_partial(nx, ny)
        if analytic is not None:
            return analytic
        return functools.partial(central_difference, self.evaluator, nx, ny)

    def partial_value(self, nx, ny, x, y):
        """Checked value of a partial derivative at (x, y)."""
        result = float(self.partial(nx, ny)(x, y))
        if not math.isfinite(result):
            raise EvaluationError(f"d^{nx}x d^{ny}y of {self.name} is not finite at ({x}, {y})")
        return result

    def trace(self, axis, across, order=0):
        """Value of the ``order``-th derivative along ``axis`` on the line where that coordinate is 0."""
        if order == 0:
            callback = self.boundary_trace_x if axis is Axis.X else self.boundary_trace_y
            if callback is not None:
                return float(callback(across))
            return self.value(*axis.point(0.0, across))
        return self.partial_value(*axis.orders(order), *axis.point(0.0, across))

    def derivative_field(self, nx, ny):
        """The partial derivative d^nx/dx^nx d^ny/dy^ny as a field of its own."""
        if nx == 0 and ny == 0:
            return self
        parent = self

        def provider(a, b):
            return parent.analytic_partial(nx + a, ny + b)

        return ScalarField(
            evaluator=self.partial(nx, ny),
            partials=provider if self.partials is not None else None,
            regular_axes=self.regular_axes,
            name=f"d{nx},{ny}({self.name})",
            source=None if self.source is None else self.source.mixed_derivative(nx, ny),
        )

    def times_coordinate(self, axis):
        """The product of the field with the coordinate along ``axis``."""
        parent = self

        def evaluator(x, y):
            return axis.coordinate((x, y)) * parent.value(x, y)

        def provider(a, b):
            # d^a_x d^b_y (x f) = x d^a_x d^b_y f + a d^(a-1)_x d^b_y f, mirrored for y.
            count = a if axis is Axis.X else b
            main = parent.analytic_partial(a, b)
            lower = None
            if count:
                lower = parent.analytic_partial(*((a - 1, b) if axis is Axis.X else (a, b - 1)))
            if main is None or (count and lower is None):
                return None

            def combined(x, y):
                result = axis.coordinate((x, y)) * main(x, y)
                if count:
                    result += count * lower(x, y)
                return result

            return combined

        monomial = PowerSum.monomial(1.0, 1.0, 0.0) if axis is Axis.X else PowerSum.monomial(1.0, 0.0, 1.0)
        return ScalarField(
            evaluator=evaluator,
            partials=provider if self.partials is not None else None,
            regular_axes=self.regular_axes,
            name=f"{axis.value}*{self.name}",
            source=None if self.source is None else self.source * monomial,
        )


@dataclass(frozen=True)
class Rotation:
    """Passive rotation of the frame by ``phi`` radians.

    A point (x, y) has rotated coordinates (cos phi x + sin phi y, -sin phi x + cos phi y).
    """

    phi: float
    cos: float = field(init=False, repr=False)
    sin: float = field(init=False, repr=False)

    def __post_init__(self):
        if not math.isfinite(self.phi):
            raise ValidationError({"phi": f"angle must be finite, got {self.phi}"})
        object.__setattr__(self, "cos", math.cos(self.phi))
        object.__setattr__(self, "sin", math.sin(self.phi))

    @property
    def matrix(self):
        """The 2x2 matrix acting on column vectors (x, y)."""
        return np.array([[self.cos, self.sin], [-self.sin, self.cos]])

    def apply(self, point):
        """Rotated coordinates of ``point``."""
        x, y = point
        return (self.cos * x + self.sin * y, -self.sin * x + self.cos * y)

    def apply_inverse(self, point):
        """Original coordinates of a point given in the rotated frame."""
        x, y = point
        return (self.cos * x - self.sin * y, self.sin * x + self.cos * y)

    def inverse(self):
        """The rotation by -phi."""
        return Rotation(-self.phi)

    def compose(self, other):
        """The rotation by this angle followed by ``other``."""
        return Rotation(self.phi + other.phi)

    def admits(self, point):
        """Whether ``point`` and its rotated image are both strictly inside the positive quadrant."""
        x, y = point
        if not (x > 0.0 and y > 0.0):
            return False
        rx, ry = self.apply(point)
        return rx > 0.0 and ry > 0.0
