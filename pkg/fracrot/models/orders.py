"""Orders, axes and quadrature settings."""

import math
from dataclasses import dataclass
from enum import Enum

from fracrot.exceptions import ValidationError

# Orders this close to an integer are differentiated classically.
INTEGER_TOLERANCE = 1e-12


class Axis(str, Enum):
    """Coordinate axis of a partial derivative."""

    X = "x"
    Y = "y"

    @property
    def other(self):
        """The perpendicular axis."""
        return Axis.Y if self is Axis.X else Axis.X

    def coordinate(self, point):
        """Coordinate of ``point`` along this axis."""
        return point[0] if self is Axis.X else point[1]

    def point(self, along, across):
        """Build a point from its coordinate along this axis and the one across it."""
        return (along, across) if self is Axis.X else (across, along)

    def orders(self, count):
        """Partial-derivative multi-index ``(nx, ny)`` of ``count`` derivatives along this axis."""
        return (count, 0) if self is Axis.X else (0, count)


class DerivKind(str, Enum):
    """Fractional operator family."""

    RIEMANN_LIOUVILLE = "rl"
    CAPUTO = "caputo"
    INTEGRAL = "integral"


@dataclass(frozen=True)
class FracOrder:
    """Real order alpha of a fractional derivative (alpha > 0) or integral (alpha < 0)."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValidationError({"alpha": f"order must be finite, got {self.alpha}"})

    @property
    def is_integer(self):
        """Whether the order is routed to classical differentiation or the identity."""
        return abs(self.alpha - round(self.alpha)) < INTEGER_TOLERANCE

    @property
    def n(self):
        """Smallest integer with n - 1 < alpha <= n; 0 for integrals."""
        if self.alpha <= 0:
            return 0
        if self.is_integer:
            return int(round(self.alpha))
        return math.ceil(self.alpha)

    def shifted(self, delta):
        """The order alpha + delta."""
        return FracOrder(self.alpha + delta)


@dataclass(frozen=True)
class DerivSpec:
    """Which operator to apply: family, axis and order."""

    kind: DerivKind
    axis: Axis
    order: FracOrder

    def __post_init__(self):
        if self.kind is DerivKind.INTEGRAL and self.order.alpha >= 0:
            raise ValidationError({"order": f"a fractional integral needs a negative order, got {self.order.alpha}"})
        if self.kind is not DerivKind.INTEGRAL and self.order.alpha <= 0:
            raise ValidationError({"order": f"a derivative needs a positive order, got {self.order.alpha}"})


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Jacobi rule size and the grading used for fields that are not polynomial along the axis."""

    nodes: int = 64
    levels: int = 16
    panel_nodes: int = 16

    def __post_init__(self):
        if self.nodes < 4:
            raise ValidationError({"nodes": f"at least 4 quadrature nodes are required, got {self.nodes}"})
        if self.levels < 1:
            raise ValidationError({"levels": f"at least one grading level is required, got {self.levels}"})
        if self.panel_nodes < 2:
            raise ValidationError({"panel_nodes": f"at least 2 nodes per panel are required, got {self.panel_nodes}"})
