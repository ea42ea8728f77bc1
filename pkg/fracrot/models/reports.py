"""Result records returned by checks, scans and fits."""

import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

# Residuals below this multiple of 1 + |rhs| are treated as exact agreement.
EXACT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LeibnizResult:
    """Truncated fractional Leibniz sum."""

    value: object
    terms: int
    exact: bool
    tail_estimate: float


@dataclass(frozen=True)
class SeriesResult:
    """Truncated exponential series e^{phi L} applied to a PowerSum."""

    value: object
    terms: int
    tail_estimate: float
    converged: bool


@dataclass(frozen=True)
class TransformReport:  # pylint: disable=too-many-instance-attributes
    """Both sides of a transformation law at one point and angle.

    ``richardson_ratio`` is only set when the law was also evaluated at half the angle; it is
    residual(phi) / residual(phi / 2), close to 4 when the residual is quadratic in phi.
    """

    lhs: float
    rhs: float
    phi: float
    law: str = ""
    axis: str = "x"
    alpha: float = math.nan
    point: Tuple[float, float] = (math.nan, math.nan)
    richardson_ratio: Optional[float] = None
    residual: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "residual", abs(self.lhs - self.rhs))

    @property
    def exact(self):
        """Whether the two sides agree to rounding."""
        return self.residual <= EXACT_TOLERANCE * (1.0 + abs(self.rhs))

    def within(self, tol):
        """Whether the residual is at most ``tol`` relative to 1 + |rhs|."""
        return self.residual <= tol * (1.0 + abs(self.rhs))

    def as_dict(self):
        """JSON-ready mapping."""
        data = asdict(self)
        data["point"] = list(self.point)
        return data


@dataclass(frozen=True)
class CommutatorReport:
    """Left and right sides of the two commutator identities with the coordinate and D^1."""

    position: Tuple[float, float]
    derivative: Tuple[float, float]

    def residuals(self):
        """Absolute differences of both identities."""
        return (abs(self.position[0] - self.position[1]), abs(self.derivative[0] - self.derivative[1]))


@dataclass(frozen=True)
class IdentityCheck:
    """One identity verified on one test field."""

    identity: str
    field: str
    phi: float
    residual: float
    passed: bool


@dataclass(frozen=True)
class ScanRow:
    """One evaluated invariant expression."""

    expr_id: str
    alpha: float
    phi: float
    point_x: float
    point_y: float
    value: float
    deviation: float


@dataclass
class ScanReport:
    """Rows of an invariant scan with the skipped points and the measured order in phi."""

    expr_id: str
    rows: List[ScanRow] = field(default_factory=list)
    skipped: List[Tuple[float, float, float]] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)
    passed: bool = True

    @property
    def max_deviation(self):
        """Largest deviation over all rows."""
        return max((row.deviation for row in self.rows), default=0.0)


@dataclass(frozen=True)
class FitReport:
    """Fitted combination constant and the drifts it was fitted on.

    ``drifts`` holds, for each fitted point, the first-order drift coefficients of Q1 and Q2; ``ratios`` are the
    normalized Richardson ratios of the combined quantity after the fit.
    """

    a: float
    degenerate: bool
    points: Tuple[Tuple[float, float], ...]
    drifts: Tuple[Tuple[float, float], ...]
    ratios: Tuple[float, ...]
    passed: bool
