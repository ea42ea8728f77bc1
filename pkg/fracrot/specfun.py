"""Gamma function helpers with explicit pole handling.

Every closed-form fractional coefficient goes through this module. Poles are detected on the
argument itself so that near-integers coming from user input are treated as the integers they
are meant to be.
"""

import math
from dataclasses import dataclass
from typing import Optional

from scipy import special

from fracrot.exceptions import DomainError, RangeError

POLE_TOLERANCE = 1e-12

# Largest argument for which Gamma is finite in double precision.
GAMMA_OVERFLOW = 171.6243769563027

# Both arguments above this go through log-Gamma differences.
LOG_RATIO_THRESHOLD = 20.0


def is_pole(z):
    """Return True when ``z`` is a non-positive integer, up to POLE_TOLERANCE."""
    nearest = round(z)
    return nearest <= 0 and abs(z - nearest) < POLE_TOLERANCE


@dataclass(frozen=True)
class GammaValue:
    """Value of Gamma at ``argument``; ``value`` is None at a pole."""

    argument: float
    value: Optional[float]

    @property
    def is_pole(self):
        """Whether the argument is a pole of Gamma."""
        return self.value is None

    def __float__(self):
        if self.value is None:
            raise DomainError(f"Gamma has a pole at {self.argument}")
        return self.value


def _finite(z):
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"Gamma argument must be finite, got {z}")
    return z


def gamma(z):
    """Evaluate Gamma at a real argument.

    Args:
        z (float): Finite real argument.

    Returns:
        GammaValue: The value, or a pole marker at 0, -1, -2, ...

    Raises:
        RangeError: When Gamma(z) overflows a double.
    """
    z = _finite(z)
    if is_pole(z):
        return GammaValue(z, None)
    if z > GAMMA_OVERFLOW:
        raise RangeError(f"Gamma({z}) overflows a double")
    value = float(special.gamma(z))
    if not math.isfinite(value):
        raise RangeError(f"Gamma({z}) is not representable")
    return GammaValue(z, value)


def rgamma(z):
    """Reciprocal Gamma, exactly 0 at the poles."""
    z = _finite(z)
    if is_pole(z):
        return 0.0
    return float(special.rgamma(z))


def gamma_ratio(p, q):
    """Return Gamma(p) / Gamma(q).

    The ratio is exactly 0 when ``q`` is a pole, which is how integer-order derivatives of
    lower-degree monomials vanish through the power rule.

    Args:
        p (float): Numerator argument, not a pole.
        q (float): Denominator argument.

    Returns:
        float: The ratio.

    Raises:
        DomainError: When ``p`` is a pole.
    """
    p = _finite(p)
    q = _finite(q)
    if is_pole(p):
        raise DomainError(f"Gamma ratio numerator {p} is a pole")
    if is_pole(q):
        return 0.0
    if p > LOG_RATIO_THRESHOLD and q > LOG_RATIO_THRESHOLD:
        return math.exp(float(special.gammaln(p)) - float(special.gammaln(q)))
    return gamma(p).value * rgamma(q)


def binomial(alpha, k):
    """Generalized binomial coefficient Gamma(alpha+1) / (Gamma(k+1) Gamma(alpha-k+1))."""
    return gamma_ratio(alpha + 1.0, alpha - k + 1.0) / math.factorial(k)
