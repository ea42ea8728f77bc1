"""The SO(2) generator L = y d/dx - x d/dy acting on PowerSums.

L and its exponential act symbolically on PowerSums. Exact rotation by substitution is only
available for polynomials; everything else is rotated at evaluation time by ``field.pullback``.
"""

import logging
import math
from collections import OrderedDict

from fracrot.exceptions import UnsupportedError, ValidationError
from fracrot.models.field import PowerSum, PowerTerm
from fracrot.models.reports import IdentityCheck, SeriesResult

logger = logging.getLogger("fracrot.rotation")

SERIES_MAX_TERMS = 60
SERIES_TOLERANCE = 1e-14

# Orders at which the generator Leibniz rule is expanded directly.
LEIBNIZ_MAX_ORDER = 4

TEST_FIELDS = OrderedDict()
TEST_FIELDS["x3y"] = PowerSum.monomial(1.0, 3.0, 1.0)
TEST_FIELDS["r2"] = PowerSum.from_triples([(1.0, 2.0, 0.0), (1.0, 0.0, 2.0)])
TEST_FIELDS["r4"] = PowerSum.from_triples([(1.0, 4.0, 0.0), (2.0, 2.0, 2.0), (1.0, 0.0, 4.0)])
TEST_FIELDS["quartic"] = PowerSum.from_triples([(1.0, 4.0, 0.0), (-3.0, 2.0, 1.0), (1.0, 0.0, 5.0)])

# Commutators hold for any smooth field; L' = L is only checked on polynomials.
FRACTIONAL_TEST_FIELDS = OrderedDict()
FRACTIONAL_TEST_FIELDS["x2.5y1.5"] = PowerSum.monomial(1.0, 2.5, 1.5)

CONJUGATION_ANGLES = (0.0, 0.3, math.pi / 4)


def apply_generator(ps):
    """Apply L termwise: c x^b y^l -> c b x^(b-1) y^(l+1) - c l x^(b+1) y^(l-1)."""
    terms = []
    for term in ps:
        terms.append(PowerTerm(term.coeff * term.beta, term.beta - 1.0, term.lam + 1.0))
        terms.append(PowerTerm(-term.coeff * term.lam, term.beta + 1.0, term.lam - 1.0))
    return PowerSum(tuple(terms))


def generator_power(ps, count):
    """L applied ``count`` times."""
    for _ in range(count):
        ps = apply_generator(ps)
    return ps


def exp_generator_series(ps, phi, max_terms=SERIES_MAX_TERMS, tol=SERIES_TOLERANCE):
    """Truncated exponential series sum_k phi^k / k! L^k ps.

    Args:
        ps (PowerSum): Field to rotate.
        phi (float): Rotation angle.
        max_terms (int): Largest k included.
        tol (float): Stop once the sup-norm of the added term falls below this.

    Returns:
        SeriesResult: The sum, the number of added terms, the size of the last one and whether it fell
        below ``tol``.
    """
    if max_terms < 0:
        raise ValidationError({"max_terms": f"must be non-negative, got {max_terms}"})
    total = ps
    term = ps
    tail = ps.sup_norm()
    for k in range(1, max_terms + 1):
        term = apply_generator(term).scale(phi / k)
        total = total + term
        tail = term.sup_norm()
        if tail < tol:
            logger.debug("Exponential series converged after %d terms (tail %.3g)", k, tail)
            return SeriesResult(total, k, tail, True)
    converged = tail < tol
    if not converged:
        logger.warning("Exponential series hit max_terms=%d with tail %.3g at phi=%g", max_terms, tail, phi)
    return SeriesResult(total, max_terms, tail, converged)


def rotate_polynomial(ps, phi):
    """Exact e^{phi L} ps by substituting the rotated coordinates.

    Each term c x^n y^m becomes c (cos x + sin y)^n (-sin x + cos y)^m, expanded binomially.

    Raises:
        UnsupportedError: When an exponent is negative or not an integer.
    """
    if not ps.is_polynomial():
        raise UnsupportedError(f"symbolic rotation needs non-negative integer exponents, got {ps}")
    c, s = math.cos(phi), math.sin(phi)
    terms = []
    for term in ps:
        n, m = int(term.beta), int(term.lam)
        for i in range(n + 1):
            for j in range(m + 1):
                coeff = term.coeff * math.comb(n, i) * math.comb(m, j) * c**i * s ** (n - i) * (-s) ** j * c ** (m - j)
                terms.append(PowerTerm(coeff, float(i + j), float(n - i + m - j)))
    return PowerSum(tuple(terms))


def coefficient_residual(lhs, rhs):
    """Largest coefficient difference relative to the size of the compared sums."""
    return (lhs - rhs).sup_norm() / max(1.0, lhs.sup_norm(), rhs.sup_norm())


def _leibniz_generator_residual(a, b, order):
    direct = generator_power(a * b, order)
    expanded = PowerSum()
    for k in range(order + 1):
        expanded = expanded + (generator_power(a, k) * generator_power(b, order - k)).scale(math.comb(order, k))
    return coefficient_residual(direct, expanded)


def check_product_rule(A, B, phi, tol=1e-10):  # pylint: disable=invalid-name
    """Whether e^{phi L} is multiplicative on ``A`` and ``B``.

    Also checks L^n (A B) = sum_k C(n, k) L^k A L^(n-k) B for n <= 4, which is what the
    multiplicativity of the exponential rests on.
    """
    product = exp_generator_series(A * B, phi).value
    factored = exp_generator_series(A, phi).value * exp_generator_series(B, phi).value
    if coefficient_residual(product, factored) > tol:
        logger.debug("Product rule failed for %s and %s at phi=%g", A, B, phi)
        return False
    return all(_leibniz_generator_residual(A, B, order) <= tol for order in range(1, LEIBNIZ_MAX_ORDER + 1))


def _d(ps, nx, ny):
    return ps.mixed_derivative(nx, ny)


def _commutator(first, second, ps):
    return first(second(ps)) - second(first(ps))


COMMUTATORS = OrderedDict()
COMMUTATORS["[D1x,L]=-D1y"] = (lambda ps: _d(ps, 1, 0), lambda ps: -_d(ps, 0, 1))
COMMUTATORS["[D1y,L]=D1x"] = (lambda ps: _d(ps, 0, 1), lambda ps: _d(ps, 1, 0))
COMMUTATORS["[D2x,L]=-2DxDy"] = (lambda ps: _d(ps, 2, 0), lambda ps: _d(ps, 1, 1).scale(-2.0))
COMMUTATORS["[D2y,L]=2DxDy"] = (lambda ps: _d(ps, 0, 2), lambda ps: _d(ps, 1, 1).scale(2.0))
COMMUTATORS["[Lap,L]=0"] = (lambda ps: _d(ps, 2, 0) + _d(ps, 0, 2), lambda ps: PowerSum())


def _check(identity, name, phi, lhs, rhs, tol):
    residual = coefficient_residual(lhs, rhs)
    return IdentityCheck(identity, name, phi, residual, residual <= tol)


def generator_conjugation_residual(ps, phi):
    """Coefficient residual of e^{phi L} L e^{-phi L} ps against L ps."""
    inner = exp_generator_series(ps, -phi).value
    conjugated = exp_generator_series(apply_generator(inner), phi).value
    return coefficient_residual(conjugated, apply_generator(ps))


def commutator_integer_checks(tol=1e-10):
    """Check the commutators of L with integer partials and the scalar nature of L.

    Returns:
        list[IdentityCheck]: One row per identity and test field, in a fixed order.
    """
    fields = OrderedDict(TEST_FIELDS)
    fields.update(FRACTIONAL_TEST_FIELDS)
    checks = []
    for identity, (operator, expected) in COMMUTATORS.items():
        for name, ps in fields.items():
            checks.append(_check(identity, name, 0.0, _commutator(operator, apply_generator, ps), expected(ps), tol))
    for name, ps in TEST_FIELDS.items():
        for phi in CONJUGATION_ANGLES:
            residual = generator_conjugation_residual(ps, phi)
            checks.append(IdentityCheck("L'=L", name, phi, residual, residual <= tol))
    failed = [check for check in checks if not check.passed]
    logger.debug("Commutator checks: %d run, %d failed", len(checks), len(failed))
    return checks


def series_substitution_checks(fields, phis, tol=1e-11):
    """Compare the exponential series with exact substitution on polynomial fields."""
    checks = []
    for name, ps in fields.items():
        for phi in phis:
            residual = coefficient_residual(exp_generator_series(ps, phi).value, rotate_polynomial(ps, phi))
            checks.append(IdentityCheck("series=substitution", name, phi, residual, residual <= tol))
    return checks


def group_law_residual(ps, phi1, phi2):
    """Coefficient residual of e^{phi2 L} e^{phi1 L} ps against e^{(phi1 + phi2) L} ps."""
    twice = exp_generator_series(exp_generator_series(ps, phi1).value, phi2).value
    return coefficient_residual(twice, exp_generator_series(ps, phi1 + phi2).value)


def monomials_up_to(degree):
    """Every monomial x^i y^j with i + j <= degree, keyed by name."""
    monomials = OrderedDict()
    for total in range(degree + 1):
        for i in range(total + 1):
            monomials[f"x{i}y{total - i}"] = PowerSum.monomial(1.0, float(i), float(total - i))
    return monomials


__all__ = [
    "apply_generator",
    "check_product_rule",
    "commutator_integer_checks",
    "exp_generator_series",
    "rotate_polynomial",
]
