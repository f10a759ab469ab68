"""
The polynomial family ``S_n`` behind the Hessenberg formula, its partially pinned variants ``S_{n,m}``, the
binomial identities used to evaluate their integrals, and exact checks of all of them.

``S_0 = 1`` and ``S_n = Σ_{i=1}^n (-1)^(i+n) u_i^(n-i+1) / (n-i+1)! S_{i-1}``, a polynomial in ``u_1, ..., u_n``.
``S_{n,m}`` is ``S_n`` with its last ``m`` variables pinned at 1, kept in ``n`` variables.
"""

import functools
import itertools
import logging
import math

import numpy as np

from . import _
from ._errors import DimensionCapError, DimensionError, DomainError
from .exact import BigRational, SparsePoly, binomial, iterated_integral
from .product import MAX_CLOSED_FORM_DIMENSION, HessenbergMatrix
from .records import Check, Report

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

__all__ = ["s_n", "s_nm", "s_n_integral_polynomial", "s_nm_integral_polynomial", "s_nm_integral_value",
           "combinatorial_identity", "check_combinatorial_identities", "check_integral_closed_forms",
           "check_polynomial_identities", "leibniz_determinant"]

#: Largest n for which the Leibniz expansion is used as an independent determinant.
_MAX_LEIBNIZ = 8


def s_n(n):
    """
    ``S_n`` as a polynomial in ``n`` variables (``S_0`` is the constant 1 in no variables).

    :raises ordertau.DimensionError: if n is negative
    :raises ordertau.DimensionCapError: if ``n > MAX_CLOSED_FORM_DIMENSION``
    """
    _check_n(n)
    return _s_n(n)


def s_nm(n, m):
    """``S_n`` with ``u_{n-m+1}, ..., u_n`` pinned at 1, still in ``n`` variables."""
    _check_n(n)
    if not 0 <= m <= n:
        raise DomainError(_("Can only pin 0 to {} variables, got m = {}.").format(n, m))
    targets = [j if j <= n - m else None for j in range(1, n + 1)]
    return _s_n(n).substitute(targets)


def s_n_integral_polynomial(n):
    """``u_{n+1}^(2n) / (n! (n+1)!)``, the ``n``-fold integral of ``S_n``, in ``n+1`` variables."""
    _check_n(n)
    exponents = (0,) * n + (2 * n,)
    return SparsePoly.monomial(n + 1, exponents, BigRational(1, math.factorial(n) * math.factorial(n + 1)))


def s_nm_integral_polynomial(n, m):
    """
    The ``n``-fold integral of ``S_{n,m}`` as a polynomial in ``u = u_{n+1}``:

    ``Σ_{l=0}^m u^(2n-l)/(2n)! · 1/(n-l+1) · C(2n,l) · Σ_{h=0}^{m-l} (-1)^h C(2n-2l-h, n-l) C(n-l+1, h)``
    """
    _check_n(n)
    if not 0 <= m <= n:
        raise DomainError(_("Can only pin 0 to {} variables, got m = {}.").format(n, m))
    terms = {}
    for l in range(m + 1):
        inner = sum((-1) ** h * math.comb(2 * n - 2 * l - h, n - l) * math.comb(n - l + 1, h)
                    for h in range(m - l + 1))
        coefficient = BigRational(math.comb(2 * n, l) * inner, math.factorial(2 * n) * (n - l + 1))
        exponents = (0,) * n + (2 * n - l,)
        terms[exponents] = terms.get(exponents, 0) + coefficient
    return SparsePoly(n + 1, terms)


def s_nm_integral_value(n, m):
    """
    The ``n``-fold integral of ``S_{n,m}`` at ``u_{n+1} = 1``:
    ``1/(n!(n+1)!) + 1/(2n)! Σ_{k=1}^m (2n-2k)! / ((n-k)! (n+1-k)!) C(2k-1, k)``.
    """
    _check_n(n)
    if not 0 <= m <= n:
        raise DomainError(_("Can only pin 0 to {} variables, got m = {}.").format(n, m))
    total = BigRational(1, math.factorial(n) * math.factorial(n + 1))
    for k in range(1, m + 1):
        total += BigRational(math.factorial(2 * n - 2 * k) * math.comb(2 * k - 1, k),
                             math.factorial(n - k) * math.factorial(n + 1 - k) * math.factorial(2 * n))
    return total


def combinatorial_identity(index, n, y=None, z=None):
    """
    Both sides of one of the four binomial identities.

    1. ``Σ_{k=0}^n C(2n-2k, n-k) C(2k, k) / (2k-1) = 0``
    2. ``Σ_{k=0}^n (-1)^k C(n,k) C(z,k) / C(y,k) = C(y-z, n) / C(y, n)`` for rational y, z
    3. ``Σ_{k=0}^n (-1)^k C(n,k) C(n+k, k+1) = 0``
    4. ``Σ_{k=0}^n (-1)^k C(n+k, k) C(n+1, k+1) = 0``

    Identities 1, 3 and 4 are stated for ``n >= 1``, identity 2 for ``n >= 0``.

    :return: the left and the right hand side
    :type: tuple of ordertau.exact.BigRational
    :raises ordertau.DomainError: if the arguments lie outside the identity's domain

    Example usage::

        from fractions import Fraction
        from ordertau.appendix import combinatorial_identity

        lhs, rhs = combinatorial_identity(2, 3, y=Fraction(7, 2), z=Fraction(-1, 3))
        assert lhs == rhs

    """
    if index not in (1, 2, 3, 4):
        raise DomainError(_("There is no identity {}, choose one of 1, 2, 3 or 4.").format(index))
    if n < (0 if index == 2 else 1):
        raise DomainError(_("Identity {} does not hold for n = {}.").format(index, n))

    if index == 1:
        lhs = sum((BigRational(math.comb(2 * n - 2 * k, n - k) * math.comb(2 * k, k), 2 * k - 1)
                   for k in range(n + 1)), BigRational(0))
        return lhs, BigRational(0)

    if index == 2:
        if y is None or z is None:
            raise DomainError(_("Identity 2 needs both y and z."))
        y, z = BigRational(y), BigRational(z)
        if any(binomial(y, k) == 0 for k in range(n + 1)):
            raise DomainError(_("C(y, k) vanishes for y = {} and some k <= {}.").format(y, n))
        lhs = sum((BigRational((-1) ** k * math.comb(n, k)) * binomial(z, k) / binomial(y, k)
                   for k in range(n + 1)), BigRational(0))
        return lhs, binomial(y - z, n) / binomial(y, n)

    if index == 3:
        lhs = sum((-1) ** k * math.comb(n, k) * math.comb(n + k, k + 1) for k in range(n + 1))
    else:
        lhs = sum((-1) ** k * math.comb(n + k, k) * math.comb(n + 1, k + 1) for k in range(n + 1))
    return BigRational(lhs), BigRational(0)


def check_combinatorial_identities(n_max=12, trials=20, seed=0):
    """
    Check all four identities for every ``n <= n_max``; identity 2 with ``trials`` random rational pairs per n.

    :param seed: seed of the ``numpy`` generator drawing ``y = p/q``, ``z = p/q`` with ``|p| <= 20``, ``2 <= q <= 9``
    :type seed: int
    """
    rng = np.random.default_rng(seed)
    report = Report(_("binomial identities"))
    for n in range(0, n_max + 1):
        for index in (1, 3, 4):
            if n >= 1:
                report.add(Check.compare(f"identity {index} n={n}", *combinatorial_identity(index, n)))
        for trial in range(trials):
            z = _random_rational(rng)
            y = _random_rational(rng)
            while any(binomial(y, k) == 0 for k in range(n + 1)):
                y = _random_rational(rng)
            report.add(Check.compare(f"identity 2 n={n} y={y} z={z}", *combinatorial_identity(2, n, y, z)))
    return report


def check_integral_closed_forms(n_max=10):
    """
    For every ``n <= n_max`` and ``m <= n``, integrate ``S_{n,m}`` symbolically and compare the polynomial with
    :func:`s_nm_integral_polynomial` (and :func:`s_n_integral_polynomial` for ``m = 0``), and its value at 1 with
    :func:`s_nm_integral_value`.
    """
    report = Report(_("integrals of S_n"))
    for n in range(1, n_max + 1):
        for m in range(0, n + 1):
            integral = _integrate_fully(s_nm(n, m))
            if m == 0:
                report.add(Check.compare(f"n={n} m=0 integral of S_n", integral, s_n_integral_polynomial(n)))
            report.add(Check.compare(f"n={n} m={m} polynomial", integral, s_nm_integral_polynomial(n, m)))
            at_one = integral.evaluate((1,) * (n + 1))
            report.add(Check.compare(f"n={n} m={m} value", at_one, s_nm_integral_value(n, m)))
    return report


def check_polynomial_identities(n_max=8):
    """
    Check that ``S_n`` equals the Hessenberg determinant, both as computed by :class:`ordertau.product.HessenbergMatrix`
    and, for small n, by the Leibniz expansion over permutations.
    """
    report = Report(_("Hessenberg determinants"))
    for n in range(1, n_max + 1):
        matrix = HessenbergMatrix(n)
        report.add(Check.compare(f"n={n} expansion", matrix.determinant(), s_n(n)))
        if n <= _MAX_LEIBNIZ:
            report.add(Check.compare(f"n={n} Leibniz", leibniz_determinant(matrix), s_n(n)))
        else:
            report.add(Check.skip(f"n={n} Leibniz", _("more than {} rows").format(_MAX_LEIBNIZ)))
    return report


def leibniz_determinant(matrix):
    """
    ``Σ_σ sgn(σ) Π_i a_{i,σ(i)}`` over the ``2^(n-1)`` permutations with ``σ(i) >= i - 1``; every other permutation
    passes through a zero entry below the subdiagonal.
    """
    n = matrix.d
    det = SparsePoly.zero(n)
    for permutation in _hessenberg_permutations(n):
        term = SparsePoly.constant(n, _sign(permutation))
        for i, j in enumerate(permutation, start=1):
            term = term * matrix.entry(i, j)
        det = det + term
    return det


@functools.lru_cache(maxsize=None)
def _s_n(n):
    if n == 0:
        return SparsePoly.constant(0, 1)
    result = SparsePoly.zero(n)
    for i in range(1, n + 1):
        power = n - i + 1
        exponents = tuple(power if j == i else 0 for j in range(1, n + 1))
        factor = SparsePoly.monomial(n, exponents, BigRational((-1) ** (i + n), math.factorial(power)))
        result = result + factor * _s_n(i - 1).extend(n)
    logger.debug("S_%d has %d terms", n, len(result.terms))
    return result


def _integrate_fully(poly):
    n = poly.dimension
    return iterated_integral(poly.extend(n + 1), n)


def _hessenberg_permutations(n, row=1, used=()):
    if row > n:
        yield ()
        return
    for column in range(max(row - 1, 1), n + 1):
        if column in used:
            continue
        # column row - 1 is out of reach for every later row
        if row > 1 and row - 1 not in used and column != row - 1:
            continue
        for rest in _hessenberg_permutations(n, row + 1, used + (column,)):
            yield (column,) + rest


def _sign(permutation):
    inversions = sum(1 for a, b in itertools.combinations(permutation, 2) if a > b)
    return -1 if inversions % 2 else 1


def _random_rational(rng):
    return BigRational(int(rng.integers(-20, 21)), int(rng.integers(2, 10)))


def _check_n(n):
    if n < 0:
        raise DimensionError(_("n has to be nonnegative, got {}.").format(n), expected=0, actual=n)
    if n > MAX_CLOSED_FORM_DIMENSION:
        raise DimensionCapError(n, MAX_CLOSED_FORM_DIMENSION, "S_n")
