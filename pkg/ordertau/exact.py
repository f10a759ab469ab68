"""
Exact rational arithmetic, sparse multivariate polynomials and iterated integration
over the ordered simplex ``T(I^d) = {u : u_1 <= ... <= u_d}``.

Variables are numbered ``u_1, ..., u_d`` (1-based) in every public function and message.
Integration always runs innermost first: ``u_1`` up to ``u_2``, then ``u_2`` up to ``u_3``
and so on, with the last variable integrated over ``[0, 1]``.
"""

import fractions
import math
import types
from collections.abc import Mapping

import numpy as np

from . import _
from ._errors import DimensionError, DomainError, IntegrationError

__all__ = ["BigRational", "SparsePoly", "poly_add", "poly_mul", "integrate_var_to_next",
           "iterated_integral", "simplex_integral", "monomial_simplex_integral", "binomial"]

#: The scalar of the exact engine.
BigRational = fractions.Fraction


class SparsePoly:
    """
    A polynomial in ``u_1, ..., u_d`` with :class:`BigRational` coefficients,
    stored sparsely as a map from exponent vectors to coefficients.

    Instances are immutable and never store a zero coefficient.

    :param dimension: the number of variables ``d``
    :type dimension: int
    :param terms: exponent vector (length ``d``) to coefficient; repeated vectors are summed
    :type terms: dict or iterable of (tuple, rational) pairs, optional
    :raises ordertau.DimensionError: if an exponent vector does not have length ``d``

    Example usage::

        from ordertau.exact import SparsePoly

        u1 = SparsePoly.variable(2, 1)
        u2 = SparsePoly.variable(2, 2)
        p = u1 * u2 - u1 * u1 * BigRational(1, 2)
        print(p)  # -1/2*u1^2 + u1*u2

    """
    __slots__ = ("_dimension", "_terms")

    def __init__(self, dimension, terms=()):
        if dimension < 0:
            raise DimensionError(_("A polynomial needs a nonnegative number of variables, got {}.").format(dimension))

        collected = {}
        for exponents, coefficient in (terms.items() if isinstance(terms, Mapping) else terms):
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != dimension:
                raise DimensionError(_("Exponent vector {} does not have length {}.").format(exponents, dimension),
                                     expected=dimension, actual=len(exponents))
            if any(e < 0 for e in exponents):
                raise DomainError(_("Exponent vector {} has a negative entry.").format(exponents))
            collected[exponents] = collected.get(exponents, 0) + _rational(coefficient)

        self._dimension = dimension
        self._terms = {e: c for e, c in collected.items() if c}

    @classmethod
    def _trusted(cls, dimension, terms):
        """Build from already validated terms, pruning zeros."""
        poly = cls.__new__(cls)
        poly._dimension = dimension
        poly._terms = {e: c for e, c in terms.items() if c}
        return poly

    @classmethod
    def zero(cls, dimension):
        return cls._trusted(dimension, {})

    @classmethod
    def constant(cls, dimension, value):
        """The constant polynomial ``value`` in ``dimension`` variables."""
        return cls._trusted(dimension, {(0,) * dimension: _rational(value)})

    @classmethod
    def variable(cls, dimension, index):
        """The polynomial ``u_index`` (1-based) in ``dimension`` variables."""
        return cls.monomial(dimension, tuple(1 if j == index else 0 for j in range(1, dimension + 1)))

    @classmethod
    def monomial(cls, dimension, exponents, coefficient=1):
        """The polynomial ``coefficient * u_1^e_1 * ... * u_d^e_d``."""
        return cls(dimension, {tuple(exponents): coefficient})

    @property
    def dimension(self):
        """The number of variables."""
        return self._dimension

    @property
    def terms(self):
        """A read-only view of the exponent vector to coefficient map."""
        return types.MappingProxyType(self._terms)

    def is_zero(self):
        return not self._terms

    def degree(self):
        """The total degree, 0 for constants and for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=0)

    def depends_on(self, index):
        """Whether ``u_index`` (1-based) occurs with a positive exponent."""
        return any(e[index - 1] for e in self._terms)

    def extend(self, dimension):
        """Embed into ``dimension >= self.dimension`` variables; the new trailing variables do not occur."""
        if dimension < self._dimension:
            raise DimensionError(_("Cannot embed a polynomial in {} variables into {} variables.")
                                 .format(self._dimension, dimension), expected=self._dimension, actual=dimension)
        padding = (0,) * (dimension - self._dimension)
        return SparsePoly._trusted(dimension, {e + padding: c for e, c in self._terms.items()})

    def substitute(self, targets):
        """
        Replace every variable by another variable or by the constant 1.

        :param targets: for each variable ``u_j``, the 1-based index of its replacement, or ``None`` to pin it at 1
        :type targets: sequence of int or None, of length ``dimension``
        :return: the substituted polynomial, in the same number of variables
        :type: ordertau.exact.SparsePoly
        """
        targets = tuple(targets)
        if len(targets) != self._dimension:
            raise DimensionError(_("A substitution for {} variables needs {} targets, got {}.")
                                 .format(self._dimension, self._dimension, len(targets)),
                                 expected=self._dimension, actual=len(targets))
        terms = {}
        for exponents, coefficient in self._terms.items():
            new = [0] * self._dimension
            for power, target in zip(exponents, targets):
                if target is not None:
                    new[target - 1] += power
            key = tuple(new)
            terms[key] = terms.get(key, 0) + coefficient
        return SparsePoly._trusted(self._dimension, terms)

    def evaluate(self, point):
        """Evaluate exactly at ``point``; exact for rational coordinates."""
        point = tuple(point)
        if len(point) != self._dimension:
            raise DimensionError(_("Cannot evaluate a polynomial in {} variables at a point with {} coordinates.")
                                 .format(self._dimension, len(point)), expected=self._dimension, actual=len(point))
        total = BigRational(0)
        for exponents, coefficient in self._terms.items():
            value = coefficient
            for x, power in zip(point, exponents):
                if power:
                    value *= x ** power
            total += value
        return total

    def evaluate_many(self, points):
        """
        Evaluate in floating point at every row of ``points``.

        :param points: an ``(n, dimension)`` array
        :type points: numpy.ndarray
        :return: the ``n`` values
        :type: numpy.ndarray
        """
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self._dimension:
            raise DimensionError(_("Expected an (n, {}) array of points, got shape {}.")
                                 .format(self._dimension, points.shape), expected=self._dimension,
                                 actual=points.shape[-1] if points.ndim else None)
        result = np.zeros(points.shape[0])
        for exponents, coefficient in self._terms.items():
            term = np.full(points.shape[0], float(coefficient))
            for column, power in enumerate(exponents):
                if power:
                    term *= points[:, column] ** power
            result += term
        return result

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self._dimension, other)
        _check_dimensions(self, other)
        terms = dict(self._terms)
        for exponents, coefficient in other._terms.items():
            terms[exponents] = terms.get(exponents, 0) + coefficient
        return SparsePoly._trusted(self._dimension, terms)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly._trusted(self._dimension, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            factor = _rational(other)
            return SparsePoly._trusted(self._dimension, {e: c * factor for e, c in self._terms.items()})
        _check_dimensions(self, other)
        terms = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                terms[key] = terms.get(key, 0) + c1 * c2
        return SparsePoly._trusted(self._dimension, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self._dimension == other._dimension and self._terms == other._terms

    def __hash__(self):
        return hash((self._dimension, frozenset(self._terms.items())))

    def __repr__(self):
        return f"SparsePoly({self._dimension}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"

        def render(exponents, coefficient):
            factors = [f"u{j}" if power == 1 else f"u{j}^{power}"
                       for j, power in enumerate(exponents, start=1) if power]
            magnitude = abs(coefficient)
            if not factors:
                return str(magnitude)
            return "*".join(factors if magnitude == 1 else [str(magnitude)] + factors)

        ordered = sorted(self._terms.items(), key=lambda item: (-sum(item[0]), tuple(-e for e in item[0])))
        text = ""
        for position, (exponents, coefficient) in enumerate(ordered):
            sign = "-" if coefficient < 0 else "+"
            body = render(exponents, coefficient)
            if position == 0:
                text = f"-{body}" if sign == "-" else body
            else:
                text += f" {sign} {body}"
        return text


def poly_add(p, q):
    """
    The exact sum of two polynomials.

    :raises ordertau.DimensionError: if ``p`` and ``q`` have different dimensions
    """
    _check_dimensions(p, q)
    return p + q


def poly_mul(p, q):
    """
    The exact product of two polynomials.

    :raises ordertau.DimensionError: if ``p`` and ``q`` have different dimensions
    """
    _check_dimensions(p, q)
    return p * q


def integrate_var_to_next(p, i):
    """
    One step of the iterated simplex integral: ``∫_0^{u_(i+1)} p du_i``.

    :param p: a polynomial that no longer depends on ``u_1, ..., u_(i-1)``
    :type p: ordertau.exact.SparsePoly
    :param i: the 1-based index of the variable to integrate out, ``i < p.dimension``
    :type i: int
    :return: a polynomial free of ``u_i``
    :type: ordertau.exact.SparsePoly
    :raises ordertau.IntegrationError: if ``i`` is out of range or ``p`` still depends on an earlier variable

    Example usage::

        from ordertau.exact import SparsePoly, integrate_var_to_next

        print(integrate_var_to_next(SparsePoly.variable(2, 1), 1))  # 1/2*u2^2

    """
    d = p.dimension
    if not 1 <= i < d:
        raise IntegrationError(_("Cannot integrate u{} up to u{} in a polynomial with {} variables.")
                               .format(i, i + 1, d), variable=i)
    for j in range(1, i):
        if p.depends_on(j):
            raise IntegrationError(_("u{} has to be integrated out before u{}.").format(j, i), variable=j)

    terms = {}
    for exponents, coefficient in p.terms.items():
        power = exponents[i - 1]
        new = list(exponents)
        new[i - 1] = 0
        new[i] += power + 1
        key = tuple(new)
        terms[key] = terms.get(key, 0) + coefficient / (power + 1)
    return SparsePoly._trusted(d, terms)


def iterated_integral(p, count):
    """
    Integrate ``u_1`` up to ``u_2``, then ``u_2`` up to ``u_3``, ..., up to ``u_count`` up to ``u_(count+1)``.
    The result is a polynomial in ``u_(count+1), ..., u_d``.
    """
    if not 0 <= count < p.dimension:
        raise IntegrationError(_("Cannot integrate {} of {} variables up to a next variable.")
                               .format(count, p.dimension), variable=count)
    for i in range(1, count + 1):
        p = integrate_var_to_next(p, i)
    return p


def simplex_integral(p):
    """
    The exact integral of ``p`` over the ordered simplex,
    ``∫_0^1 ∫_0^{u_d} ... ∫_0^{u_2} p du_1 ... du_d``.

    :param p: a polynomial in ``d >= 1`` variables
    :type p: ordertau.exact.SparsePoly
    :return: the integral
    :type: ordertau.exact.BigRational

    Example usage::

        from ordertau.exact import SparsePoly, simplex_integral

        print(simplex_integral(SparsePoly.constant(3, 1)))  # 1/6

    """
    d = p.dimension
    if d < 1:
        raise DimensionError(_("The ordered simplex needs at least one variable."), expected=1, actual=d)
    last = iterated_integral(p, d - 1)
    return sum((c / (e[-1] + 1) for e, c in last.terms.items()), BigRational(0))


def monomial_simplex_integral(exponents):
    """Power-rule closed form of the simplex integral of ``u_1^a_1 * ... * u_d^a_d``."""
    value = BigRational(1)
    running = 0
    for j, power in enumerate(exponents, start=1):
        running += power
        value /= running + j
    return value


def binomial(y, k):
    """
    The binomial coefficient ``C(y, k) = y (y-1) ... (y-k+1) / k!`` for rational ``y`` and integer ``k``.
    ``C(y, k) = 0`` for ``k < 0``.
    """
    if k < 0:
        return BigRational(0)
    if isinstance(y, int) and y >= 0:
        return BigRational(math.comb(y, k))
    value = BigRational(1)
    for j in range(k):
        value *= y - j
    return value / math.factorial(k)


def _rational(value):
    if isinstance(value, float):
        raise DomainError(_("The exact engine does not accept floating-point values, got {!r}.").format(value))
    return BigRational(value)


def _check_dimensions(p, q):
    if p.dimension != q.dimension:
        raise DimensionError(_("Polynomials in {} and {} variables cannot be combined.").format(p.dimension, q.dimension),
                             expected=p.dimension, actual=q.dimension)
