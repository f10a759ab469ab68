"""
Kendall's tau of the order transform of the independence copula and of its margins.

``Π_T`` is the copula of the order statistics of ``d`` independent uniforms. Its distribution function
restricted to the ordered simplex is ``H^Π_T(x) = d! det(A_d(x))`` for an upper Hessenberg matrix ``A_d``
(see :class:`HessenbergMatrix`). Off the simplex ``H^Π_T`` is evaluated at the running minimum from the right,
which is what :func:`envelope_substitution` encodes for a margin ``ρ_K``.

Everything here is exact. Two closed forms are available for the lower tail margins ``ρ_{1..k}(Π_T)``;
:func:`kappa_lower_tail` computes both and refuses to answer if they disagree.

.. note::
    The full margin ``ρ_{1..d}(Π_T)`` is ``Π_T`` itself. Its *bracket* ``[Π_T, Π_T]`` equals ``1/(d+1)``,
    while its Kendall's tau is :func:`kappa_product_order`. Both are reported separately and
    never conflated.
"""

import functools
import itertools
import logging
import math

import attr

from . import _
from ._errors import DimensionError, DimensionCapError, DomainError, InternalConsistencyError, InvalidSubsetError
from .exact import BigRational, SparsePoly, binomial, simplex_integral
from .records import Check, Report

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

__all__ = ["MAX_CLOSED_FORM_DIMENSION", "MAX_SYMBOLIC_DIMENSION", "SubsetK", "HessenbergMatrix", "Envelope",
           "hpit_polynomial", "envelope_substitution", "bracket_margin", "bracket_product", "bracket_product_order",
           "kappa_from_bracket", "kappa_margin", "kappa_product_order", "lower_tail_bracket", "kappa_lower_tail",
           "kappa_lower_tail_table", "kappa_upper_tail", "kappa_lower_tail_limit", "reflect_subset",
           "check_reflection", "check_monotonicity", "check_closed_forms"]

#: Largest d accepted by the closed forms.
MAX_CLOSED_FORM_DIMENSION = 12

#: Largest d accepted by symbolic simplex integration of margins.
MAX_SYMBOLIC_DIMENSION = 8


@attr.s(frozen=True, slots=True)
class SubsetK:
    """
    A set K of coordinates ``1 <= k_1 < ... < k_m <= d`` with ``m >= 2``, selecting the margin ``ρ_K``.

    :raises ordertau.InvalidSubsetError: if the members are out of range, not strictly increasing or fewer than two

    Example usage::

        from ordertau.product import SubsetK

        K = SubsetK.parse(5, "1,2,3,5")
        print(K, len(K))  # {1,2,3,5} 4

    """
    d = attr.ib(converter=int)
    members = attr.ib(converter=tuple)

    @members.validator
    def _check_members(self, attribute, members):
        if not 2 <= len(members) <= self.d:
            raise InvalidSubsetError(_("K needs between 2 and d = {} members, got {}.").format(self.d, len(members)),
                                     self.d, members)
        if any(not 1 <= k <= self.d for k in members):
            raise InvalidSubsetError(_("Every member of K has to lie in 1..{}.").format(self.d), self.d, members)
        if any(a >= b for a, b in zip(members, members[1:])):
            raise InvalidSubsetError(_("The members of K have to be strictly increasing."), self.d, members)

    @classmethod
    def parse(cls, d, text):
        """Parse ``"1,2,3,5"`` or ``"{1,2,3,5}"``."""
        stripped = text.strip().strip("{}")
        try:
            members = [int(part) for part in stripped.split(",") if part.strip()]
        except ValueError:
            raise InvalidSubsetError(_("{} is not a comma separated list of coordinates.").format(text), d, [])
        return cls(d, members)

    @classmethod
    def full(cls, d):
        return cls(d, range(1, d + 1))

    @classmethod
    def lower(cls, d, k):
        """The lower tail ``{1, ..., k}``."""
        return cls(d, range(1, k + 1))

    @classmethod
    def upper(cls, d, k):
        """The upper tail ``{d-k+1, ..., d}``."""
        return cls(d, range(d - k + 1, d + 1))

    def __len__(self):
        return len(self.members)

    def __contains__(self, k):
        return k in self.members

    def __str__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


@attr.s(frozen=True, slots=True)
class HessenbergMatrix:
    """
    The ``d x d`` upper Hessenberg matrix ``A_d(u)`` with entries ``u_i^(j-i+1) / (j-i+1)!`` on and above the
    diagonal, ones on the subdiagonal and zeros below it.
    """
    d = attr.ib(converter=int)

    def entry(self, i, j):
        """The entry ``a_{i,j}`` (1-based) as a polynomial in ``d`` variables."""
        if not (1 <= i <= self.d and 1 <= j <= self.d):
            raise DimensionError(_("a_{{{},{}}} is not an entry of a {} x {} matrix.").format(i, j, self.d, self.d))
        return _entry(self.d, i, j)

    def determinant(self):
        """``det(A_d)`` by expansion along the last column, each minor being ``det(A_{i-1})``."""
        return _hessenberg_determinant(self.d)


@attr.s(frozen=True, slots=True)
class Envelope:
    """
    The substitution ``η_K(1, u)``: coordinate ``j`` becomes ``u_targets[j-1]``, or 1 where the target is ``None``.
    """
    subset = attr.ib()
    targets = attr.ib(converter=tuple)

    def apply(self, point):
        """Apply to a point with ``d`` coordinates."""
        return tuple(1 if target is None else point[target - 1] for target in self.targets)

    def __str__(self):
        return "(" + ",".join("1" if target is None else f"u{target}" for target in self.targets) + ")"


def hpit_polynomial(d):
    """
    The distribution function of ``Π_T`` on the ordered simplex, ``d! det(A_d)``.

    :param d: the dimension, ``1 <= d <= MAX_CLOSED_FORM_DIMENSION``
    :type d: int
    :return: a polynomial in ``d`` variables
    :type: ordertau.exact.SparsePoly
    :raises ordertau.DimensionCapError: if d exceeds the cap

    Example usage::

        from ordertau.product import hpit_polynomial

        print(hpit_polynomial(2))  # -u1^2 + 2*u1*u2

    """
    _check_dimension(d, 1, MAX_CLOSED_FORM_DIMENSION, _("The Hessenberg formula"))
    return _hpit_polynomial(d)


def envelope_substitution(d, K):
    """
    For each coordinate ``j`` not in K, the variable of the smallest member of K above ``j``, or 1 if there is none.
    Members of K map to themselves.

    :param d: the dimension
    :type d: int
    :param K: the margin
    :type K: ordertau.product.SubsetK or iterable of int
    :return: the substitution
    :type: ordertau.product.Envelope
    """
    K = _as_subset(d, K)
    targets = []
    for j in range(1, d + 1):
        targets.append(j if j in K else next((k for k in K.members if k > j), None))
    return Envelope(K, targets)


def bracket_margin(d, K):
    """
    ``[ρ_K(Π_T), ρ_K(Π_T)] = d! ∫_{T(I^d)} H^Π_T(η_K(1, u)) du``, exactly.

    :raises ordertau.DimensionCapError: if ``d > MAX_SYMBOLIC_DIMENSION``

    Example usage::

        from ordertau.product import bracket_margin

        print(bracket_margin(5, [1, 2, 3, 5]))  # 47/252

    """
    _check_dimension(d, 2, MAX_SYMBOLIC_DIMENSION, _("Symbolic margin integration"))
    return _bracket_margin(_as_subset(d, K))


def bracket_product(d):
    """``[Π, Π] = 1/2^d``."""
    return BigRational(1, 2 ** d)


def bracket_product_order(d):
    """``[Π_T, Π_T] = 1/(d+1)``."""
    return BigRational(1, d + 1)


def kappa_from_bracket(bracket, m):
    """
    Kendall's tau of an ``m``-dimensional copula from its bracket, ``(2^m b - 1) / (2^(m-1) - 1)``.

    :raises ordertau.DomainError: if ``m < 2`` or the bracket lies outside ``[0, 1/2]``
    """
    if m < 2:
        raise DomainError(_("Kendall's tau needs at least two dimensions, got m = {}.").format(m))
    bracket = BigRational(bracket)
    if not 0 <= bracket <= BigRational(1, 2):
        raise DomainError(_("A bracket has to lie in [0, 1/2], got {}.").format(bracket))
    return (2 ** m * bracket - 1) / (2 ** (m - 1) - 1)


def kappa_margin(d, K):
    """Kendall's tau of the margin ``ρ_K(Π_T)`` through :func:`bracket_margin`."""
    K = _as_subset(d, K)
    return kappa_from_bracket(bracket_margin(d, K), len(K))


def kappa_product_order(d):
    """
    ``κ[Π_T] = (2^d - (d+1)) / ((2^(d-1) - 1)(d+1))``.

    :raises ordertau.DimensionCapError: if ``d > MAX_CLOSED_FORM_DIMENSION``
    """
    _check_dimension(d, 2, MAX_CLOSED_FORM_DIMENSION, _("The closed form of κ[Π_T]"))
    return BigRational(2 ** d - (d + 1), (2 ** (d - 1) - 1) * (d + 1))


def lower_tail_bracket(d, k):
    """
    The bracket of ``ρ_{1..k}(Π_T)``, computed by both closed forms.

    :raises ordertau.InternalConsistencyError: if the two closed forms disagree
    """
    _check_tail(d, k)
    central = BigRational(math.comb(2 * d, d))
    binomial_sum = sum((BigRational(math.comb(2 * h, h) * math.comb(2 * d + 2 - 2 * h, d + 1 - h), 2 * h - 1)
                        for h in range(2, k + 1)), BigRational(0))
    first = BigRational(1, 2) - binomial_sum / (4 * central)

    tail_sum = sum((binomial(d, l - 1) * binomial(d, l) / binomial(2 * d - 1, 2 * l - 1)
                    for l in range(1, d - k + 1)), BigRational(0))
    second = BigRational(1, d + 1) + tail_sum / (2 * d)

    if first != second:
        raise InternalConsistencyError(_("The lower tail closed forms disagree at d = {}, k = {}: {} != {}.")
                                       .format(d, k, first, second))
    return first


def kappa_lower_tail(d, k):
    """
    ``κ[ρ_{1..k}(Π_T)]``, exactly.

    :param d: the dimension, ``2 <= d <= MAX_CLOSED_FORM_DIMENSION``
    :type d: int
    :param k: the tail size, ``2 <= k <= d``
    :type k: int
    :raises ordertau.DomainError: if k is out of range
    :raises ordertau.InternalConsistencyError: if the two closed forms disagree

    Example usage::

        from ordertau.product import kappa_lower_tail

        print(kappa_lower_tail(5, 3))  # 79/189

    """
    return kappa_from_bracket(lower_tail_bracket(d, k), k)


def kappa_lower_tail_table(d_max):
    """``{(d, k): κ[ρ_{1..k}(Π_T)]}`` for ``2 <= k <= d <= d_max``."""
    return {(d, k): kappa_lower_tail(d, k) for d in range(2, d_max + 1) for k in range(2, d + 1)}


def kappa_upper_tail(d, k):
    """
    ``κ[ρ_{d-k+1..d}(Π_T)]`` by symbolic integration, which by reflection equals :func:`kappa_lower_tail`.

    :raises ordertau.InternalConsistencyError: if the reflection does not hold
    """
    _check_tail(d, k)
    value = kappa_margin(d, SubsetK.upper(d, k))
    expected = kappa_lower_tail(d, k)
    if value != expected:
        raise InternalConsistencyError(_("Upper tail {} and lower tail {} of size {} differ in dimension {}.")
                                       .format(value, expected, k, d))
    return value


def kappa_lower_tail_limit(k):
    """
    ``lim_{d→∞} κ[ρ_{1..k}(Π_T)] = 1 - 2^(k-2)/(2^(k-1)-1) Σ_{h=2}^k C(2h,h) / ((2h-1) 4^(h-1))``.

    :raises ordertau.DomainError: if ``k < 2``
    """
    if k < 2:
        raise DomainError(_("The tail size has to be at least 2, got {}.").format(k))
    total = sum((BigRational(math.comb(2 * h, h), (2 * h - 1) * 4 ** (h - 1)) for h in range(2, k + 1)),
                BigRational(0))
    return 1 - BigRational(2 ** (k - 2), 2 ** (k - 1) - 1) * total


def reflect_subset(K):
    """``{d+1-k : k in K}``, sorted."""
    return SubsetK(K.d, sorted(K.d + 1 - k for k in K.members))


def check_reflection(d_max=6):
    """
    Check ``[ρ_K(Π_T), ρ_K(Π_T)] = [ρ_L(Π_T), ρ_L(Π_T)]`` with ``L = reflect(K)`` for every K with ``|K| >= 2``
    and ``d <= d_max``. Both margins have ``|K|`` coordinates, so their κ values agree as well.
    """
    _check_dimension(d_max, 2, MAX_SYMBOLIC_DIMENSION, _("The reflection check"))
    report = Report(_("reflection of margins"))
    for d in range(2, d_max + 1):
        for size in range(2, d + 1):
            for members in itertools.combinations(range(1, d + 1), size):
                K = SubsetK(d, members)
                mirror = reflect_subset(K)
                if mirror.members < K.members:
                    continue
                report.add(Check.compare(f"d={d} K={K} reflected={mirror}",
                                         bracket_margin(d, K), bracket_margin(d, mirror)))
    return report


def check_monotonicity(d_max=7, k_max=5, d_limit=10):
    """
    Check that the lower tail values decrease strictly in k for ``d <= d_max``, increase in d for ``k <= k_max``
    and ``d <= d_limit``, and stay below their limit.
    """
    report = Report(_("monotonicity of lower tails"))
    for d in range(3, d_max + 1):
        values = [kappa_lower_tail(d, k) for k in range(2, d + 1)]
        decreasing = all(a > b for a, b in zip(values, values[1:]))
        report.add(Check.holds(f"d={d} decreasing in k", decreasing, " > ".join(map(str, values))))

    for k in range(2, k_max + 1):
        values = [kappa_lower_tail(d, k) for d in range(k, d_limit + 1)]
        limit = kappa_lower_tail_limit(k)
        increasing = all(a < b for a, b in zip(values, values[1:]))
        report.add(Check.holds(f"k={k} increasing in d", increasing, " < ".join(map(str, values))))
        report.add(Check.holds(f"k={k} below limit {limit}", all(value < limit for value in values),
                               f"max {max(values)}"))
    return report


def check_closed_forms(d_max=7, reference=None):
    """
    Check the closed forms against symbolic integration and, if given, against a reference table.

    :param d_max: largest dimension to integrate symbolically
    :type d_max: int
    :param reference: ``{(d, k): κ}`` reference values of the lower tails
    :type reference: dict, optional
    :return: the report
    :type: ordertau.records.Report
    """
    _check_dimension(d_max, 2, MAX_SYMBOLIC_DIMENSION, _("The closed form check"))
    report = Report(_("closed forms"))
    for d in range(2, d_max + 1):
        report.add(Check.compare(f"d={d} bracket of Π_T", bracket_margin(d, SubsetK.full(d)),
                                 bracket_product_order(d)))
        report.add(Check.compare(f"d={d} κ[Π_T]", kappa_margin(d, SubsetK.full(d)), kappa_product_order(d)))
        for k in range(2, d + 1):
            report.add(Check.compare(f"d={d} k={k} lower tail", kappa_margin(d, SubsetK.lower(d, k)),
                                     kappa_lower_tail(d, k)))

    if d_max >= 5:
        report.add(Check.compare("d=5 K={1,2,3,5} bracket", bracket_margin(5, [1, 2, 3, 5]), BigRational(47, 252)))

    for (d, k), expected in sorted((reference or {}).items()):
        report.add(Check.compare(f"d={d} k={k} reference", kappa_lower_tail(d, k), expected))
    return report


@functools.lru_cache(maxsize=None)
def _hpit_polynomial(d):
    logger.debug("building the Hessenberg polynomial for d = %d", d)
    return _hessenberg_determinant(d) * math.factorial(d)


@functools.lru_cache(maxsize=None)
def _hessenberg_determinant(n):
    if n == 0:
        return SparsePoly.constant(0, 1)
    det = SparsePoly.zero(n)
    for i in range(1, n + 1):
        minor = _hessenberg_determinant(i - 1).extend(n)
        det = det + _entry(n, i, n) * minor * (-1) ** (i + n)
    return det


def _entry(d, i, j):
    if i > j + 1:
        return SparsePoly.zero(d)
    if i == j + 1:
        return SparsePoly.constant(d, 1)
    power = j - i + 1
    exponents = tuple(power if column == i else 0 for column in range(1, d + 1))
    return SparsePoly.monomial(d, exponents, BigRational(1, math.factorial(power)))


@functools.lru_cache(maxsize=None)
def _bracket_margin(K):
    d = K.d
    envelope = envelope_substitution(d, K)
    logger.debug("integrating H^Π_T%s over the ordered simplex, d = %d", envelope, d)
    return math.factorial(d) * simplex_integral(_hpit_polynomial(d).substitute(envelope.targets))


def _as_subset(d, K):
    if isinstance(K, SubsetK):
        if K.d != d:
            raise InvalidSubsetError(_("K = {} was built for d = {}, not d = {}.").format(K, K.d, d), d, K.members)
        return K
    return SubsetK(d, K)


def _check_dimension(d, low, cap, what):
    if d < low:
        raise DimensionError(_("{} needs d >= {}, got d = {}.").format(what, low, d), expected=low, actual=d)
    if d > cap:
        raise DimensionCapError(d, cap, what)


def _check_tail(d, k):
    _check_dimension(d, 2, MAX_CLOSED_FORM_DIMENSION, _("The lower tail closed forms"))
    if not 2 <= k <= d:
        raise DomainError(_("The tail size has to satisfy 2 <= k <= d = {}, got k = {}.").format(d, k))
