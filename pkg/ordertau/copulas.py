"""
Copula models with exact evaluation, bulk sampling and, where a closed form exists, the distribution function
``H^C_T`` of their order transform.

Every model is an immutable value with

* ``d``, the dimension,
* ``evaluate(u)``, exact for rational input,
* ``evaluate_many(points)``, vectorized over an ``(n, d)`` array,
* ``sample(rng, size)``, an ``(size, d)`` array drawn with ``rng.random`` only,
* ``order_cdf(x)`` and ``order_cdf_many(points)``, or :class:`ordertau.UnsupportedModelError`.

Models are built directly or from a textual spec with :func:`parse_model`.
"""

import functools
import logging
import operator
import re

import attr
import numpy as np

from . import _
from ._errors import (AsymmetricShuffleError, DimensionError, DomainError, MalformedModelError,
                      UnsupportedModelError)
from .config import get_presets
from .exact import BigRational
from .product import hpit_polynomial, kappa_from_bracket
from .records import Check, Report

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

__all__ = ["Product", "FrechetM", "FrechetW", "Segment", "ShuffleOfM", "Mixture", "MODEL_FAMILIES", "ALIASES",
           "sample", "order_transform_point", "order_transform", "eval_copula", "order_cdf", "d_order_cdf",
           "eval_D_order_transform", "shuffle_self_bracket", "shuffle_diagonal_term", "bracket_shuffle_exact",
           "check_worked_examples", "parse_segments", "parse_model"]

MODEL_FAMILIES = ("product", "frechetM", "frechetW", "shuffleM", "mix")
ALIASES = ("M", "W", "Pi", "A", "B", "D")

#: Points per axis of the exchangeability check of shuffles.
SYMMETRY_GRID = 17

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")
_DECIMAL = re.compile(r"^\d*\.\d+$")


def _dimension_at_least_two(instance, attribute, value):
    if value < 2:
        raise DimensionError(_("A copula needs d >= 2, got d = {}.").format(value), expected=2, actual=value)


@attr.s(frozen=True, slots=True)
class Product:
    """The independence copula ``Π(u) = u_1 ... u_d``."""
    d = attr.ib(converter=int, validator=_dimension_at_least_two)

    def evaluate(self, u):
        return functools.reduce(operator.mul, u, 1)

    def evaluate_many(self, points):
        return np.prod(points, axis=1)

    def sample(self, rng, size):
        return rng.random((size, self.d))

    def order_cdf(self, x):
        return hpit_polynomial(self.d).evaluate(_running_min_from_right(x))

    def order_cdf_many(self, points):
        envelope = np.minimum.accumulate(points[:, ::-1], axis=1)[:, ::-1]
        return hpit_polynomial(self.d).evaluate_many(envelope)

    def __str__(self):
        return f"product:{self.d}"


@attr.s(frozen=True, slots=True)
class FrechetM:
    """The upper Fréchet-Hoeffding bound ``M(u) = min(u)``; its order transform is itself."""
    d = attr.ib(converter=int, validator=_dimension_at_least_two)

    def evaluate(self, u):
        return min(u)

    def evaluate_many(self, points):
        return np.min(points, axis=1)

    def sample(self, rng, size):
        return np.repeat(rng.random((size, 1)), self.d, axis=1)

    def order_cdf(self, x):
        return min(x)

    def order_cdf_many(self, points):
        return np.min(points, axis=1)

    def __str__(self):
        return f"frechetM:{self.d}"


@attr.s(frozen=True, slots=True)
class FrechetW:
    """The lower Fréchet-Hoeffding bound ``W(u) = max(u_1 + u_2 - 1, 0)``, a copula only for d = 2."""
    d = 2

    def evaluate(self, u):
        u1, u2 = u
        return max(u1 + u2 - 1, 0)

    def evaluate_many(self, points):
        return np.maximum(points[:, 0] + points[:, 1] - 1, 0)

    def sample(self, rng, size):
        t = rng.random(size)
        return np.column_stack([t, 1 - t])

    def order_cdf(self, x):
        x1, x2 = x
        return max(_clamp(2 * x1) + max(2 * _clamp(x2) - 1, 0) - 1, 0)

    def order_cdf_many(self, points):
        x1 = np.clip(2 * points[:, 0], 0, 1)
        x2 = np.maximum(2 * np.clip(points[:, 1], 0, 1) - 1, 0)
        return np.maximum(x1 + x2 - 1, 0)

    def __str__(self):
        return "frechetW"


@attr.s(frozen=True, slots=True)
class Segment:
    """The segment of slope 1 from ``(a1, a2)`` to ``(b1, b2)``."""
    a1 = attr.ib(converter=BigRational)
    a2 = attr.ib(converter=BigRational)
    b1 = attr.ib(converter=BigRational)
    b2 = attr.ib(converter=BigRational)

    def __attrs_post_init__(self):
        if self.b1 - self.a1 != self.b2 - self.a2 or self.b1 <= self.a1:
            raise MalformedModelError(_("Segment {} does not have slope 1 and positive length.").format(self))
        if not all(0 <= x <= 1 for x in (self.a1, self.a2, self.b1, self.b2)):
            raise MalformedModelError(_("Segment {} leaves the unit square.").format(self))

    @property
    def length(self):
        """The mass carried, equal to the length of the first-coordinate projection."""
        return self.b1 - self.a1

    @property
    def offset(self):
        """``a2 - a1``: the segment is ``{(t, t + offset)}``."""
        return self.a2 - self.a1

    def __str__(self):
        return " ".join(str(x) for x in (self.a1, self.a2, self.b1, self.b2))


@attr.s(frozen=True, slots=True)
class ShuffleOfM:
    """
    A bivariate shuffle of ``M``: mass spread uniformly along finitely many segments of slope 1 whose projections
    on either axis partition ``[0, 1]``.

    :raises ordertau.MalformedModelError: if the projections do not partition the unit interval
    """
    segments = attr.ib(converter=lambda segments: tuple(sorted(segments, key=operator.attrgetter("a1"))))
    d = 2

    def __attrs_post_init__(self):
        if not self.segments:
            raise MalformedModelError(_("A shuffle needs at least one segment."))
        for first, last, coordinate in ((operator.attrgetter("a1"), operator.attrgetter("b1"), 1),
                                        (operator.attrgetter("a2"), operator.attrgetter("b2"), 2)):
            intervals = sorted((first(s), last(s)) for s in self.segments)
            ends = [0] + [end for start, end in intervals]
            if [start for start, end in intervals] != ends[:-1] or ends[-1] != 1:
                raise MalformedModelError(
                    _("The segments' projections on coordinate {} do not partition [0, 1].").format(coordinate))

    def map_uniform(self, t):
        """The point of the support above first coordinate ``t``."""
        for segment in self.segments:
            if segment.a1 <= t < segment.b1:
                return (t, t + segment.offset)
        if t == 1:
            return (t, t + self.segments[-1].offset)
        raise DomainError(_("{} is not in [0, 1].").format(t))

    def evaluate(self, u):
        u1, u2 = u
        return sum((max(0, min(u1 - s.a1, u2 - s.a2, s.length)) for s in self.segments), BigRational(0))

    def evaluate_many(self, points):
        a1, a2, length = (np.array([float(getattr(s, name)) for s in self.segments])
                          for name in ("a1", "a2", "length"))
        clamped = np.minimum(np.minimum(points[:, :1] - a1, points[:, 1:2] - a2), length)
        return np.clip(clamped, 0, None).sum(axis=1)

    def sample(self, rng, size):
        t = rng.random(size)
        starts = np.array([float(s.a1) for s in self.segments])
        offsets = np.array([float(s.offset) for s in self.segments])
        index = np.searchsorted(starts, t, side="right") - 1
        return np.column_stack([t, t + offsets[index]])

    def order_cdf(self, x):
        raise UnsupportedModelError(_("The order transform of a shuffle has no closed form distribution function."))

    def order_cdf_many(self, points):
        self.order_cdf(None)

    def __str__(self):
        return "shuffleM:" + "; ".join(map(str, self.segments))


@attr.s(frozen=True, slots=True)
class Mixture:
    """
    A convex combination ``Σ w_i C_i`` of copulas of one dimension.

    :raises ordertau.MalformedModelError: if the weights are not positive rationals summing to 1 or the
        components differ in dimension
    """
    weights = attr.ib(converter=lambda weights: tuple(BigRational(w) for w in weights))
    components = attr.ib(converter=tuple)

    def __attrs_post_init__(self):
        if len(self.weights) != len(self.components) or not self.components:
            raise MalformedModelError(_("A mixture needs one weight per component."))
        if any(w <= 0 for w in self.weights) or sum(self.weights) != 1:
            raise MalformedModelError(_("Mixture weights have to be positive and sum to 1, got {}.")
                                      .format(", ".join(map(str, self.weights))))
        if len({c.d for c in self.components}) != 1:
            raise MalformedModelError(_("All components of a mixture need the same dimension."))

    @property
    def d(self):
        return self.components[0].d

    def evaluate(self, u):
        return sum(w * c.evaluate(u) for w, c in zip(self.weights, self.components))

    def evaluate_many(self, points):
        return sum(float(w) * c.evaluate_many(points) for w, c in zip(self.weights, self.components))

    def sample(self, rng, size):
        choice = rng.random(size)
        cumulative = np.cumsum([float(w) for w in self.weights])
        index = np.minimum(np.searchsorted(cumulative, choice, side="right"), len(self.components) - 1)
        draws = np.stack([c.sample(rng, size) for c in self.components])
        return draws[index, np.arange(size)]

    def order_cdf(self, x):
        return sum(w * c.order_cdf(x) for w, c in zip(self.weights, self.components))

    def order_cdf_many(self, points):
        return sum(float(w) * c.order_cdf_many(points) for w, c in zip(self.weights, self.components))

    def __str__(self):
        return "mix:" + "+".join(f"{w}*{c}" for w, c in zip(self.weights, self.components))


def sample(model, rng):
    """One draw from the copula measure of ``model``."""
    return tuple(float(x) for x in model.sample(rng, 1)[0])


def order_transform_point(x):
    """The coordinates of ``x`` sorted nondecreasingly."""
    return tuple(sorted(x))


def order_transform(points):
    """Sort every row of an ``(n, d)`` array."""
    return np.sort(points, axis=1, kind="stable")


def eval_copula(model, u):
    """
    ``C(u)``, exact for rational ``u``.

    :raises ordertau.DimensionError: if ``u`` does not have ``model.d`` coordinates
    :raises ordertau.DomainError: if ``u`` is not in the unit cube

    Example usage::

        from fractions import Fraction
        from ordertau.copulas import eval_copula, parse_model

        print(eval_copula(parse_model("D"), (Fraction(3, 8), Fraction(1, 2))))  # 3/16

    """
    u = _unit_point(u, model.d)
    return model.evaluate(u)


def order_cdf(model, x):
    """
    ``H^C_T(x) = P(T(U) <= x)`` for ``U`` drawn from ``model``, exact for rational ``x``.

    :raises ordertau.UnsupportedModelError: for shuffles
    """
    x = _unit_point(x, model.d)
    return model.order_cdf(x)


def d_order_cdf(x1, x2):
    """``H^D_T`` for ``D = (M + W)/2``: ``min(x1, x2)/2 + (F(2 x1) + (2 F(x2) - 1)^+ - 1)^+ / 2``, ``F`` clamping to [0, 1]."""
    x1, x2 = _unit_point((x1, x2), 2)
    half = BigRational(1, 2)
    return half * min(x1, x2) + half * FrechetW().order_cdf((x1, x2))


def eval_D_order_transform(u1, u2):
    """
    ``D_T(u1, u2)`` for ``D = (M + W)/2``: :func:`d_order_cdf` at the inverted margins of ``T(U)``,
    ``G_1^{-1}(u) = 2u/3`` for ``u <= 3/4`` else ``2u - 1`` and ``G_2^{-1}(u) = 2u`` for ``u <= 1/4`` else
    ``(2u + 1)/3``.

    Example usage::

        from fractions import Fraction
        from ordertau.copulas import eval_D_order_transform

        print(eval_D_order_transform(Fraction(3, 8), Fraction(1, 2)))  # 1/8

    """
    u1, u2 = _unit_point((u1, u2), 2)
    if u1 == 0 or u2 == 0:
        return 0
    if u1 == 1:
        return u2
    if u2 == 1:
        return u1
    x1 = 2 * u1 / 3 if u1 <= BigRational(3, 4) else 2 * u1 - 1
    x2 = 2 * u2 if u2 <= BigRational(1, 4) else (2 * u2 + 1) / 3
    return d_order_cdf(x1, x2)


def shuffle_self_bracket(model):
    """``[C, C] = ∫ C dQ^C`` for a shuffle, exactly."""
    return _integrate_along_support(_as_shuffle(model), diagonal=False)


def shuffle_diagonal_term(model):
    """``∫ C(min(u1, u2), min(u1, u2)) dQ^C(u)`` for a shuffle, exactly."""
    return _integrate_along_support(_as_shuffle(model), diagonal=True)


def bracket_shuffle_exact(model):
    """
    ``[C_T, C_T] = 2 [C, C] - ∫ C(min, min) dQ^C`` for an exchangeable shuffle.

    :raises ordertau.AsymmetricShuffleError: if ``C(u1, u2) != C(u2, u1)`` somewhere on a rational grid

    Example usage::

        from ordertau.copulas import bracket_shuffle_exact, parse_model

        print(bracket_shuffle_exact(parse_model("B")))  # 3/8

    """
    shuffle = _as_shuffle(model)
    grid = [BigRational(i, SYMMETRY_GRID - 1) for i in range(SYMMETRY_GRID)]
    for u1 in grid:
        for u2 in grid:
            if shuffle.evaluate((u1, u2)) != shuffle.evaluate((u2, u1)):
                raise AsymmetricShuffleError(_("{} is not exchangeable: C({}, {}) != C({}, {}).")
                                             .format(shuffle, u1, u2, u2, u1))
    return 2 * shuffle_self_bracket(shuffle) - shuffle_diagonal_term(shuffle)


def check_worked_examples():
    """
    Check the exact values of the bundled models: the brackets of the shuffles ``A <= B`` and their order
    transforms, which reverse the concordance order (``κ[A_T] > κ[B_T]``), and ``D_T < D`` at ``(3/8, 1/2)``.
    """
    report = Report(_("worked examples"))
    A, B, D = parse_model("A"), parse_model("B"), parse_model("D")
    expected = {"A": (BigRational(1, 4), BigRational(1, 2)), "B": (BigRational(5, 16), BigRational(3, 8))}
    for name, model in (("A", A), ("B", B)):
        bracket, bracket_t = expected[name]
        report.add(Check.compare(f"[{name},{name}]", shuffle_self_bracket(model), bracket))
        report.add(Check.compare(f"[{name}_T,{name}_T]", bracket_shuffle_exact(model), bracket_t))

    grid = [BigRational(i, SYMMETRY_GRID - 1) for i in range(SYMMETRY_GRID)]
    report.add(Check.holds("A <= B pointwise", all(A.evaluate((u1, u2)) <= B.evaluate((u1, u2))
                                                    for u1 in grid for u2 in grid)))
    kappa_a = kappa_from_bracket(bracket_shuffle_exact(A), 2)
    kappa_b = kappa_from_bracket(bracket_shuffle_exact(B), 2)
    report.add(Check.holds("κ[A_T] > κ[B_T]", kappa_a > kappa_b, f"{kappa_a} > {kappa_b}"))

    point = (BigRational(3, 8), BigRational(1, 2))
    value, value_t = eval_copula(D, point), eval_D_order_transform(*point)
    report.add(Check.compare("D(3/8,1/2)", value, BigRational(3, 16)))
    report.add(Check.compare("D_T(3/8,1/2)", value_t, BigRational(1, 8)))
    report.add(Check.holds("D_T(3/8,1/2) < D(3/8,1/2)", value_t < value, f"{value_t} < {value}"))
    return report


def parse_segments(text):
    """
    Parse ``"a1 a2 b1 b2; a1 a2 b1 b2; ..."`` with exact rationals such as ``1/4``.

    :raises ordertau.MalformedModelError: for decimals or a wrong number of coordinates
    """
    segments = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        coordinates = [_parse_rational(part) for part in chunk.split()]
        if len(coordinates) != 4:
            raise MalformedModelError(_("A segment needs four coordinates a1 a2 b1 b2, got \"{}\".")
                                      .format(chunk.strip()))
        segments.append(Segment(*coordinates))
    return ShuffleOfM(segments)


def parse_model(spec):
    """
    Build a model from its textual spec.

    * ``product:<d>``, ``frechetM:<d>``, ``frechetW``
    * ``shuffleM:<name>`` for a bundled shuffle, or ``shuffleM:<a1 a2 b1 b2; ...>``
    * ``mix:<w>*<spec>+<w>*<spec>+...`` with rational weights; terminating decimals such as ``0.5`` are read exactly
    * the aliases ``M`` (``frechetM:2``), ``W``, ``Pi`` (``product:2``), ``A``, ``B`` and ``D = (M + W)/2``

    :raises ordertau.MalformedModelError: for anything else; ``payload["name"]`` holds the unknown family
        and ``payload["choices"]`` the known ones
    """
    spec = spec.strip()
    presets = get_presets()

    if spec in ("M", "W", "Pi"):
        return {"M": FrechetM(2), "W": FrechetW(), "Pi": Product(2)}[spec]
    if spec in presets.get("shuffles", {}):
        return parse_segments(presets["shuffles"][spec].value)
    if spec in presets.get("mixtures", {}):
        return parse_model("mix:" + presets["mixtures"][spec].value)

    family, _sep, argument = spec.partition(":")
    family, argument = family.strip(), argument.strip()

    if family in ("product", "frechetM"):
        try:
            d = int(argument)
        except ValueError:
            raise MalformedModelError(_("{} needs an integer dimension, got \"{}\".").format(family, argument))
        return Product(d) if family == "product" else FrechetM(d)

    if family == "frechetW":
        if argument and argument != "2":
            raise MalformedModelError(_("frechetW is a copula only in dimension 2."))
        return FrechetW()

    if family == "shuffleM":
        if argument in presets.get("shuffles", {}):
            return parse_segments(presets["shuffles"][argument].value)
        return parse_segments(argument)

    if family == "mix":
        weights, components = [], []
        for term in argument.split("+"):
            weight, star, component = (part.strip() for part in term.partition("*"))
            if not star:
                raise MalformedModelError(_("A mixture term has the form <weight>*<model>, got \"{}\".").format(term))
            weights.append(BigRational(weight) if _DECIMAL.match(weight) else _parse_rational(weight))
            if component.startswith("mix:"):
                raise MalformedModelError(_("Mixtures cannot be nested."))
            components.append(parse_model(component))
        return Mixture(weights, components)

    error = MalformedModelError(_("Unknown model \"{}\".").format(spec))
    error.payload.update(name=family, choices=list(MODEL_FAMILIES + ALIASES) + sorted(presets.get("shuffles", {})))
    raise error


def _integrate_along_support(shuffle, diagonal):
    """
    Integrate ``C(t, t + c)`` (or ``C(m, m)`` with ``m = min(t, t + c)``) along every segment ``{(t, t + c)}``.
    Both integrands are linear between the projections of all segment endpoints, so the midpoint rule
    on each piece is exact.
    """
    corners = {x for s in shuffle.segments for x in (s.a1, s.a2, s.b1, s.b2)}
    total = BigRational(0)
    for segment in shuffle.segments:
        c = segment.offset
        cuts = {segment.a1, segment.b1}
        cuts |= {x - c for x in corners} | {x - min(c, 0) for x in corners}
        cuts = sorted(x for x in cuts if segment.a1 <= x <= segment.b1)
        for left, right in zip(cuts, cuts[1:]):
            t = (left + right) / 2
            if diagonal:
                m = min(t, t + c)
                value = shuffle.evaluate((m, m))
            else:
                value = shuffle.evaluate((t, t + c))
            total += (right - left) * value
    return total


def _as_shuffle(model):
    if not isinstance(model, ShuffleOfM):
        raise UnsupportedModelError(_("{} is not a shuffle of M.").format(model))
    return model


def _parse_rational(text):
    text = text.strip()
    if not _RATIONAL.match(text):
        raise MalformedModelError(_("\"{}\" is not an exact rational such as 3/8; decimals are not accepted.")
                                  .format(text))
    return BigRational(text)


def _clamp(value):
    return min(max(value, 0), 1)


def _running_min_from_right(x):
    result = list(x)
    for i in range(len(result) - 2, -1, -1):
        result[i] = min(result[i], result[i + 1])
    return result


def _unit_point(u, d):
    u = tuple(u)
    if len(u) != d:
        raise DimensionError(_("Expected a point with {} coordinates, got {}.").format(d, len(u)),
                             expected=d, actual=len(u))
    if any(not 0 <= x <= 1 for x in u):
        raise DomainError(_("{} is not in the unit cube.").format(", ".join(map(str, u))))
    return u
