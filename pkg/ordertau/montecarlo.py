"""
Monte Carlo estimation of brackets, Kendall's tau and Kendall's distribution function, with and without the
order transform, and a statistical check of the ordering results for order transforms.

Samples are drawn in chunks of :data:`CHUNK_SIZE`. Chunk ``i`` draws from a ``numpy.random.Generator`` seeded with
the ``i``-th child of ``numpy.random.SeedSequence(seed)``, and only integer counts leave a chunk, so estimates are
bit-identical for every number of threads.
"""

import logging
import math

import attr
import numpy as np
from joblib import Parallel, delayed

from . import _
from ._errors import AsymmetricShuffleError, DomainError, UnsupportedModelError
from .copulas import FrechetM, Product, ShuffleOfM, bracket_shuffle_exact, order_transform, shuffle_self_bracket
from .product import MAX_CLOSED_FORM_DIMENSION, SubsetK, kappa_product_order
from .records import Check, Report

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

__all__ = ["CHUNK_SIZE", "MIN_SAMPLES", "VALUE_TOLERANCE", "INEQUALITY_TOLERANCE", "DEFAULT_GRID", "TRANSFORMS",
           "Estimate", "KendallCurve", "estimate_bracket", "estimate_kendall_curve", "verify_order_theorems"]

#: Sample pairs per chunk.
CHUNK_SIZE = 8192

#: Smallest number of sample pairs an estimate is based on.
MIN_SAMPLES = 1000

#: Standard errors allowed between an estimate and a known value.
VALUE_TOLERANCE = 4

#: Standard errors allowed on the wrong side of a one-sided inequality.
INEQUALITY_TOLERANCE = 3

DEFAULT_GRID = tuple(k / 20 for k in range(1, 21))

TRANSFORMS = ("none", "order")


@attr.s(frozen=True, slots=True)
class Estimate:
    """
    A Monte Carlo estimate of a bracket ``[C, C]``.

    :ivar float value: the fraction of pairs ``(U, V)`` with ``V <= U`` in every compared coordinate
    :ivar float std_error: the binomial standard error of ``value``
    :ivar int n: the number of pairs
    :ivar int seed: the seed of the root ``SeedSequence``
    :ivar str transform: ``none`` or ``order``
    :ivar margin: the compared coordinates, ``None`` for all of them
    :ivar int dimension: the dimension of the model
    """
    value = attr.ib()
    std_error = attr.ib()
    n = attr.ib()
    seed = attr.ib()
    transform = attr.ib()
    margin = attr.ib(default=None)
    dimension = attr.ib(default=2)

    def kappa(self):
        """
        Kendall's tau with ``m = |K|`` (or ``d``) compared coordinates, and its standard error.

        :return: ``(κ̂, standard error)``
        :type: tuple of float
        """
        m = len(self.margin) if self.margin is not None else self.dimension
        scale = 2 ** m / (2 ** (m - 1) - 1)
        return (2 ** m * self.value - 1) / (2 ** (m - 1) - 1), scale * self.std_error

    def to_payload(self):
        kappa, kappa_error = self.kappa()
        return {
            "value": self.value,
            "std_error": self.std_error,
            "kappa": kappa,
            "kappa_std_error": kappa_error,
            "n": self.n,
            "seed": self.seed,
            "transform": self.transform,
            "margin": str(self.margin) if self.margin is not None else None
        }


@attr.s(frozen=True, slots=True)
class KendallCurve:
    """Empirical values of Kendall's distribution function ``K(t) = P(C(U) <= t)`` on a grid."""
    grid = attr.ib(converter=tuple)
    values = attr.ib(converter=tuple)
    std_errors = attr.ib(converter=tuple)
    n = attr.ib()

    def to_payload(self):
        return {
            "n": self.n,
            "points": [{"t": t, "value": value, "std_error": error}
                       for t, value, error in zip(self.grid, self.values, self.std_errors)]
        }


def estimate_bracket(model, n, seed, transform="none", K=None, threads=1):
    """
    Estimate ``[C, C] = P(V <= U)`` from ``n`` disjoint pairs of independent draws ``U, V``.

    :param model: the copula
    :param n: the number of pairs, at least :data:`MIN_SAMPLES`
    :type n: int
    :param seed: the seed
    :type seed: int
    :param transform: ``order`` sorts every draw before comparing
    :type transform: str
    :param K: compare only these coordinates, giving the bracket of the margin ``ρ_K``
    :type K: ordertau.product.SubsetK or iterable of int, optional
    :param threads: worker threads, at least 1
    :type threads: int
    :return: the estimate
    :type: ordertau.montecarlo.Estimate

    Example usage::

        from ordertau.copulas import Product
        from ordertau.montecarlo import estimate_bracket

        estimate = estimate_bracket(Product(5), 100000, seed=7, transform="order", K=[1, 2, 3, 5])
        print(estimate.value, estimate.std_error)  # about 47/252

    """
    _check_arguments(n, seed, transform, threads)
    if K is not None and not isinstance(K, SubsetK):
        K = SubsetK(model.d, K)
    if K is not None and K.d != model.d:
        raise DomainError(_("K = {} is a margin of dimension {}, the model has dimension {}.")
                          .format(K, K.d, model.d))
    columns = [k - 1 for k in K.members] if K is not None else slice(None)

    def count(rng, size):
        u = model.sample(rng, size)
        v = model.sample(rng, size)
        if transform == "order":
            u, v = order_transform(u), order_transform(v)
        return int(np.count_nonzero(np.all(v[:, columns] <= u[:, columns], axis=1)))

    logger.info("estimating the bracket of %s (transform %s, K %s) from %d pairs", model, transform, K, n)
    hits = sum(_run_chunks(count, n, seed, threads))
    p = hits / n
    return Estimate(p, math.sqrt(p * (1 - p) / n), n, int(seed), transform, K, model.d)


def estimate_kendall_curve(model, n, seed, transform="none", grid=DEFAULT_GRID, threads=1):
    """
    Estimate Kendall's distribution function of ``C`` (or of ``C_T``) on ``grid``.

    For ``transform="order"`` the statistic is ``H^C_T(T(U))``, which needs a closed form ``H^C_T``.

    :raises ordertau.UnsupportedModelError: if the model has no closed form for the requested transform
    :raises ordertau.DomainError: if the grid is not increasing within ``[0, 1]``
    """
    _check_arguments(n, seed, transform, threads)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or not len(grid) or np.any(np.diff(grid) <= 0) or grid[0] < 0 or grid[-1] > 1:
        raise DomainError(_("The grid has to be an increasing sequence in [0, 1]."))

    if transform == "order":
        def statistic(points):
            return model.order_cdf_many(order_transform(points))
    else:
        statistic = model.evaluate_many

    # fail before any sampling
    statistic(np.zeros((0, model.d)))

    def count(rng, size):
        values = np.clip(statistic(model.sample(rng, size)), 0, 1)
        return np.count_nonzero(values[:, None] <= grid[None, :], axis=0).astype(np.int64)

    logger.info("estimating Kendall's distribution function of %s (transform %s) from %d draws", model, transform, n)
    counts = sum(_run_chunks(count, n, seed, threads))
    values = np.asarray(counts, dtype=float) / n
    errors = np.sqrt(values * (1 - values) / n)
    return KendallCurve([float(t) for t in grid], [float(v) for v in values], [float(e) for e in errors], n)


def verify_order_theorems(model, n, seed, grid=DEFAULT_GRID, threads=1, tolerance=INEQUALITY_TOLERANCE,
                          value_tolerance=VALUE_TOLERANCE):
    """
    Check statistically that ordering a copula can only raise its concordance:

    * ``K_{C_T}(t) <= K_C(t)`` on every grid point, where both curves have a closed form statistic,
    * ``κ[C] <= κ[C_T]``,

    each up to ``tolerance`` combined standard errors, and compare with known exact values where there are some
    (product copula, ``M`` and exchangeable shuffles) up to ``value_tolerance`` standard errors.

    :return: the report
    :type: ordertau.records.Report
    """
    report = Report(_("order transform of {}").format(model))

    try:
        ordered = estimate_kendall_curve(model, n, seed, "order", grid, threads)
        plain = estimate_kendall_curve(model, n, seed, "none", grid, threads)
    except UnsupportedModelError as e:
        report.add(Check.skip("Kendall's distribution function", str(e)))
    else:
        for t, k, k_t, e, e_t in zip(plain.grid, plain.values, ordered.values, plain.std_errors,
                                     ordered.std_errors):
            bound = k + tolerance * math.hypot(e, e_t)
            report.add(Check.holds(f"K_T({t:g}) <= K({t:g})", k_t <= bound, f"{k_t:.6f} <= {k:.6f}"))

    bracket = estimate_bracket(model, n, seed, "none", threads=threads)
    bracket_t = estimate_bracket(model, n, seed, "order", threads=threads)
    (kappa, error), (kappa_t, error_t) = bracket.kappa(), bracket_t.kappa()
    report.add(Check.holds("κ[C] <= κ[C_T]", kappa <= kappa_t + tolerance * math.hypot(error, error_t),
                           f"{kappa:.6f} <= {kappa_t:.6f}"))

    for name, estimate, expected in _references(model):
        value, error = _pick(bracket, bracket_t, estimate)
        report.add(Check.holds(name, abs(value - float(expected)) <= value_tolerance * error + 1e-12,
                               f"{value:.6f} vs {expected} (std error {error:.2g})"))
    return report


def _pick(bracket, bracket_t, kind):
    """Pick ``κ̂`` or the raw bracket, untransformed or ordered, as named by ``kind``."""
    estimate = bracket_t if kind.endswith("_t") else bracket
    if kind.startswith("kappa"):
        return estimate.kappa()
    return estimate.value, estimate.std_error


def _references(model):
    """``(check name, estimate kind, exact value)`` for models with known values."""
    if isinstance(model, Product):
        yield "κ[Π] = 0", "kappa", 0
        if model.d <= MAX_CLOSED_FORM_DIMENSION:
            yield "κ[Π_T] exact", "kappa_t", kappa_product_order(model.d)
    elif isinstance(model, FrechetM):
        yield "κ[M] = 1", "kappa", 1
        yield "κ[M_T] = 1", "kappa_t", 1
    elif isinstance(model, ShuffleOfM):
        yield "[C,C] exact", "bracket", shuffle_self_bracket(model)
        try:
            yield "[C_T,C_T] exact", "bracket_t", bracket_shuffle_exact(model)
        except AsymmetricShuffleError:
            logger.info("%s is not exchangeable, no exact bracket of its order transform", model)


def _run_chunks(work, n, seed, threads):
    """Run ``work(rng, size)`` on every chunk; the results come back in chunk order."""
    sizes = [CHUNK_SIZE] * (n // CHUNK_SIZE)
    if n % CHUNK_SIZE:
        sizes.append(n % CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    logger.debug("%d chunks on %d threads", len(sizes), threads)
    return Parallel(n_jobs=threads, backend="threading")(
        delayed(work)(np.random.default_rng(child), size) for child, size in zip(children, sizes))


def _check_arguments(n, seed, transform, threads):
    if n < MIN_SAMPLES:
        raise DomainError(_("Monte Carlo estimates need n >= {}, got {}.").format(MIN_SAMPLES, n))
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise DomainError(_("The seed has to be a nonnegative integer, got {}.").format(seed))
    if transform not in TRANSFORMS:
        raise DomainError(_("Unknown transform {}, choose none or order.").format(transform))
    if isinstance(threads, bool) or not isinstance(threads, (int, np.integer)) or threads < 1:
        raise DomainError(_("The number of threads has to be a positive integer, got {}.").format(threads))
