"""
The ``ordertau`` command: exact values, the lower tail table, Monte Carlo estimates and verification suites.

Every command prints one :class:`ordertau.records.OutputRecord` on stdout, diagnostics go to stderr.
Exit codes are 0 (ok), 1 (a verification check failed) and 2 (usage or internal error).
"""

import argparse
import functools
import logging
import os
import sys
import threading
import time

import jellyfish
import termcolor

from . import _
from ._errors import DomainError, Error, InternalConsistencyError, MalformedModelError
from .appendix import check_combinatorial_identities, check_integral_closed_forms, check_polynomial_identities
from .config import lower_tail_reference
from .copulas import check_worked_examples, parse_model
from .montecarlo import (DEFAULT_GRID, INEQUALITY_TOLERANCE, TRANSFORMS, VALUE_TOLERANCE, estimate_bracket,
                         estimate_kendall_curve, verify_order_theorems)
from .product import (MAX_CLOSED_FORM_DIMENSION, SubsetK, bracket_margin, bracket_product, bracket_product_order,
                      check_closed_forms, check_monotonicity, check_reflection, kappa_from_bracket,
                      kappa_lower_tail, kappa_lower_tail_limit, kappa_lower_tail_table, kappa_product_order,
                      kappa_upper_tail, lower_tail_bracket, reflect_subset)
from .records import OutputRecord, Report

logger = logging.getLogger("ordertau")

__all__ = ["ColoredFormatter", "ProgressBar", "SUITES", "WHICH", "main", "cmd_exact", "cmd_table", "cmd_mc",
           "cmd_verify"]

#: Environment variable holding the default seed.
SEED_VARIABLE = "ORDERTAU_SEED"

WHICH = ("kappa-order", "margin", "lower-tail", "upper-tail", "limit", "bracket")

SUITES = ("identities", "integrals", "polynomials", "reflection", "monotonicity", "closed-forms", "examples",
          "order-theorems", "all")

DEFAULT_MODEL = "product:4"
DEFAULT_N = 100000

# Exit codes
OK, CHECK_FAILED, USAGE_ERROR = 0, 1, 2


class ColoredFormatter(logging.Formatter):
    COLORS = {
        "ERROR": "red",
        "WARNING": "yellow",
        "DEBUG": "cyan",
        "INFO": "magenta",
    }

    def __init__(self, fmt, use_color=True):
        super().__init__(fmt=fmt)
        self.use_color = use_color

    def format(self, record):
        msg = super().format(record)
        return msg if not self.use_color else termcolor.colored(msg, getattr(record, "color", self.COLORS.get(record.levelname)))


class ProgressBar:
    """
    A contextmanager that shows a progress bar starting with message on stderr.

    Example usage::

        from ordertau.cli import ProgressBar
        from ordertau.copulas import Product
        from ordertau.montecarlo import estimate_bracket

        with ProgressBar("Sampling product:5"):
            estimate = estimate_bracket(Product(5), 100000, seed=7, transform="order")

    """
    DISABLED = False
    TICKS_PER_SECOND = 2

    def __init__(self, message, output_stream=None):
        if output_stream is None:
            output_stream = sys.stderr

        self._message = message
        self._progressing = False
        self._thread = None
        self._print = functools.partial(print, file=output_stream)

    def stop(self):
        """Stop the progress bar."""
        if self._progressing:
            self._progressing = False
            self._thread.join()

    def __enter__(self):
        def progress_runner():
            self._print(f"{self._message}...", end="", flush=True)
            while self._progressing:
                self._print(".", end="", flush=True)
                time.sleep(1 / ProgressBar.TICKS_PER_SECOND if ProgressBar.TICKS_PER_SECOND else 0)
            self._print()

        if not ProgressBar.DISABLED:
            self._progressing = True
            self._thread = threading.Thread(target=progress_runner, daemon=True)
            self._thread.start()

        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()


def cmd_exact(args):
    """
    Exact values for the order transform of the product copula, selected by ``args.which``.

    For ``margin`` the bracket of the reflected margin is computed too and has to agree.

    :raises ordertau.InternalConsistencyError: if a margin and its reflection disagree
    """
    which = args.which
    payload = {"which": which}

    if which == "limit":
        k = _require(args, "k")
        payload.update(k=k, kappa=kappa_lower_tail_limit(k))
        return OutputRecord("exact", payload)

    d = _require(args, "d")
    payload["d"] = d

    if which == "kappa-order":
        payload.update(bracket=bracket_product_order(d), kappa=kappa_product_order(d))
    elif which == "bracket":
        payload.update(bracket_product=bracket_product(d), bracket_product_order=bracket_product_order(d))
    elif which == "margin":
        K = SubsetK(d, _require(args, "K"))
        mirror = reflect_subset(K)
        bracket, mirror_bracket = bracket_margin(d, K), bracket_margin(d, mirror)
        if bracket != mirror_bracket:
            raise InternalConsistencyError(_("The margins {} and {} have brackets {} and {}.")
                                           .format(K, mirror, bracket, mirror_bracket))
        payload.update(K=str(K), reflected=str(mirror), bracket=bracket, kappa=kappa_from_bracket(bracket, len(K)))
    elif which == "lower-tail":
        k = _require(args, "k")
        payload.update(k=k, bracket=lower_tail_bracket(d, k), kappa=kappa_lower_tail(d, k))
    elif which == "upper-tail":
        k = _require(args, "k")
        payload.update(k=k, kappa=kappa_upper_tail(d, k))
    return OutputRecord("exact", payload)


def cmd_table(args):
    """
    ``κ[ρ_{1..k}(Π_T)]`` for ``2 <= k <= d <= args.d_max``, checked against the bundled reference values.

    :raises ordertau.DomainError: if ``d_max`` is outside ``[2, MAX_CLOSED_FORM_DIMENSION]``
    :raises ordertau.InternalConsistencyError: if a value differs from its reference
    """
    d_max = args.d_max
    if not 2 <= d_max <= MAX_CLOSED_FORM_DIMENSION:
        raise DomainError(_("The table needs 2 <= d-max <= {}, got {}.").format(MAX_CLOSED_FORM_DIMENSION, d_max))

    table = kappa_lower_tail_table(d_max)
    for key, expected in lower_tail_reference().items():
        if key in table and table[key] != expected:
            raise InternalConsistencyError(_("κ at d = {}, k = {} is {}, the reference is {}.")
                                           .format(*key, table[key], expected))

    rows = []
    for (d, k), kappa in sorted(table.items()):
        scaled = kappa * 945
        rows.append({"d": d, "k": k, "kappa": kappa,
                     "over_945": scaled.numerator if scaled.denominator == 1 else None})
    return OutputRecord("table", {"d_max": d_max, "rows": rows})


def cmd_mc(args):
    """A Monte Carlo estimate of the bracket (or, with ``--curve``, of Kendall's distribution function)."""
    model = parse_model(args.model)
    K = SubsetK(model.d, args.K) if args.K is not None else None

    with ProgressBar(_("Sampling {}").format(model)):
        if args.curve:
            curve = estimate_kendall_curve(model, args.n, args.seed, args.transform, args.grid or DEFAULT_GRID,
                                           args.threads)
            payload = {"model": str(model), "seed": args.seed, "transform": args.transform}
            payload.update(curve.to_payload())
        else:
            estimate = estimate_bracket(model, args.n, args.seed, args.transform, K, args.threads)
            payload = {"model": str(model)}
            payload.update(estimate.to_payload())
    return OutputRecord("estimate", payload)


def cmd_verify(args):
    """
    Run a verification suite, or all of them.

    :raises ordertau.DomainError: for an unknown suite, with a suggestion
    """
    suite = args.suite
    if suite not in SUITES:
        raise DomainError(_("Unknown suite {}.").format(suite) + _suggestion(suite, SUITES))

    if suite == "all":
        report = Report(_("all"))
        for name in SUITES[:-1]:
            report.extend(_run_suite(name, args, defaults=True))
    else:
        report = _run_suite(suite, args)

    logger.info("%d checks, %d failed", len(report.checks), len(report.failures))
    payload = {"suite": suite}
    payload.update(report.to_payload())
    return OutputRecord("verify", payload)


COMMANDS = {"exact": cmd_exact, "table": cmd_table, "mc": cmd_mc, "verify": cmd_verify}


def main(argv=None):
    """
    Entry point of the ``ordertau`` console script.

    :param argv: the arguments, ``sys.argv[1:]`` if omitted
    :type argv: list of str, optional
    :return: the exit code
    :type: int
    """
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE_ERROR

    _setup_logging(args.log_level)
    ProgressBar.DISABLED = args.quiet or not sys.stderr.isatty()

    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        record = COMMANDS[args.command](args)
    except MalformedModelError as e:
        logger.error(str(e) + _suggestion(e.payload.get("name"), e.payload.get("choices", ())))
        return USAGE_ERROR
    except Error as e:
        logger.error(str(e))
        return USAGE_ERROR

    print(record.to_csv() if args.format == "csv" else record.to_json(), end="\n" if args.format == "json" else "")
    if record.kind == "verify" and not record.payload["passed"]:
        for check in record.payload["checks"]:
            if check["status"] == "fail":
                logger.warning(_("failed: {} ({})").format(check["name"], check["detail"]))
        return CHECK_FAILED
    return OK


def _run_suite(name, args, defaults=False):
    """Run one suite; with ``defaults`` the bounds given on the command line are ignored."""
    def bound(key, default):
        value = getattr(args, key, None)
        return default if defaults or value is None else value

    if name == "identities":
        return check_combinatorial_identities(n_max=bound("n_max", 12), trials=args.trials, seed=args.seed)
    if name == "integrals":
        return check_integral_closed_forms(n_max=bound("n_max", 10))
    if name == "polynomials":
        return check_polynomial_identities(n_max=bound("n_max", 8))
    if name == "reflection":
        return check_reflection(d_max=bound("d_max", 6))
    if name == "monotonicity":
        return check_monotonicity(d_max=bound("d_max", 7))
    if name == "closed-forms":
        return check_closed_forms(d_max=bound("d_max", 7), reference=lower_tail_reference())
    if name == "examples":
        return check_worked_examples()

    model = parse_model(args.model)
    with ProgressBar(_("Sampling {}").format(model)):
        return verify_order_theorems(model, args.n, args.seed, threads=args.threads, tolerance=args.tolerance,
                                     value_tolerance=args.value_tolerance)


def _require(args, key):
    value = getattr(args, key, None)
    if value is None:
        raise DomainError(_("--which {} needs --{}.").format(args.which, key))
    return value


def _suggestion(name, choices):
    """A "Did you mean" hint for the choice most similar to name."""
    if not name or not choices:
        return ""
    scores = {choice: jellyfish.jaro_winkler_similarity(name, choice) for choice in choices}
    best = max(scores, key=scores.get)
    return " " + _("Did you mean {}?").format(best)


def _default_seed():
    value = os.environ.get(SEED_VARIABLE, "0")
    try:
        seed = int(value)
    except ValueError:
        seed = -1
    if seed < 0:
        raise DomainError(_("{} has to be a nonnegative integer, got {}.").format(SEED_VARIABLE, value))
    return seed


def _setup_logging(level):
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(__name__)
    handler.setFormatter(ColoredFormatter("(%(levelname)s) %(message)s", use_color=sys.stderr.isatty()))
    for existing in [h for h in logger.handlers if h.get_name() == __name__]:
        logger.removeHandler(existing)
    logger.addHandler(handler)
    logger.setLevel(level.upper())


def _subset(text):
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(_("expected comma separated integers such as 1,2,3,5, got {}")
                                         .format(text))


def _grid(text):
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(_("expected comma separated numbers, got {}").format(text))


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help=_("output format (default: json)"))
    common.add_argument("--log-level", default="warning",
                        choices=("debug", "info", "warning", "error"),
                        help=_("level of diagnostics on stderr (default: warning)"))
    common.add_argument("--quiet", action="store_true", help=_("do not show progress"))

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--model", default=DEFAULT_MODEL,
                          help=_("copula, e.g. product:5, frechetM:3, frechetW, shuffleM:A, mix:1/2*M+1/2*W"))
    sampling.add_argument("--n", type=int, default=DEFAULT_N, help=_("number of samples"))
    sampling.add_argument("--seed", type=int, default=None,
                          help=_("seed of the random streams (default: ${} or 0)").format(SEED_VARIABLE))
    sampling.add_argument("--threads", type=int, default=1, help=_("worker threads; results do not depend on it"))

    parser = argparse.ArgumentParser(prog="ordertau",
                                     description=_("Kendall's tau of copulas and their order transforms."))
    subparsers = parser.add_subparsers(dest="command", required=True)

    exact = subparsers.add_parser("exact", parents=[common], help=_("exact values"))
    exact.add_argument("--which", choices=WHICH, required=True)
    exact.add_argument("--d", type=int)
    exact.add_argument("--K", type=_subset, help=_("margin, e.g. 1,2,3,5"))
    exact.add_argument("--k", type=int, help=_("size of the lower or upper tail"))

    table = subparsers.add_parser("table", parents=[common], help=_("the lower tail table"))
    table.add_argument("--d-max", type=int, default=5)

    mc = subparsers.add_parser("mc", parents=[common, sampling], help=_("Monte Carlo estimates"))
    mc.add_argument("--transform", choices=TRANSFORMS, default="none")
    mc.add_argument("--K", type=_subset, help=_("compare only these coordinates"))
    mc.add_argument("--curve", action="store_true", help=_("estimate Kendall's distribution function instead"))
    mc.add_argument("--grid", type=_grid, help=_("points of the curve, e.g. 0.25,0.5,0.75"))

    verify = subparsers.add_parser("verify", parents=[common, sampling], help=_("verification suites"))
    verify.add_argument("--suite", required=True, help=_("one of {}").format(", ".join(SUITES)))
    verify.add_argument("--n-max", type=int)
    verify.add_argument("--d-max", type=int)
    verify.add_argument("--trials", type=int, default=20, help=_("random pairs per n for the identities"))
    verify.add_argument("--tolerance", type=float, default=INEQUALITY_TOLERANCE,
                        help=_("standard errors allowed on the wrong side of an inequality"))
    verify.add_argument("--value-tolerance", type=float, default=VALUE_TOLERANCE,
                        help=_("standard errors allowed between an estimate and an exact value"))
    return parser
