"""
Machine-readable output: :class:`OutputRecord` for every command, and the :class:`Check`/:class:`Report`
types the verification suites return.

Rationals are always written as ``"p/q"`` strings (``"1/1"`` included) so that they parse back losslessly.
Floats are written with :data:`FLOAT_DIGITS` significant digits.
"""

import csv
import io
import json
import re

import attr

from . import _
from ._errors import Error
from .exact import BigRational

__all__ = ["FLOAT_DIGITS", "KINDS", "Check", "Report", "OutputRecord", "format_rational"]

#: Significant digits of floats in output.
FLOAT_DIGITS = 10

KINDS = ("exact", "estimate", "table", "verify")

_RATIONAL = re.compile(r"^-?\d+/\d+$")


def format_rational(value):
    """``"p/q"``, reduced, with a positive denominator."""
    value = BigRational(value)
    return f"{value.numerator}/{value.denominator}"


@attr.s(frozen=True, slots=True)
class Check:
    """The outcome of one verification check."""
    name = attr.ib()
    status = attr.ib(validator=attr.validators.in_(("pass", "fail", "skip")))
    detail = attr.ib(default="")

    @classmethod
    def compare(cls, name, actual, expected):
        """Pass iff ``actual == expected``."""
        if actual == expected:
            return cls(name, "pass", f"{actual}")
        return cls(name, "fail", f"{actual} != {expected}")

    @classmethod
    def holds(cls, name, condition, detail=""):
        return cls(name, "pass" if condition else "fail", detail)

    @classmethod
    def skip(cls, name, reason):
        return cls(name, "skip", reason)

    def to_payload(self):
        return {"name": self.name, "status": self.status, "detail": self.detail}


@attr.s(slots=True)
class Report:
    """
    A named list of :class:`Check` s. A report passes iff none of its checks failed; skipped checks do not fail it.
    """
    title = attr.ib()
    checks = attr.ib(factory=list)

    def add(self, check):
        self.checks.append(check)
        return check

    def extend(self, other):
        """Add every check of another report, prefixing its names with that report's title."""
        for check in other.checks:
            self.checks.append(attr.evolve(check, name=f"{other.title}: {check.name}"))

    @property
    def passed(self):
        return not self.failures

    @property
    def failures(self):
        return [check for check in self.checks if check.status == "fail"]

    def to_payload(self):
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [check.to_payload() for check in self.checks]
        }


@attr.s(frozen=True, slots=True)
class OutputRecord:
    """
    The result of one command.

    :ivar str kind: one of ``exact``, ``estimate``, ``table`` or ``verify``
    :ivar dict payload: structured data; may hold rationals, floats, strings, bools, lists and dicts

    Example usage::

        from fractions import Fraction
        from ordertau.records import OutputRecord

        record = OutputRecord("exact", {"value": Fraction(47, 252)})
        print(record.to_json())  # {"kind": "exact", "payload": {"value": "47/252"}}

    """
    kind = attr.ib(validator=attr.validators.in_(KINDS))
    payload = attr.ib(factory=dict)

    def to_json(self):
        return json.dumps({"kind": self.kind, "payload": _encode(self.payload)})

    @classmethod
    def from_json(cls, text):
        """Parse :meth:`to_json` output; ``"p/q"`` strings become rationals again."""
        try:
            data = json.loads(text)
            return cls(data["kind"], _decode(data["payload"]))
        except (ValueError, KeyError, TypeError):
            raise Error(_("Not a valid output record: {}").format(text))

    def to_csv(self):
        """
        A ``key,value,type`` CSV with one row per leaf of the payload. Nested keys are joined with dots and
        list positions are written as ``[i]``, so ``checks[0].name`` is the name of the first check.

        A table payload ``{"rows": [...], ...}`` of flat rows is written as a regular table instead; its other
        scalar entries become leading ``record.<key>`` columns and ``None`` becomes an empty cell.
        """
        stream = io.StringIO()
        writer = csv.writer(stream, lineterminator="\n")
        if self._is_flat_table():
            scalars = {key: value for key, value in self.payload.items() if key != "rows"}
            header = list(self.payload["rows"][0])
            writer.writerow([_RECORD_PREFIX + key for key in scalars] + header)
            for row in self.payload["rows"]:
                writer.writerow([_cell(value) for value in scalars.values()] + [_cell(row[key]) for key in header])
        else:
            writer.writerow(_KEY_VALUE_HEADER)
            writer.writerow(["kind", self.kind, "str"])
            for key, value in _flatten(self.payload):
                writer.writerow([key, *_typed(value)])
        return stream.getvalue()

    @classmethod
    def from_csv(cls, text):
        """
        Parse :meth:`to_csv` output, either form, back into the record.

        :raises ordertau.Error: if text is neither form
        """
        rows = list(csv.reader(io.StringIO(text)))
        try:
            header, *body = rows
            if header == _KEY_VALUE_HEADER:
                (first, kind, _kind_type), *items = body
                if first != "kind":
                    raise ValueError(first)
                payload = {}
                for key, value, type_ in items:
                    _insert(payload, key, _PARSERS[type_](value))
                return cls(kind, payload)

            if not body:
                raise ValueError(header)
            payload = {column[len(_RECORD_PREFIX):]: _uncell(cell)
                       for column, cell in zip(header, body[0]) if column.startswith(_RECORD_PREFIX)}
            payload["rows"] = [{column: _uncell(cell) for column, cell in zip(header, row)
                                if not column.startswith(_RECORD_PREFIX)} for row in body]
            return cls("table", payload)
        except (ValueError, KeyError, TypeError):
            raise Error(_("Not a CSV output record."))

    def _is_flat_table(self):
        rows = self.payload.get("rows")
        if self.kind != "table" or not rows or not all(isinstance(row, dict) for row in rows):
            return False
        header = list(rows[0])
        return (all(list(row) == header for row in rows)
                and not any(isinstance(value, (dict, list, tuple))
                            for row in rows for value in row.values())
                and not any(isinstance(value, (dict, list, tuple))
                            for key, value in self.payload.items() if key != "rows"))


_KEY_VALUE_HEADER = ["key", "value", "type"]

_RECORD_PREFIX = "record."

_PATH = re.compile(r"([^.\[\]]+)|\[(\d+)\]")

_PARSERS = {
    "null": lambda text: None,
    "bool": lambda text: {"True": True, "False": False}[text],
    "rational": BigRational,
    "int": int,
    "float": float,
    "str": str,
    "list": lambda text: [],
    "dict": lambda text: {}
}


def _encode(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, BigRational):
        return format_rational(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return float(f"{value:.{FLOAT_DIGITS}g}")
    if isinstance(value, dict):
        return {str(key): _encode(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(val) for val in value]
    if hasattr(value, "item"):
        return _encode(value.item())
    return str(value)


def _decode(value):
    if isinstance(value, dict):
        return {key: _decode(val) for key, val in value.items()}
    if isinstance(value, list):
        return [_decode(val) for val in value]
    if isinstance(value, str) and _RATIONAL.match(value):
        return BigRational(value)
    return value


def _typed(value):
    """``(cell, type)`` of a leaf."""
    if value is None:
        return "", "null"
    if isinstance(value, bool):
        return str(value), "bool"
    if isinstance(value, BigRational):
        return format_rational(value), "rational"
    if isinstance(value, int):
        return str(value), "int"
    if isinstance(value, float):
        return repr(_encode(value)), "float"
    if isinstance(value, (list, tuple)):
        return "", "list"
    if isinstance(value, dict):
        return "", "dict"
    if hasattr(value, "item"):
        return _typed(value.item())
    return str(value), "str"


def _cell(value):
    return "" if value is None else _encode(value)


def _uncell(text):
    if text == "":
        return None
    if _RATIONAL.match(text):
        return BigRational(text)
    if text in ("True", "False"):
        return text == "True"
    for parse in (int, float):
        try:
            return parse(text)
        except ValueError:
            pass
    return text


def _flatten(value, prefix=""):
    """``(path, leaf)`` pairs; empty containers are leaves."""
    if isinstance(value, dict) and (value or not prefix):
        for key, val in value.items():
            yield from _flatten(val, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(value, (list, tuple)) and value:
        for i, val in enumerate(value):
            yield from _flatten(val, f"{prefix}[{i}]")
    else:
        yield prefix, value


def _insert(root, path, value):
    """Set the leaf at ``path`` (as written by :func:`_flatten`), creating dicts and lists on the way."""
    steps = [name if name else int(index) for name, index in _PATH.findall(path)]
    if not steps:
        raise ValueError(path)
    node = root
    for step, following in zip(steps, steps[1:]):
        child = [] if isinstance(following, int) else {}
        if isinstance(node, list):
            node.extend([None] * (step + 1 - len(node)))
            if node[step] is None:
                node[step] = child
            node = node[step]
        else:
            node = node.setdefault(step, child)
    last = steps[-1]
    if isinstance(node, list):
        node.extend([None] * (last + 1 - len(node)))
    node[last] = value
