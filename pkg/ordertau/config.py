"""Loading of the bundled ``presets.yml``: named shuffles, mixtures and reference tables."""

import functools
import logging
from importlib.resources import files

import yaml

from . import _
from ._errors import InvalidConfigError, MissingSectionError
from .exact import BigRational

try:
    from yaml import CSafeLoader as SafeLoader
except ImportError:
    from yaml import SafeLoader

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

__all__ = ["TaggedValue", "PresetLoader", "get_presets", "lower_tail_reference"]

#: Top-level section of a preset file.
SECTION = "ordertau"


class TaggedValue:
    """A value tagged in a ``.yml`` file"""
    def __init__(self, value, tag):
        """
        :param value: the tagged value
        :type value: str
        :param tag: the yaml tag, with or without the syntactically required ``!``
        :type tag: str
        """
        self.value = value
        self.tag = tag[1:] if tag.startswith("!") else tag

    def __eq__(self, other):
        if not isinstance(other, TaggedValue):
            return NotImplemented
        return (self.value, self.tag) == (other.value, other.tag)

    def __repr__(self):
        return f"TaggedValue(value={self.value}, tag={self.tag})"


class PresetLoader:
    """
    A loader (parser) for the ``ordertau`` section of a preset file.

    Tags are scoped to a top-level key of the section and may only occur below that key.
    Every tagged scalar becomes a :class:`TaggedValue`; untagged values are plain YAML.

    Example usage::

        from ordertau.config import PresetLoader

        loader = PresetLoader()
        loader.scope("shuffles", "segments")
        presets = loader.load("ordertau:\\n  shuffles:\\n    M: !segments 0 0 1 1\\n")
        print(presets["shuffles"]["M"].tag)  # segments

    """

    class _Tagged:
        """A tagged yaml scalar before validation; remembers where it may legally occur."""
        def __init__(self, value, tag):
            self.value = value
            self.tag = tag
            self.allowed = set()

    def __init__(self, section=SECTION):
        """
        :param section: the top-level key holding the presets
        :type section: str
        """
        self.section = section
        self._scopes = {}

    def scope(self, key, *tags):
        """
        Allow ``tags`` below the top-level ``key`` of the section.

        :param key: the top-level key
        :type key: str
        :param tags: the tags, with or without ``!``
        :type tags: str
        """
        self._scopes.setdefault(key, set()).update(tag.lstrip("!") for tag in tags)

    def load(self, content):
        """
        Parse and validate yaml content.

        :param content: the content of a preset file
        :type content: str
        :return: the section, tagged scalars replaced by :class:`TaggedValue`
        :type: dict
        :raises ordertau.InvalidConfigError: if the content is not valid yaml or a tag is misplaced
        :raises ordertau.MissingSectionError: if the section is missing or empty
        """
        try:
            document = yaml.load(content, Loader=self._loader())
        except yaml.YAMLError:
            raise InvalidConfigError(_("Preset file is not valid yaml."))

        try:
            section = document[self.section]
            assert section
        except (TypeError, KeyError, AssertionError):
            raise MissingSectionError(_("Preset file has no {} section.").format(self.section))

        if not isinstance(section, dict):
            raise InvalidConfigError(_("The {} section has to be a mapping.").format(self.section))

        for key, value in section.items():
            self._allow(value, self._scopes.get(key, set()))
        return self._simplify(section)

    def _loader(self):
        class Loader(SafeLoader):
            pass
        Loader.add_multi_constructor("!", lambda loader, suffix, node: PresetLoader._Tagged(node.value, suffix))
        return Loader

    def _allow(self, value, tags):
        if isinstance(value, dict):
            for item in value.values():
                self._allow(item, tags)
        elif isinstance(value, list):
            for item in value:
                self._allow(item, tags)
        elif isinstance(value, PresetLoader._Tagged):
            value.allowed |= tags

    def _simplify(self, value):
        """Validate tags and replace them by TaggedValue."""
        if isinstance(value, dict):
            return {key: self._simplify(item) for key, item in value.items()}
        if isinstance(value, list):
            return [self._simplify(item) for item in value]
        if isinstance(value, PresetLoader._Tagged):
            if value.tag not in value.allowed:
                raise InvalidConfigError(_("!{} is not a valid tag here.").format(value.tag))
            return TaggedValue(value.value, value.tag)
        return value


@functools.lru_cache(maxsize=None)
def get_presets():
    """
    The bundled presets, loaded once.

    :return: ``{"shuffles": {...}, "mixtures": {...}, "tables": {...}}``
    :type: dict
    """
    loader = PresetLoader()
    loader.scope("shuffles", "segments")
    loader.scope("mixtures", "mixture")
    loader.scope("tables", "rational")
    content = files("ordertau").joinpath("presets.yml").read_text()
    presets = loader.load(content)
    logger.debug("loaded presets %s", ", ".join(sorted(presets)))
    return presets


def lower_tail_reference():
    """
    The bundled reference values of ``κ[ρ_{1..k}(Π_T)]``.

    :return: ``{(d, k): κ}``
    :type: dict
    :raises ordertau.InvalidConfigError: if an entry is not ``[d, k, !rational p/q]``
    """
    reference = {}
    for entry in get_presets().get("tables", {}).get("lower_tail", []):
        try:
            d, k, value = entry
            assert isinstance(value, TaggedValue) and value.tag == "rational"
            reference[int(d), int(k)] = BigRational(value.value)
        except (AssertionError, TypeError, ValueError):
            raise InvalidConfigError(_("Malformed lower tail reference entry {}.").format(entry))
    return reference
