import sys
import unittest
from fractions import Fraction
from importlib.resources import files

import ordertau
import ordertau._errors
import ordertau.config


class TestPresetLoader(unittest.TestCase):
    def test_no_section(self):
        with self.assertRaises(ordertau._errors.MissingSectionError):
            ordertau.config.PresetLoader().load("")

    def test_falsy_section(self):
        with self.assertRaises(ordertau._errors.MissingSectionError):
            ordertau.config.PresetLoader().load("ordertau: false")

    def test_missing_section_is_invalid_config(self):
        with self.assertRaises(ordertau._errors.InvalidConfigError):
            ordertau.config.PresetLoader().load("other:\n  foo: bar")

    def test_not_a_mapping(self):
        with self.assertRaises(ordertau._errors.InvalidConfigError):
            ordertau.config.PresetLoader().load("ordertau:\n  - foo")

    def test_invalid_yaml(self):
        with self.assertRaises(ordertau._errors.InvalidConfigError):
            ordertau.config.PresetLoader().load("ordertau: [foo")

    def test_untagged(self):
        content = \
            "ordertau:\n" \
            "  tables:\n" \
            "    - [2, 2]"
        presets = ordertau.config.PresetLoader().load(content)
        self.assertEqual(presets, {"tables": [[2, 2]]})

    def test_local_tag(self):
        content = \
            "ordertau:\n" \
            "  shuffles:\n" \
            "    M: !segments 0 0 1 1"
        loader = ordertau.config.PresetLoader()
        loader.scope("shuffles", "segments")
        presets = loader.load(content)
        self.assertEqual(presets["shuffles"]["M"], ordertau.config.TaggedValue("0 0 1 1", "!segments"))
        self.assertEqual(presets["shuffles"]["M"].tag, "segments")

    def test_misplaced_tag(self):
        content = \
            "ordertau:\n" \
            "  mixtures:\n" \
            "    M: !segments 0 0 1 1"
        loader = ordertau.config.PresetLoader()
        loader.scope("shuffles", "segments")
        with self.assertRaises(ordertau._errors.InvalidConfigError):
            loader.load(content)

    def test_unknown_tag(self):
        content = \
            "ordertau:\n" \
            "  shuffles:\n" \
            "    M: !INVALID 0 0 1 1"
        loader = ordertau.config.PresetLoader()
        loader.scope("shuffles", "segments")
        with self.assertRaises(ordertau._errors.InvalidConfigError):
            loader.load(content)

    def test_nested_tags(self):
        content = \
            "ordertau:\n" \
            "  tables:\n" \
            "    lower_tail:\n" \
            "      - [2, 2, !rational 315/945]"
        loader = ordertau.config.PresetLoader()
        loader.scope("tables", "!rational")
        presets = loader.load(content)
        d, k, value = presets["tables"]["lower_tail"][0]
        self.assertEqual((d, k), (2, 2))
        self.assertEqual(value.tag, "rational")
        self.assertEqual(value.value, "315/945")

    def test_other_section(self):
        content = \
            "ordertau:\n" \
            "  shuffles:\n" \
            "    M: !segments 0 0 1 1\n" \
            "custom:\n" \
            "  shuffles:\n" \
            "    W: !segments 0 1 1 0"
        loader = ordertau.config.PresetLoader("custom")
        loader.scope("shuffles", "segments")
        presets = loader.load(content)
        self.assertEqual(list(presets["shuffles"]), ["W"])


class TestBundledPresets(unittest.TestCase):
    def test_sections(self):
        presets = ordertau.config.get_presets()
        self.assertEqual(sorted(presets["shuffles"]), ["A", "B"])
        self.assertEqual(presets["mixtures"]["D"].tag, "mixture")

    def test_cached(self):
        self.assertIs(ordertau.config.get_presets(), ordertau.config.get_presets())

    def test_lower_tail_reference(self):
        reference = ordertau.config.lower_tail_reference()
        self.assertEqual(len(reference), 10)
        self.assertEqual(reference[5, 4], Fraction(345, 945))
        self.assertEqual(reference[3, 2], Fraction(378, 945))
        self.assertEqual(reference[2, 2], Fraction(1, 3))

    def test_no_message_catalogs(self):
        self.assertFalse(files("ordertau").joinpath("locale").is_dir())
        self.assertEqual(ordertau._("closed forms"), "closed forms")


if __name__ == '__main__':
    suite = unittest.TestLoader().loadTestsFromModule(sys.modules[__name__])
    unittest.TextTestRunner(verbosity=2).run(suite)
