import json
import unittest
from fractions import Fraction

import ordertau._errors
from ordertau.records import Check, OutputRecord, Report, format_rational


class TestFormatRational(unittest.TestCase):
    def test_reduced(self):
        self.assertEqual(format_rational(Fraction(345, 945)), "23/63")

    def test_integer(self):
        self.assertEqual(format_rational(1), "1/1")
        self.assertEqual(format_rational(Fraction(-2, 4)), "-1/2")


class TestCheck(unittest.TestCase):
    def test_compare(self):
        self.assertEqual(Check.compare("x", Fraction(1, 2), Fraction(2, 4)).status, "pass")
        check = Check.compare("x", 1, 2)
        self.assertEqual(check.status, "fail")
        self.assertEqual(check.detail, "1 != 2")

    def test_invalid_status(self):
        with self.assertRaises(ValueError):
            Check("x", "maybe")


class TestReport(unittest.TestCase):
    def test_skip_does_not_fail(self):
        report = Report("r")
        report.add(Check.holds("a", True))
        report.add(Check.skip("b", "no closed form"))
        self.assertTrue(report.passed)
        report.add(Check.holds("c", False))
        self.assertFalse(report.passed)
        self.assertEqual([check.name for check in report.failures], ["c"])

    def test_extend(self):
        inner = Report("inner", [Check.holds("a", True)])
        outer = Report("outer")
        outer.extend(inner)
        self.assertEqual(outer.checks[0].name, "inner: a")
        self.assertEqual(inner.checks[0].name, "a")


class TestOutputRecord(unittest.TestCase):
    def test_rationals_are_strings(self):
        record = OutputRecord("exact", {"bracket": Fraction(47, 252), "kappa": Fraction(125, 441)})
        data = json.loads(record.to_json())
        self.assertEqual(data, {"kind": "exact", "payload": {"bracket": "47/252", "kappa": "125/441"}})

    def test_json_round_trip(self):
        payload = {"d": 5, "bracket": Fraction(47, 252), "value": 0.1875, "passed": True, "margin": None,
                   "rows": [{"k": 2, "kappa": Fraction(4, 9)}]}
        record = OutputRecord("table", payload)
        self.assertEqual(OutputRecord.from_json(record.to_json()), record)

    def test_float_precision(self):
        data = json.loads(OutputRecord("estimate", {"value": 1 / 3}).to_json())
        self.assertEqual(data["payload"]["value"], 0.3333333333)

    def test_csv_key_value(self):
        record = OutputRecord("exact", {"d": 5, "kappa": Fraction(125, 441), "nested": {"a": [1, 2]}})
        lines = record.to_csv().splitlines()
        self.assertEqual(lines[:4], ["key,value,type", "kind,exact,str", "d,5,int", "kappa,125/441,rational"])
        self.assertIn("nested.a[1],2,int", lines)

    def test_csv_round_trip(self):
        record = OutputRecord("exact", {"d": 5, "kappa": Fraction(125, 441), "which": "margin"})
        self.assertEqual(OutputRecord.from_csv(record.to_csv()), record)

    def test_csv_estimate_round_trip(self):
        record = OutputRecord("estimate", {"model": "product:3", "value": 0.2503, "std_error": 0.0013693,
                                           "n": 100000, "seed": 7, "transform": "order", "margin": None})
        parsed = OutputRecord.from_csv(record.to_csv())
        self.assertEqual(parsed, record)
        self.assertIsNone(parsed.payload["margin"])

    def test_csv_verify_round_trip(self):
        report = Report("reflection of margins", [Check.holds("d=3 K={1,2}", True, "1/3, 1/3"),
                                                  Check.skip("n=9 Leibniz", "more than 8 rows")])
        payload = {"suite": "reflection"}
        payload.update(report.to_payload())
        record = OutputRecord("verify", payload)
        parsed = OutputRecord.from_csv(record.to_csv())
        self.assertEqual(parsed, record)
        self.assertEqual(parsed.payload["checks"][1]["status"], "skip")

    def test_csv_curve_round_trip(self):
        record = OutputRecord("estimate", {"n": 5000, "points": [{"t": 0.25, "value": 0.59, "std_error": 0.007},
                                                                 {"t": 0.5, "value": 0.84, "std_error": 0.005}]})
        self.assertEqual(OutputRecord.from_csv(record.to_csv()), record)

    def test_csv_empty_containers(self):
        record = OutputRecord("verify", {"passed": True, "checks": [], "extra": {}})
        self.assertEqual(OutputRecord.from_csv(record.to_csv()), record)

    def test_csv_strings_stay_strings(self):
        record = OutputRecord("exact", {"label": "1/2", "flag": "True"})
        self.assertEqual(OutputRecord.from_csv(record.to_csv()), record)

    def test_csv_table(self):
        record = OutputRecord("table", {"rows": [{"d": 2, "k": 2, "kappa": Fraction(1, 3)},
                                                 {"d": 3, "k": 2, "kappa": Fraction(2, 5)}]})
        self.assertEqual(record.to_csv(), "d,k,kappa\n2,2,1/3\n3,2,2/5\n")
        self.assertEqual(OutputRecord.from_csv(record.to_csv()), record)

    def test_csv_table_round_trip(self):
        record = OutputRecord("table", {"d_max": 6, "rows": [{"d": 5, "k": 4, "kappa": Fraction(23, 63),
                                                              "over_945": 345},
                                                             {"d": 6, "k": 2, "kappa": Fraction(5, 11),
                                                              "over_945": None}]})
        text = record.to_csv()
        self.assertEqual(text.splitlines()[0], "record.d_max,d,k,kappa,over_945")
        self.assertEqual(OutputRecord.from_csv(text), record)

    def test_invalid(self):
        with self.assertRaises(ordertau._errors.Error):
            OutputRecord.from_json("{\"kind\": \"exact\"}")
        with self.assertRaises(ordertau._errors.Error):
            OutputRecord.from_csv("")
        with self.assertRaises(ordertau._errors.Error):
            OutputRecord.from_csv("d,k\n")
        with self.assertRaises(ordertau._errors.Error):
            OutputRecord.from_csv("key,value,type\nkind,exact,str\nd,5,complex\n")
        with self.assertRaises(ValueError):
            OutputRecord("plot", {})


if __name__ == "__main__":
    unittest.main()
