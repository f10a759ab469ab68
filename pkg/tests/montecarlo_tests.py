import math
import unittest
from fractions import Fraction

import numpy as np

import ordertau._errors
from ordertau.copulas import Product, FrechetM, FrechetW, order_transform, parse_model
from ordertau.montecarlo import (CHUNK_SIZE, Estimate, estimate_bracket, estimate_kendall_curve,
                                 verify_order_theorems)
from ordertau.product import SubsetK, envelope_substitution, hpit_polynomial

SEEDS = (7, 17, 27)
N = 100000


def within(estimate, expected, tolerance=4):
    return abs(estimate.value - float(expected)) <= tolerance * estimate.std_error


class TestEstimateBracket(unittest.TestCase):
    def test_product(self):
        for d in (2, 3, 4):
            for seed in SEEDS:
                self.assertTrue(within(estimate_bracket(Product(d), N, seed), Fraction(1, 2 ** d)))

    def test_product_order(self):
        for seed in SEEDS:
            self.assertTrue(within(estimate_bracket(Product(3), N, seed, "order"), Fraction(1, 4)))

    def test_margins(self):
        for seed in SEEDS:
            estimate = estimate_bracket(Product(5), N, seed, "order", K=[1, 2, 3, 5])
            self.assertTrue(within(estimate, Fraction(47, 252)))
        estimate = estimate_bracket(Product(5), N, 7, "order", K=SubsetK.lower(5, 3))
        self.assertTrue(within(estimate, Fraction(71, 252)))
        self.assertEqual(estimate.margin, SubsetK(5, [1, 2, 3]))

    def test_shuffle_b(self):
        estimate = estimate_bracket(parse_model("B"), N, 7, "order")
        self.assertTrue(within(estimate, Fraction(3, 8)))
        kappa, error = estimate.kappa()
        self.assertLessEqual(abs(kappa - 0.5), 4 * error)

    def test_thread_count_does_not_matter(self):
        n = 3 * CHUNK_SIZE + 17
        one = estimate_bracket(Product(4), n, 11, "order", threads=1)
        four = estimate_bracket(Product(4), n, 11, "order", threads=4)
        self.assertEqual(one, four)
        self.assertEqual(one.n, n)

    def test_any_thread_count(self):
        n = 2 * CHUNK_SIZE + 5
        for model, transform, K in ((Product(4), "order", None), (Product(5), "order", [1, 2, 3, 5]),
                                    (parse_model("D"), "none", None)):
            one = estimate_bracket(model, n, 23, transform, K, threads=1)
            for threads in (2, 8):
                self.assertEqual(estimate_bracket(model, n, 23, transform, K, threads=threads), one)

    def test_deterministic(self):
        first = estimate_bracket(parse_model("D"), 5000, 3)
        second = estimate_bracket(parse_model("D"), 5000, 3)
        self.assertEqual(first.value, second.value)

    def test_arguments(self):
        with self.assertRaises(ordertau._errors.DomainError):
            estimate_bracket(Product(2), 999, 1)
        with self.assertRaises(ordertau._errors.DomainError):
            estimate_bracket(Product(2), 1000, -1)
        with self.assertRaises(ordertau._errors.DomainError):
            estimate_bracket(Product(2), 1000, 1, "reverse")
        with self.assertRaises(ordertau._errors.DomainError):
            estimate_bracket(Product(3), 1000, 1, K=SubsetK(4, [1, 2]))
        with self.assertRaises(ordertau._errors.DomainError):
            estimate_bracket(Product(2), 1000, 1, threads=0)
        with self.assertRaises(ordertau._errors.DomainError):
            estimate_bracket(Product(2), 1000, 1, threads=-2)
        with self.assertRaises(ordertau._errors.DomainError):
            estimate_kendall_curve(Product(2), 1000, 1, threads=0)


class TestEstimate(unittest.TestCase):
    def test_kappa(self):
        kappa, error = Estimate(0.25, 0.01, 1000, 1, "order", None, 3).kappa()
        self.assertAlmostEqual(kappa, 1 / 3)
        self.assertAlmostEqual(error, 8 / 3 * 0.01)

    def test_kappa_of_margin(self):
        kappa, _ = Estimate(47 / 252, 0.0, 1000, 1, "order", SubsetK(5, [1, 2, 3, 5]), 5).kappa()
        self.assertAlmostEqual(kappa, 125 / 441)

    def test_payload(self):
        payload = Estimate(0.25, 0.01, 1000, 1, "order", SubsetK(3, [1, 3]), 3).to_payload()
        self.assertEqual(payload["margin"], "{1,3}")
        self.assertAlmostEqual(payload["kappa"], 0.0)


class TestKendallCurve(unittest.TestCase):
    def test_comonotone(self):
        curve = estimate_kendall_curve(FrechetM(2), N, 7)
        for t, value, error in zip(curve.grid, curve.values, curve.std_errors):
            self.assertLessEqual(abs(value - t), 4 * error + 1e-12)

    def test_product(self):
        t = 0.5
        curve = estimate_kendall_curve(Product(2), N, 17, grid=[t])
        self.assertLessEqual(abs(curve.values[0] - (t - t * math.log(t))), 4 * curve.std_errors[0])

    def test_shape(self):
        curve = estimate_kendall_curve(Product(3), 20000, 5, "order")
        self.assertEqual(curve.values[-1], 1.0)
        self.assertTrue(all(a <= b for a, b in zip(curve.values, curve.values[1:])))
        self.assertTrue(all(0 <= value <= 1 for value in curve.values))

    def test_ordering_lowers_the_curve(self):
        plain = estimate_kendall_curve(Product(3), N, 27)
        ordered = estimate_kendall_curve(Product(3), N, 27, "order")
        for k, k_t, e, e_t in zip(plain.values, ordered.values, plain.std_errors, ordered.std_errors):
            self.assertLessEqual(k_t, k + 3 * math.hypot(e, e_t))

    def test_ordering_lowers_the_bivariate_curve(self):
        grid = [k / 20 for k in range(1, 20)]
        for seed in SEEDS:
            plain = estimate_kendall_curve(Product(2), N, seed, grid=grid)
            ordered = estimate_kendall_curve(Product(2), N, seed, "order", grid)
            self.assertEqual(len(ordered.values), 19)
            for t, k, k_t, e, e_t in zip(grid, plain.values, ordered.values, plain.std_errors, ordered.std_errors):
                self.assertLessEqual(k_t, k + 3 * math.hypot(e, e_t), t)

    def test_thread_count_does_not_matter(self):
        n = 2 * CHUNK_SIZE + 9
        for model, transform in ((Product(3), "order"), (Product(2), "none"), (parse_model("A"), "none")):
            one = estimate_kendall_curve(model, n, 31, transform, threads=1)
            for threads in (2, 8):
                self.assertEqual(estimate_kendall_curve(model, n, 31, transform, threads=threads), one)

    def test_unsupported(self):
        with self.assertRaises(ordertau._errors.UnsupportedModelError):
            estimate_kendall_curve(parse_model("A"), 2000, 1, "order")

    def test_bad_grid(self):
        with self.assertRaises(ordertau._errors.DomainError):
            estimate_kendall_curve(FrechetW(), 2000, 1, grid=[0.5, 0.25])


class TestEnvelope(unittest.TestCase):
    def test_margin_distribution(self):
        # P(T_1 <= x_1, T_3 <= x_3) for the sorted uniform draw equals H^Π_T at (x_1, x_3, x_3)
        n = 100000
        envelope = envelope_substitution(3, [1, 3])
        self.assertEqual(envelope.targets, (1, 3, 3))
        rng = np.random.default_rng(41)
        draws = order_transform(Product(3).sample(rng, n))
        polynomial = hpit_polynomial(3)
        for numerators in np.sort(rng.integers(1, 20, size=(10, 3)), axis=1):
            x = [Fraction(int(p), 20) for p in numerators]
            bound = np.array([float(v) for v in envelope.apply(x)])
            expected = float(polynomial.evaluate(envelope.apply(x)))
            observed = np.count_nonzero(np.all(draws <= bound, axis=1)) / n
            error = math.sqrt(expected * (1 - expected) / n)
            self.assertLessEqual(abs(observed - expected), 4 * error + 1e-12, x)


class TestVerifyOrderTheorems(unittest.TestCase):
    def test_product(self):
        report = verify_order_theorems(Product(4), N, 7)
        self.assertTrue(report.passed, [check for check in report.failures])
        self.assertIn("κ[Π_T] exact", [check.name for check in report.checks])

    def test_comonotone(self):
        self.assertTrue(verify_order_theorems(FrechetM(3), N, 17).passed)

    def test_d_mixture(self):
        self.assertTrue(verify_order_theorems(parse_model("D"), N, 27).passed)

    def test_shuffle(self):
        report = verify_order_theorems(parse_model("B"), N, 7)
        self.assertTrue(report.passed)
        self.assertEqual([check.status for check in report.checks].count("skip"), 1)


if __name__ == "__main__":
    unittest.main()
