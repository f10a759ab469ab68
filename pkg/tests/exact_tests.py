import itertools
import math
import unittest
from fractions import Fraction

import numpy as np

import ordertau._errors
from ordertau.exact import (SparsePoly, BigRational, poly_add, poly_mul, integrate_var_to_next, iterated_integral,
                            simplex_integral, monomial_simplex_integral, binomial)


def random_poly(rng, d, max_degree=6, n_terms=5):
    terms = {}
    for _ in range(n_terms):
        degree = int(rng.integers(0, max_degree + 1))
        exponents = [0] * d
        for _ in range(degree):
            exponents[int(rng.integers(0, d))] += 1
        terms[tuple(exponents)] = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 7)))
    return SparsePoly(d, terms)


def quadrature_simplex_integral(poly, nodes=8):
    """Nested Gauss-Legendre quadrature over {u_1 <= ... <= u_d}, built from the outermost variable inwards."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    t, w = (t + 1) / 2, w / 2
    coords = t[:, None]
    weights = w.copy()
    for _ in range(poly.dimension - 1):
        upper = coords[:, 0]
        inner = (upper[:, None] * t[None, :]).reshape(-1)
        coords = np.hstack([inner[:, None], np.repeat(coords, nodes, axis=0)])
        weights = (weights[:, None] * upper[:, None] * w[None, :]).reshape(-1)
    return float(np.sum(weights * poly.evaluate_many(coords)))


class TestSparsePoly(unittest.TestCase):
    def setUp(self):
        self.u1 = SparsePoly.variable(2, 1)
        self.u2 = SparsePoly.variable(2, 2)

    def test_zero_terms_pruned(self):
        p = self.u1 * 3 + self.u2
        self.assertTrue((p - p).is_zero())
        self.assertEqual(dict((p + (-self.u2)).terms), {(1, 0): 3})
        self.assertEqual(dict(SparsePoly(2, [((1, 0), 1), ((1, 0), -1)]).terms), {})

    def test_add(self):
        p = poly_add(self.u1, SparsePoly.constant(2, Fraction(1, 3)))
        self.assertEqual(dict(p.terms), {(1, 0): 1, (0, 0): Fraction(1, 3)})

    def test_mul(self):
        p = poly_mul(self.u1 + self.u2, self.u1 - self.u2)
        self.assertEqual(p, self.u1 * self.u1 - self.u2 * self.u2)

    def test_add_and_mul_are_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            d = int(rng.integers(1, 5))
            p, q = random_poly(rng, d), random_poly(rng, d)
            x = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10))) for _ in range(d)]
            self.assertEqual(poly_add(p, q).evaluate(x), p.evaluate(x) + q.evaluate(x))
            self.assertEqual(poly_mul(p, q).evaluate(x), p.evaluate(x) * q.evaluate(x))

    def test_dimension_mismatch(self):
        u3 = SparsePoly.variable(3, 1)
        with self.assertRaises(ordertau._errors.DimensionError):
            poly_add(self.u1, u3)
        with self.assertRaises(ordertau._errors.DimensionError) as cm:
            poly_mul(self.u1, u3)
        self.assertEqual(cm.exception.payload["expected"], 2)
        self.assertEqual(cm.exception.payload["actual"], 3)

    def test_bad_exponent_vector(self):
        with self.assertRaises(ordertau._errors.DimensionError):
            SparsePoly(2, {(1,): 1})

    def test_float_coefficient_rejected(self):
        with self.assertRaises(ordertau._errors.DomainError):
            SparsePoly.constant(2, 0.5)

    def test_evaluate(self):
        p = self.u1 * self.u2 * 2 - self.u1 * self.u1
        self.assertEqual(p.evaluate((Fraction(1, 2), Fraction(1, 3))), Fraction(1, 3) - Fraction(1, 4))

    def test_evaluate_many_matches_exact(self):
        rng = np.random.default_rng(3)
        p = random_poly(rng, 3)
        points = rng.random((20, 3))
        expected = [float(p.evaluate([Fraction(x) for x in row])) for row in points]
        np.testing.assert_allclose(p.evaluate_many(points), expected, rtol=1e-12, atol=1e-12)

    def test_substitute(self):
        p = SparsePoly.monomial(3, (1, 2, 1))
        self.assertEqual(p.substitute((3, 3, 3)), SparsePoly.monomial(3, (0, 0, 4)))
        self.assertEqual(p.substitute((None, 2, None)), SparsePoly.monomial(3, (0, 2, 0)))

    def test_extend(self):
        self.assertEqual(self.u1.extend(3), SparsePoly.variable(3, 1))
        with self.assertRaises(ordertau._errors.DimensionError):
            self.u1.extend(1)

    def test_degree_and_dependence(self):
        p = SparsePoly.monomial(3, (2, 0, 3))
        self.assertEqual(p.degree(), 5)
        self.assertTrue(p.depends_on(1))
        self.assertFalse(p.depends_on(2))

    def test_str(self):
        p = self.u1 * self.u2 - self.u1 * self.u1 * Fraction(1, 2)
        self.assertEqual(str(p), "-1/2*u1^2 + u1*u2")
        self.assertEqual(str(SparsePoly.zero(2)), "0")

    def test_dimension_zero(self):
        self.assertEqual(SparsePoly.constant(0, 3).evaluate(()), 3)

    def test_hashable(self):
        self.assertEqual(len({self.u1 + self.u2, self.u2 + self.u1}), 1)


class TestIntegration(unittest.TestCase):
    def test_integrate_var_to_next(self):
        self.assertEqual(integrate_var_to_next(SparsePoly.variable(2, 1), 1),
                         SparsePoly.monomial(2, (0, 2), Fraction(1, 2)))

    def test_integrate_collects_terms(self):
        # u2^2 and u1*u2 both land on u2^3
        p = SparsePoly(2, {(0, 2): 1, (1, 1): 2})
        self.assertEqual(integrate_var_to_next(p, 1), SparsePoly.monomial(2, (0, 3), 2))

    def test_integrate_bad_index(self):
        p = SparsePoly.variable(3, 3)
        for i in (0, 3, 4):
            with self.assertRaises(ordertau._errors.IntegrationError) as cm:
                integrate_var_to_next(p, i)
            self.assertEqual(cm.exception.payload["variable"], i)

    def test_integrate_out_of_order(self):
        with self.assertRaises(ordertau._errors.IntegrationError) as cm:
            integrate_var_to_next(SparsePoly.variable(3, 1), 2)
        self.assertEqual(cm.exception.payload["variable"], 1)

    def test_iterated_integral(self):
        p = iterated_integral(SparsePoly.constant(3, 1), 2)
        self.assertEqual(p, SparsePoly.monomial(3, (0, 0, 2), Fraction(1, 2)))
        with self.assertRaises(ordertau._errors.IntegrationError):
            iterated_integral(SparsePoly.constant(3, 1), 3)

    def test_simplex_volume(self):
        for d in range(1, 8):
            self.assertEqual(simplex_integral(SparsePoly.constant(d, 1)), Fraction(1, math.factorial(d)))

    def test_simplex_needs_a_variable(self):
        with self.assertRaises(ordertau._errors.DimensionError):
            simplex_integral(SparsePoly.constant(0, 1))

    def test_power_rule(self):
        for exponents in [(1, 0), (0, 3), (2, 1, 0), (0, 0, 4), (1, 1, 1, 1), (3, 0, 2, 1)]:
            p = SparsePoly.monomial(len(exponents), exponents)
            self.assertEqual(simplex_integral(p), monomial_simplex_integral(exponents))
        self.assertEqual(monomial_simplex_integral((1, 0)), Fraction(1, 6))

    def test_every_monomial_up_to_degree_six(self):
        for d in range(1, 5):
            for exponents in itertools.product(range(7), repeat=d):
                if sum(exponents) > 6:
                    continue
                monomial = SparsePoly.monomial(d, exponents)
                exact = monomial_simplex_integral(exponents)
                self.assertEqual(simplex_integral(monomial), exact, exponents)
                numeric = quadrature_simplex_integral(monomial)
                self.assertLessEqual(abs(float(exact) - numeric), 1e-3 * float(exact), exponents)

    def test_linearity(self):
        rng = np.random.default_rng(11)
        for d in (2, 3, 4):
            p, q = random_poly(rng, d), random_poly(rng, d)
            a, b = Fraction(-3, 7), Fraction(5, 2)
            self.assertEqual(simplex_integral(p * a + q * b), a * simplex_integral(p) + b * simplex_integral(q))

    def test_matches_quadrature(self):
        rng = np.random.default_rng(2024)
        for d in (1, 2, 3, 4):
            for _ in range(5):
                p = random_poly(rng, d)
                exact = float(simplex_integral(p))
                numeric = quadrature_simplex_integral(p)
                self.assertLessEqual(abs(exact - numeric), 1e-3 * max(abs(exact), 1e-9) + 1e-12)

    def test_result_is_reduced(self):
        value = simplex_integral(SparsePoly.constant(4, 6))
        self.assertIsInstance(value, BigRational)
        self.assertEqual((value.numerator, value.denominator), (1, 4))


class TestBinomial(unittest.TestCase):
    def test_integers(self):
        self.assertEqual(binomial(5, 2), 10)
        self.assertEqual(binomial(3, 5), 0)
        self.assertEqual(binomial(4, -1), 0)

    def test_rational(self):
        self.assertEqual(binomial(Fraction(1, 2), 2), Fraction(-1, 8))
        self.assertEqual(binomial(-1, 3), -1)
        self.assertEqual(binomial(Fraction(7, 3), 0), 1)


if __name__ == "__main__":
    unittest.main()
