import pickle
import unittest

import numpy as np

from zerolimit import basis
from zerolimit.basis import (
    BasisSystem,
    parse_basis,
    parse_expression,
    laplacian_log_norm,
    norm_squared,
)
from zerolimit.exceptions import DomainError, EvaluationOverflow, ParseError


class TestParser(unittest.TestCase):
    def test_lines_and_comments(self):
        system = parse_basis("z   # identity\n\n# constant next\n1\n")
        self.assertEqual(system.ell, 2)
        np.testing.assert_allclose(system.values(np.array([2.])).ravel(),
                                   [2., 1.])

    def test_implicit_multiplication(self):
        f = parse_expression("2i z^2 - 3exp(z)")
        z = 0.3 - 0.7j
        self.assertAlmostEqual(f(z), 2j * z ** 2 - 3 * np.exp(z), places=12)

    def test_error_position(self):
        with self.assertRaises(ParseError) as cm:
            parse_basis("z\nz +* 2")
        self.assertEqual(cm.exception.line, 2)
        self.assertEqual(cm.exception.column, 4)

    def test_unknown_name(self):
        with self.assertRaises(ParseError) as cm:
            parse_expression("sin(z)")
        self.assertEqual(cm.exception.column, 1)

    def test_fractional_exponent(self):
        self.assertRaises(ParseError, parse_expression, "z^1.5")

    def test_empty_basis(self):
        self.assertRaises(ParseError, parse_basis, "# nothing\n")


class TestExpressions(unittest.TestCase):
    def test_derivative(self):
        f = parse_expression("z^3 + exp(2z)")
        d = basis.differentiate(f)
        z = np.array([0.1, 1 + 1j, -2j])
        np.testing.assert_allclose(basis.evaluate(d, z),
                                   3 * z ** 2 + 2 * np.exp(2 * z))

    def test_polynomial(self):
        f = parse_expression("(z + 1)^2")
        np.testing.assert_allclose(f.polynomial(), [1, 2, 1])
        self.assertIsNone(parse_expression("exp(z)").polynomial())

    def test_overflow(self):
        f = parse_expression("exp(z)")
        self.assertRaises(EvaluationOverflow, basis.evaluate, f, 1000.)

    def test_pickle(self):
        f = parse_expression("z^2 + 2exp(-z)")
        g = pickle.loads(pickle.dumps(f))
        self.assertEqual(str(f), str(g))
        self.assertAlmostEqual(f(0.5j), g(0.5j))

    def test_immutable(self):
        with self.assertRaises(AttributeError):
            basis.Z.value = 3


class TestBasisSystem(unittest.TestCase):
    def setUp(self):
        self.affine = parse_basis("z\n1")

    def test_norm_squared(self):
        self.assertAlmostEqual(norm_squared(self.affine, 1 + 1j), 3.)

    def test_laplacian_closed_form(self):
        z = np.array([0.1, 1., 0.5 - 2j])
        np.testing.assert_allclose(laplacian_log_norm(self.affine, z),
                                   1 / (1 + np.abs(z) ** 2) ** 2)

    def test_laplacian_stencil(self):
        axis = np.linspace(-1, 1, 10)
        z = (axis[None, :] + 1j * axis[:, None]).ravel()
        h = 1e-4
        half = lambda p: 0.5 * np.log(self.affine.norm_squared(p))
        stencil = (half(z + h) + half(z - h) + half(z + 1j * h)
                   + half(z - 1j * h) - 4 * half(z)) / h ** 2
        # The 5-point stencil of (1/2) log S approximates 2 Q
        exact = 2 * laplacian_log_norm(self.affine, z)
        self.assertLessEqual(np.max(np.abs(stencil - exact) / exact), 1e-6)

    def test_single_function_is_harmonic(self):
        system = parse_basis("exp(z)")
        z = np.linspace(-1, 1, 7) + 0.3j
        self.assertTrue(np.all(system.laplacian_log_norm(z) == 0))

    def test_domain_error(self):
        self.assertRaises(DomainError, parse_basis("z").laplacian_log_norm,
                          0j)

    def test_validate(self):
        worst = parse_basis("z^2\nexp(z)\n1").validate()
        self.assertLess(worst, 1e-6)

    def test_polynomials(self):
        pieces = self.affine.polynomials()
        np.testing.assert_allclose(pieces[0], [0, 1])
        np.testing.assert_allclose(pieces[1], [1])
        self.assertIsNone(parse_basis("z\nexp(z)").polynomials())

    def test_empty(self):
        self.assertRaises(ValueError, BasisSystem, [])


if __name__ == "__main__":
    unittest.main(verbosity=2)
