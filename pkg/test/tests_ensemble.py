import os
import shutil
import tempfile
import unittest

import numpy as np

from zerolimit import ensemble
from zerolimit.basis import parse_basis
from zerolimit.ensemble import (
    CovarianceKernel,
    EnsembleSpec,
    FULL,
    REDUCED,
    covariance,
    empirical_covariance,
    sample,
    sample_full,
    sample_reduced,
)
from zerolimit.exceptions import TermBudgetExceeded, TermCountOverflow


class TestTerms(unittest.TestCase):
    def test_count_terms(self):
        self.assertEqual(ensemble.count_terms(1, 5), 6)
        self.assertEqual(ensemble.count_terms(2, 3), 15)
        self.assertEqual(ensemble.count_terms(3, 0), 1)

    def test_count_overflow(self):
        self.assertRaises(TermCountOverflow, ensemble.count_terms, 2, 200)

    def test_reduced_count(self):
        self.assertEqual(ensemble.count_reduced_terms(2, 3), 10)
        spec = EnsembleSpec(parse_basis("z\n1"), 3, 0)
        self.assertEqual(len(ensemble.reduced_representation(spec).alphas),
                         10)

    def test_reduced_alphas(self):
        spec = EnsembleSpec(parse_basis("z"), 3, 0)
        self.assertEqual(set(ensemble.reduced_representation(spec).alphas),
                         set([(), (1,), (1, 1), (1, 1, 1)]))
        spec = EnsembleSpec(parse_basis("z\n1"), 2, 0)
        self.assertEqual(set(ensemble.reduced_representation(spec).alphas),
                         set([(), (1,), (2,), (1, 1), (1, 2), (2, 2)]))

    def test_reduced_weights(self):
        spec = EnsembleSpec(parse_basis("z\n1"), 2, 0)
        template = ensemble.reduced_representation(spec)
        weights = dict((a, w) for a, w in zip(template.alphas,
                                              template.weights))
        self.assertAlmostEqual(weights[(1, 2)], np.sqrt(2.))
        self.assertAlmostEqual(weights[(1, 1)], 1.)
        self.assertAlmostEqual(weights[()], 1.)

    def test_budget(self):
        spec = EnsembleSpec(parse_basis("z\n1"), 25, 0)
        self.assertRaises(TermBudgetExceeded, sample_full, spec, 0)


class TestSampling(unittest.TestCase):
    def setUp(self):
        self.kac = EnsembleSpec(parse_basis("z"), 6, 42)

    def test_deterministic(self):
        a = sample_reduced(self.kac, 3)
        b = sample_reduced(self.kac, 3)
        np.testing.assert_array_equal(a.coefficients, b.coefficients)
        c = sample_reduced(self.kac, 4)
        self.assertFalse(np.array_equal(a.coefficients, c.coefficients))

    def test_prefix_stable(self):
        # Term i always uses the same two normals of the trial stream
        short = ensemble.draw_coefficients(7, 1, 3)
        long = ensemble.draw_coefficients(7, 1, 10)
        np.testing.assert_array_equal(short, long[:3])

    def test_kac_evaluation(self):
        f = sample(self.kac, 0)
        z = np.array([0.3 + 0.1j, -1.2j])
        expected = np.polyval(f.coefficients[::-1], z)
        np.testing.assert_allclose(f.evaluate(z), expected)
        np.testing.assert_allclose(
            f.derivative(z),
            np.polyval(np.polyder(f.coefficients[::-1]), z))

    def test_evaluate_both(self):
        f = sample(EnsembleSpec(parse_basis("z\nexp(z)"), 3, 1), 2)
        value, slope = f.evaluate_both(0.4 - 0.2j)
        self.assertAlmostEqual(value, ensemble.eval_G(f, 0.4 - 0.2j))
        self.assertAlmostEqual(slope, ensemble.eval_G_deriv(f, 0.4 - 0.2j))
        h = 1e-6
        numeric = (f.evaluate(0.4 - 0.2j + h) - f.evaluate(0.4 - 0.2j - h)) \
            / (2 * h)
        self.assertAlmostEqual(slope, numeric, places=6)

    def test_full_matches_terms(self):
        spec = EnsembleSpec(parse_basis("z\n1"), 2, 5)
        f = sample_full(spec, 0)
        self.assertEqual(f.form, FULL)
        self.assertEqual(len(f), 7)
        z = 0.7 + 0.2j
        direct = sum(c * np.prod([(z, 1.)[j - 1] for j in alpha])
                     for c, alpha, _ in f.terms)
        self.assertAlmostEqual(f.evaluate(z), direct)

    def test_csv_replay(self):
        directory = tempfile.mkdtemp()
        try:
            spec = EnsembleSpec(parse_basis("z\n1"), 3, 9)
            f = sample(spec, 2)
            path = os.path.join(directory, "sample.csv")
            f.to_csv(path)
            with open(path) as csvFile:
                self.assertNotIn("np.", csvFile.read())
            g = ensemble.SampledFunction.from_csv(path, spec.basis)
            self.assertEqual(g.form, REDUCED)
            z = np.array([0.1j, 1.5])
            np.testing.assert_allclose(f.evaluate(z), g.evaluate(z))
        finally:
            shutil.rmtree(directory)


class TestCovariance(unittest.TestCase):
    def test_kernel_diagonal(self):
        kernel = CovarianceKernel(parse_basis("z"), 3)
        self.assertAlmostEqual(kernel(2., 2.), 1 + 4 + 16 + 64)
        value = covariance(kernel, 0.5j, 0.3)
        self.assertAlmostEqual(value, sum((0.5j * 0.3) ** k
                                          for k in range(4)))

    def test_hermitian(self):
        kernel = CovarianceKernel(parse_basis("z\n1"), 4)
        z, w = 0.3 + 0.5j, -0.2 + 0.1j
        self.assertAlmostEqual(kernel(z, w), np.conj(kernel(w, z)))

    def test_samplers_match_kernel(self):
        spec = EnsembleSpec(parse_basis("z\n1"), 3, 2024)
        kernel = CovarianceKernel(spec.basis, spec.n)
        z = np.array([0.3, 1., 0.7])
        w = np.array([0.5j, 1., -0.2 + 0.4j])
        for form in (REDUCED, FULL):
            means, seRes, seIms = empirical_covariance(spec, z, w, 200000,
                                                       form)
            for i in range(3):
                mean, seRe, seIm = means[i], seRes[i], seIms[i]
                exact = kernel(z[i], w[i])
                self.assertLessEqual(abs(mean.real - exact.real), 4 * seRe)
                if seIm > 0:
                    self.assertLessEqual(abs(mean.imag - exact.imag),
                                         4 * seIm)
                else:
                    self.assertAlmostEqual(mean.imag, exact.imag)


if __name__ == "__main__":
    unittest.main(verbosity=2)
