import os
import shutil
import tempfile
import unittest

import numpy as np

from zerolimit import zeros
from zerolimit.basis import parse_basis
from zerolimit.ensemble import (
    EnsembleSpec,
    SampledFunction,
    reduced_representation,
    sample,
)
from zerolimit.exceptions import DegenerateSample
from zerolimit.zeros import (
    ARGUMENT,
    POLYNOMIAL,
    ZeroSet,
    count_zeros_argument,
    count_zeros_disk,
    dual_path_check,
    find_zeros,
    find_zeros_polynomial,
)


def fixedSample(basisText, coefficients):
    """Sample of the reduced form with hand-picked coefficients."""
    basis = parse_basis(basisText)
    spec = EnsembleSpec(basis, len(coefficients) - 1, 0)
    template = reduced_representation(spec)
    return SampledFunction(basis, spec.n, template, coefficients)


def matched(found, exact):
    return max(np.abs(np.asarray(exact) - z).min() for z in found)


class TestPolynomialPath(unittest.TestCase):
    def test_cube_roots(self):
        found = find_zeros_polynomial([-1, 0, 0, 1], 2.)
        self.assertEqual(found.total, 3)
        self.assertEqual(found.method, POLYNOMIAL)
        exact = np.exp(2j * np.pi * np.arange(3) / 3)
        self.assertLess(matched(found.locations, exact), 1e-10)

    def test_radius_filter(self):
        # Roots 0.5 and 3
        found = find_zeros_polynomial([1.5, -3.5, 1], 2.)
        self.assertEqual(found.total, 1)
        self.assertAlmostEqual(found.locations[0], 0.5)

    def test_aberth(self):
        roots = zeros.aberth(np.array([6., -5., 1.]))
        np.testing.assert_allclose(np.sort(roots.real), [2., 3.], atol=1e-12)

    def test_to_polynomial(self):
        sample = fixedSample("z^2", [1, 0, 2])
        np.testing.assert_allclose(zeros.to_polynomial(sample),
                                   [1, 0, 0, 0, 2])
        self.assertIsNone(zeros.to_polynomial(fixedSample("exp(z)", [1, 1])))


class TestArgumentPath(unittest.TestCase):
    def test_disk_count(self):
        sample = fixedSample("z", [-1, 0, 0, 1])
        self.assertEqual(count_zeros_disk(sample, 2.), 3)
        self.assertEqual(count_zeros_disk(sample, 0.5), 0)

    def test_box_count(self):
        sample = fixedSample("z", [-1, 0, 0, 1])
        count, box = count_zeros_argument(sample, (0.5, 1.5, -0.5, 0.5))
        self.assertEqual(count, 1)
        self.assertEqual(len(box), 4)

    def test_cube_roots(self):
        sample = fixedSample("z", [-1, 0, 0, 1])
        found = find_zeros(sample, 2., method="argument")
        self.assertEqual(found.method, ARGUMENT)
        self.assertEqual(found.total, 3)
        exact = np.exp(2j * np.pi * np.arange(3) / 3)
        self.assertLess(matched(found.locations, exact), 1e-8)

    def test_exponential_sum(self):
        # exp(2z) - 1 vanishes at i pi k
        sample = fixedSample("exp(z)", [-1, 0, 1])
        found = find_zeros(sample, 4.)
        self.assertEqual(found.method, ARGUMENT)
        self.assertEqual(found.total, 3)
        self.assertEqual(found.count, 3)
        exact = [0, 1j * np.pi, -1j * np.pi]
        self.assertLess(matched(found.locations, exact), 1e-8)

    def test_exponential_sum_degree_30(self):
        # Newton from a box centre must not leave the disk, where
        # exp(30 z) overflows
        spec = EnsembleSpec(parse_basis("exp(z)"), 30, 20240617)
        for trial in range(3):
            function = sample(spec, trial)
            found = find_zeros(function, 3.)
            self.assertEqual(found.method, ARGUMENT)
            self.assertEqual(found.total, count_zeros_disk(function, 3.))
            self.assertTrue(np.all(np.abs(found.locations) < 3.))

    def test_degenerate(self):
        sample = fixedSample("z", [0, 0, 0])
        self.assertRaises(DegenerateSample, zeros.find_zeros_entire,
                          sample, 1.)


class TestDualPath(unittest.TestCase):
    def test_kac_samples(self):
        spec = EnsembleSpec(parse_basis("z"), 5, 11)
        for trial in range(20):
            degree = (5, 20, 50)[trial % 3]
            function = sample(spec._replace(n=degree), trial)
            check = dual_path_check(function, 2.)
            self.assertLessEqual(check.distance, 1e-8)
            self.assertEqual(check.polynomial_count, check.disk_count)
            self.assertEqual(check.argument_count, check.disk_count)

    def test_not_polynomial(self):
        self.assertRaises(ValueError, dual_path_check,
                          fixedSample("exp(z)", [1, 1]), 1.)


class TestZeroSet(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_csv(self):
        original = ZeroSet([0.5 + 0.25j, -1j], [1, 2], 2., POLYNOMIAL,
                           [1e-14, 3e-13])
        path = os.path.join(self.directory, "zeros.csv")
        original.to_csv(path)
        restored = ZeroSet.from_csv(path, 2.)
        np.testing.assert_array_equal(restored.locations, original.locations)
        np.testing.assert_array_equal(restored.multiplicities, [1, 2])
        self.assertEqual(restored.total, 3)
        self.assertEqual(restored.residual, 3e-13)

    def test_csv_numpy_values(self):
        locations = np.array([0.5 + 0.25j])
        original = ZeroSet(locations, np.array([1]), 2., POLYNOMIAL,
                           np.array([1e-14]))
        path = os.path.join(self.directory, "zeros.csv")
        original.to_csv(path)
        with open(path) as f:
            self.assertEqual(f.read().splitlines()[1], "0.5,0.25,1,1e-14")
        restored = ZeroSet.from_csv(path, 2.)
        np.testing.assert_array_equal(restored.locations, locations)

    def test_origin_flag(self):
        found = ZeroSet([0, 0.5], [1, 1], 2., POLYNOMIAL)
        self.assertEqual(found.origin.tolist(), [True, False])


if __name__ == "__main__":
    unittest.main(verbosity=2)
