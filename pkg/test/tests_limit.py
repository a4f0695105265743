import os
import shutil
import tempfile
import unittest

import numpy as np

from zerolimit import limit
from zerolimit.basis import parse_basis
from zerolimit.exceptions import DomainError, WindowTooSmall
from zerolimit.limit import (
    ExpectedMeasure,
    LimitMeasure,
    PAPER_LITERAL,
    Segment,
    ac_density,
    curve_weights,
    expected_density,
    extract_level_curve,
    limit_pairing,
    renormalized,
    xi,
)
from zerolimit.measures import TestFunction


SQUARE = (-2., 2., -2., 2.)


class TestDensities(unittest.TestCase):
    def test_xi(self):
        self.assertEqual(xi(2.), 1.)
        self.assertEqual(xi(1.), 1.)
        self.assertEqual(xi(0.5), 0.)
        self.assertEqual(xi(4.), 0.5)
        np.testing.assert_array_equal(xi(np.array([0., 1., 8.])),
                                      [0., 1., 0.25])

    def test_fubini_study(self):
        basis = parse_basis("z\n1")
        self.assertAlmostEqual(ac_density(basis, 1.), 1 / (4 * np.pi),
                               places=14)
        self.assertAlmostEqual(ac_density(basis, 0.1),
                               1 / (np.pi * 1.01 ** 2), places=14)

    def test_gate(self):
        # S = 4|z|^2 + |z|^4 crosses 1 inside the window
        basis = parse_basis("2*z\nz^2")
        z = np.linspace(-1.5, 1.5, 41)[None, :] + \
            1j * np.linspace(-1.5, 1.5, 41)[:, None]
        z = z[z != 0]
        s = basis.norm_squared(z)
        density = ac_density(basis, z)
        self.assertTrue(np.all(density[s < 1] == 0))
        above = s > 1
        np.testing.assert_allclose(density[above],
                                   basis.laplacian_log_norm(z[above]) / np.pi,
                                   rtol=1e-12)

    def test_single_function(self):
        for text in ("z", "exp(z)"):
            measure = LimitMeasure(parse_basis(text), SQUARE, 64)
            self.assertLessEqual(np.abs(measure.density).max(), 1e-10)

    def test_common_zero(self):
        self.assertRaises(DomainError, ac_density, parse_basis("z"), 0.)

    def test_expected_density(self):
        # n = 1: sum_k |z|^(2k) = 1 + |z|^2
        basis = parse_basis("z")
        z = np.array([0., 0.3 + 0.4j, 1., 2j])
        np.testing.assert_allclose(expected_density(basis, 1, z),
                                   1 / (np.pi * (1 + np.abs(z) ** 2) ** 2),
                                   rtol=1e-12)


class TestLevelCurve(unittest.TestCase):
    def test_unit_circle(self):
        basis = parse_basis("z")
        measure = LimitMeasure(basis, SQUARE, 512)
        self.assertAlmostEqual(measure.arclength, 2 * np.pi,
                               delta=0.01 * 2 * np.pi)
        self.assertAlmostEqual(measure.curve_mass, 1., delta=0.01)
        self.assertTrue(np.all(measure.weights >= 0))
        np.testing.assert_allclose(np.abs(measure.midpoints), 1., atol=0.01)

    def test_orientation(self):
        # Low side of S - 1 on the left: counterclockwise around the disk
        segments = extract_level_curve(parse_basis("z"), SQUARE, 64)
        for seg in segments:
            turn = (seg.end - seg.start) * np.conj((seg.start + seg.end) / 2)
            self.assertGreater(turn.imag, 0)

    def test_exponential_line(self):
        basis = parse_basis("exp(z)")
        # No grid node on Re z = 0
        segments = extract_level_curve(basis, (-1., 1., -4., 4.), 63)
        self.assertTrue(segments)
        for seg in segments:
            self.assertAlmostEqual(seg.start.real, 0., delta=1e-3)
            self.assertAlmostEqual(seg.end.real, 0., delta=1e-3)
        weights = curve_weights(segments, basis)
        lengths = np.array([abs(s.end - s.start) for s in segments])
        np.testing.assert_allclose(weights, lengths / (2 * np.pi), rtol=1e-2)
        self.assertAlmostEqual(weights.sum(), 8 / (2 * np.pi),
                               delta=1e-3 * 8 / (2 * np.pi))

    def test_no_curve(self):
        basis = parse_basis("z\n1")
        self.assertEqual(extract_level_curve(basis, SQUARE, 64), [])
        self.assertEqual(extract_level_curve(basis, (-2., 2.1, -2., 1.7),
                                             64), [])

    def test_degenerate_weight(self):
        basis = parse_basis("z")
        segments = [Segment(1 + 0j, 1 + 0.1j, False),
                    Segment(1 + 0.1j, 1 + 0.2j, True)]
        weights = curve_weights(segments, basis)
        self.assertGreater(weights[0], 0)
        self.assertEqual(weights[1], 0.)

    def test_arguments(self):
        basis = parse_basis("z")
        self.assertRaises(ValueError, extract_level_curve, basis, SQUARE, 8)
        self.assertRaises(ValueError, curve_weights, [], basis, "half")


class TestPairing(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_kac_total_mass(self):
        measure = LimitMeasure(parse_basis("z"), SQUARE, 512, r=2.)
        value = limit_pairing(measure, TestFunction("constant"))
        self.assertAlmostEqual(value, np.log(2.), delta=0.01 * np.log(2.))

    def test_inner_support(self):
        measure = LimitMeasure(parse_basis("z"), SQUARE, 256, r=2.)
        self.assertEqual(limit_pairing(measure,
                                       TestFunction("annulus", 0., 0.5)), 0.)

    def test_self_convergence(self):
        basis = parse_basis("z\n1")
        phi = TestFunction("constant")
        coarse = limit_pairing(LimitMeasure(basis, SQUARE, 128), phi, 2.)
        fine = limit_pairing(LimitMeasure(basis, SQUARE, 512), phi, 2.)
        self.assertGreater(fine, 0)
        self.assertLessEqual(abs(coarse - fine), 0.02 * fine)

    def test_window_too_small(self):
        measure = LimitMeasure(parse_basis("z"), (-1., 1., -1., 1.), 64)
        self.assertRaises(WindowTooSmall, limit_pairing, measure,
                          TestFunction("constant"), 2.)

    def test_paper_literal(self):
        measure = LimitMeasure(parse_basis("z"), SQUARE, 256, r=2.)
        literal = renormalized(measure, PAPER_LITERAL)
        self.assertAlmostEqual(literal.curve_mass,
                               2 * np.pi * measure.curve_mass, places=10)
        self.assertIs(renormalized(measure, limit.TWO_PI), measure)
        direct = LimitMeasure(parse_basis("z"), SQUARE, 256, r=2.,
                              normalization=PAPER_LITERAL)
        np.testing.assert_allclose(direct.weights, literal.weights,
                                   rtol=1e-12)

    def test_expected_measure(self):
        basis = parse_basis("z")
        expected = ExpectedMeasure(basis, 1, SQUARE, 256, r=2.)
        # Density 1/(pi (1+|z|^2)^2) integrates to 4/5 over |z| < 2
        inside = np.abs(expected.centers) < 2
        area = expected.dx * expected.dy
        self.assertAlmostEqual(float(expected.density[inside].sum() * area),
                               0.8, delta=0.01)
        self.assertEqual(expected.as_point_measure().n, 1)

    def test_dumps(self):
        measure = LimitMeasure(parse_basis("z"), SQUARE, 32)
        grid = os.path.join(self.directory, "grid.csv")
        curve = os.path.join(self.directory, "curve.csv")
        measure.write_grid(grid)
        measure.write_curve(curve)
        with open(grid) as f:
            self.assertEqual(len(f.read().splitlines()), 32 * 32 + 1)
        with open(curve) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], "x0,y0,x1,y1,weight,degenerate")
        self.assertEqual(len(lines), len(measure.segments) + 1)


if __name__ == "__main__":
    unittest.main(verbosity=2)
