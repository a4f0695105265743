"""End-to-end reproductions at desk scale.

These runs take minutes; set ZEROLIMIT_SLOW_TESTS=1 to enable them and
ZEROLIMIT_WORKERS to size the worker pool."""
import os
import unittest

import numpy as np

from zerolimit import futures
from zerolimit.basis import parse_basis
from zerolimit.ensemble import EnsembleSpec
from zerolimit.limit import LimitMeasure
from zerolimit.measures import (
    BinGrid,
    TestFunction,
    compare,
    monte_carlo_expectation,
)


SLOW = os.environ.get("ZEROLIMIT_SLOW_TESTS", "") == "1"
SEED = 20240617


def kacAggregates(ns, grid, phis):
    spec = EnsembleSpec(parse_basis("z"), ns[0], SEED)
    return [monte_carlo_expectation(spec._replace(n=n), 2., 50, grid, phis)
            for n in ns]


def exponentialCounts(phis):
    spec = EnsembleSpec(parse_basis("exp(z)"), 30, SEED)
    return monte_carlo_expectation(spec, 3., 200, test_functions=phis)


@unittest.skipUnless(SLOW, "set ZEROLIMIT_SLOW_TESTS=1")
class TestKac(unittest.TestCase):
    def test_reproduction(self):
        annulus = TestFunction("annulus", 0.9, 1.1)
        grid = BinGrid(2., 40, 12)
        aggregate, = futures._startup(kacAggregates, [300], grid, [annulus])
        self.assertAlmostEqual(aggregate.mean_total_mass, np.log(2.),
                               delta=0.05)
        share = aggregate.mean_total_mass / 12
        gaps = np.abs(aggregate.sector_masses - share)
        self.assertTrue(np.all(gaps <= 4 * aggregate.sector_errors))
        outside = 1 - aggregate.mean_counts[0] / aggregate.mean_zero_count
        self.assertLessEqual(outside, 0.06)

    def test_discrepancy_trend(self):
        grid = BinGrid(2.)
        phis = [TestFunction("constant")]
        aggregates = futures._startup(kacAggregates, [50, 300], grid, phis)
        limit = LimitMeasure(parse_basis("z"), (-2., 2., -2., 2.), 512, 2.)
        coarse, fine = [compare(a, limit).discrepancy for a in aggregates]
        self.assertLess(fine, coarse)


@unittest.skipUnless(SLOW, "set ZEROLIMIT_SLOW_TESTS=1")
class TestExponentialSum(unittest.TestCase):
    def test_band_count(self):
        band = TestFunction("rectangle", -3., 3., 1., 2.)
        aggregate = futures._startup(exponentialCounts, [band])
        limit = LimitMeasure(parse_basis("exp(z)"), (-1., 1., -4., 4.), 512)
        prediction = 30 * limit.pair_unweighted(band)
        self.assertAlmostEqual(prediction, 30 / (2 * np.pi), delta=0.05)
        self.assertAlmostEqual(aggregate.mean_counts[0], prediction,
                               delta=0.1 * prediction)


if __name__ == "__main__":
    unittest.main(verbosity=2)
