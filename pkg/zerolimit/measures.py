#
#    This file is part of zerolimit.
#
#    zerolimit is free software: you can redistribute it and/or modify
#    it under the terms of the GNU Lesser General Public License as
#    published by the Free Software Foundation, either version 3 of
#    the License, or (at your option) any later version.
#
#    zerolimit is distributed in the hope that it will be useful,
#    but WITHOUT ANY WARRANTY; without even the implied warranty of
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
#    GNU Lesser General Public License for more details.
#
#    You should have received a copy of the GNU Lesser General Public
#    License along with zerolimit. If not, see <http://www.gnu.org/licenses/>.
#
"""Normalized counting measures of zero sets and their Monte Carlo means.

A trial contributes the measure (1/n) sum_zeros m log(r/|z|) delta_z.
Trials are reduced into an AggregatedMeasure whose records are kept sorted
by trial index, so every statistic is independent of completion order."""
from collections import namedtuple
from functools import partial
import csv

import numpy as np

import zerolimit
from . import futures
from .ensemble import REDUCED, representation, sample
from .exceptions import (
    DegenerateNormalization,
    TrialFailureRate,
    WindowMismatch,
    ZeroLimitError,
)
from .utils import StopWatch
from .zeros import find_zeros


MAX_FAILURE_RATE = 0.02


def _angle(z):
    return np.mod(np.angle(z), 2 * np.pi)


def _smoothStep(x):
    x = np.clip(x, 0., 1.)
    return 0.5 - 0.5 * np.cos(np.pi * x)


class TestFunction(object):
    """Bounded test function on the plane, vectorized over complex arrays.

    Kinds and their parameters:

    ===========  =========================================================
    constant     value (default 1)
    radial       rho, width: smooth bump of |z| around rho
    sector       theta0, theta1[, smooth]: angular sector, optional ramps
    annulus      rho0, rho1: indicator of rho0 <= |z| < rho1
    gaussian     z0 (complex), sigma
    rectangle    x0, x1, y0, y1
    halfplane    side: 'left' (Re z < 0) or 'right' (Re z > 0)
    custom       a picklable callable
    combination  list of (factor, TestFunction)
    ===========  ========================================================="""
    __test__ = False

    def __init__(self, kind, *params):
        if kind not in _KINDS:
            raise ValueError("unknown test function kind {0!r}".format(kind))
        self.kind = kind
        self.params = params

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(_KINDS[self.kind](z, *self.params),
                               z.shape).astype(float)

    def _terms(self):
        if self.kind == "combination":
            return list(self.params[0])
        return [(1., self)]

    def __add__(self, other):
        return TestFunction("combination", self._terms() + other._terms())

    def __sub__(self, other):
        return self + (-1.) * other

    def __mul__(self, factor):
        return TestFunction("combination",
                            [(factor * a, phi) for a, phi in self._terms()])

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.) * self

    def __str__(self):
        if self.kind == "constant":
            return "constant" if not self.params else \
                "constant:{0!r}".format(float(self.params[0]))
        if self.kind == "gaussian":
            z0, sigma = self.params
            return "gaussian:{0!r}:{1!r}:{2!r}".format(
                complex(z0).real, complex(z0).imag, float(sigma))
        if self.kind == "custom":
            return "custom:{0}".format(getattr(self.params[0], "__name__",
                                               "function"))
        if self.kind == "combination":
            return " + ".join("{0!r}*({1})".format(float(a), phi)
                              for a, phi in self.params[0])
        params = [p if isinstance(p, str) else repr(float(p))
                  for p in self.params]
        return ":".join([self.kind] + params)

    def __repr__(self):
        return "TestFunction({0})".format(self)


def _constant(z, value=1.):
    return np.full(z.shape, value)


def _radial(z, rho, width):
    u = (np.abs(z) - rho) / width
    inside = np.abs(u) < 1
    out = np.zeros(z.shape)
    out[inside] = np.exp(1 - 1 / (1 - u[inside] ** 2))
    return out


def _sector(z, theta0, theta1, smooth=0.):
    width = theta1 - theta0
    offset = np.mod(_angle(z) - theta0, 2 * np.pi)
    if not smooth:
        return (offset < width).astype(float)
    # Signed distance past each edge, ramps of length ``smooth`` centred on it
    past = np.where(offset > np.pi + width / 2, offset - 2 * np.pi, offset)
    return _smoothStep(past / smooth + 0.5) * \
        _smoothStep((width - past) / smooth + 0.5)


def _annulus(z, rho0, rho1):
    a = np.abs(z)
    return ((a >= rho0) & (a < rho1)).astype(float)


def _gaussian(z, z0, sigma):
    return np.exp(-np.abs(z - z0) ** 2 / (2 * sigma ** 2))


def _rectangle(z, x0, x1, y0, y1):
    return ((z.real >= x0) & (z.real < x1) &
            (z.imag >= y0) & (z.imag < y1)).astype(float)


def _halfplane(z, side):
    if side == "left":
        return (z.real < 0).astype(float)
    return (z.real > 0).astype(float)


def _custom(z, function):
    return function(z)


def _combination(z, terms):
    total = np.zeros(z.shape)
    for factor, phi in terms:
        total = total + factor * phi(z)
    return total


_KINDS = {
    "constant": _constant,
    "radial": _radial,
    "sector": _sector,
    "annulus": _annulus,
    "gaussian": _gaussian,
    "rectangle": _rectangle,
    "halfplane": _halfplane,
    "custom": _custom,
    "combination": _combination,
}


def parse_test_function(text):
    """Builds a TestFunction from ``kind:param:...``, e.g.
    ``sector:0:0.5236`` or ``gaussian:1:0:0.2``."""
    parts = [p.strip() for p in text.strip().split(":")]
    kind, args = parts[0], parts[1:]
    if kind == "halfplane":
        if args not in (["left"], ["right"]):
            raise ValueError("halfplane needs 'left' or 'right'")
        return TestFunction(kind, args[0])
    if kind not in _KINDS or kind in ("custom", "combination"):
        raise ValueError("unknown test function {0!r}".format(text))
    values = [float(a) for a in args]
    if kind == "gaussian":
        if len(values) != 3:
            raise ValueError("gaussian needs re:im:sigma")
        return TestFunction(kind, complex(values[0], values[1]), values[2])
    expected = {"constant": (0, 1), "radial": (2, 2), "sector": (2, 3),
                "annulus": (2, 2), "rectangle": (4, 4)}[kind]
    if not expected[0] <= len(values) <= expected[1]:
        raise ValueError("wrong parameter count in {0!r}".format(text))
    return TestFunction(kind, *values)


class WeightedPointMeasure(object):
    """Atoms at ``locations`` with positive ``weights`` inside |z| < r."""
    def __init__(self, locations, weights, r, n):
        self.locations = np.asarray(locations, dtype=complex).reshape(-1)
        self.weights = np.asarray(weights, dtype=float).reshape(-1)
        self.r = float(r)
        self.n = n

    @property
    def atoms(self):
        return list(zip(self.locations, self.weights))

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def __len__(self):
        return self.locations.size


def normalized_counting_measure(zeros, n):
    """The measure (1/n) sum m log(r/|z|) delta_z over 0 < |z| < r.

    Zeros flagged as sitting at the origin are left out.

    :raises DegenerateNormalization: if n < 1."""
    if n < 1:
        raise DegenerateNormalization("normalization needs n >= 1")
    keep = ~zeros.origin & (np.abs(zeros.locations) < zeros.radius)
    locations = zeros.locations[keep]
    weights = zeros.multiplicities[keep] / float(n) * \
        np.log(zeros.radius / np.abs(locations))
    return WeightedPointMeasure(locations, weights, zeros.radius, n)


def pair(measure, phi):
    """sum over atoms of weight * phi(location)."""
    if not len(measure):
        return 0.
    return float(np.dot(measure.weights, phi(measure.locations)))


class BinGrid(object):
    """Annular-sector bins over 0 < |z| < r: ``radial`` equal rings times
    ``angular`` equal sectors starting at angle 0."""
    def __init__(self, r, radial=40, angular=24):
        self.r = float(r)
        self.radial = int(radial)
        self.angular = int(angular)

    @property
    def shape(self):
        return (self.radial, self.angular)

    @property
    def radial_edges(self):
        return np.linspace(0, self.r, self.radial + 1)

    @property
    def angular_edges(self):
        return np.linspace(0, 2 * np.pi, self.angular + 1)

    def index(self, z):
        """Flat bin index per point, -1 outside the disk."""
        z = np.asarray(z, dtype=complex)
        ring = np.floor(np.abs(z) / self.r * self.radial).astype(np.int64)
        sector = np.floor(_angle(z) / (2 * np.pi) * self.angular) \
            .astype(np.int64)
        sector = np.minimum(sector, self.angular - 1)
        flat = ring * self.angular + sector
        return np.where(ring < self.radial, flat, -1)

    def masses(self, locations, weights):
        """Total weight per bin, shaped (radial, angular)."""
        index = self.index(locations)
        inside = index >= 0
        counts = np.bincount(index[inside], weights=np.asarray(weights)[inside],
                             minlength=self.radial * self.angular)
        return counts.reshape(self.shape)

    def to_dict(self):
        return {"r": self.r, "radial": self.radial, "angular": self.angular}

    def __eq__(self, other):
        return isinstance(other, BinGrid) and \
            self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other


TrialRecord = namedtuple("TrialRecord", [
    "trial", "total_mass", "bins", "pairings", "counts", "zero_count",
    "elapsed", "atoms",
])
TrialRecord.__doc__ = """Sufficient statistics of one trial.

``pairings`` hold <Z, phi> and ``counts`` the unweighted sum of
multiplicities * phi over zeros, one entry per declared test function.
``atoms`` is (locations, weights) or None."""

TrialFailure = namedtuple("TrialFailure", ["trial", "record"])


def _mean(values):
    return values.mean(axis=0)


def _standardError(values):
    if values.shape[0] < 2:
        return np.zeros(values.shape[1:])
    return values.std(axis=0, ddof=1) / np.sqrt(values.shape[0])


class AggregatedMeasure(object):
    """Monte Carlo estimate of E Z(r, G_n) built from trial records."""
    def __init__(self, r, n, grid, test_functions, records=(), failures=()):
        self.r = float(r)
        self.n = n
        self.grid = grid
        self.test_functions = list(test_functions)
        self.records = sorted(records, key=lambda rec: rec.trial)
        self.failures = sorted(failures, key=lambda f: f.trial)

    @property
    def trials(self):
        return len(self.records)

    @property
    def attempted(self):
        return len(self.records) + len(self.failures)

    def _stack(self, field):
        return np.array([getattr(rec, field) for rec in self.records],
                        dtype=float)

    @property
    def total_masses(self):
        return self._stack("total_mass")

    @property
    def mean_total_mass(self):
        return float(_mean(self.total_masses))

    @property
    def se_total_mass(self):
        return float(_standardError(self.total_masses))

    @property
    def bin_masses(self):
        return _mean(self._stack("bins")).reshape(self.grid.shape)

    @property
    def bin_errors(self):
        return _standardError(self._stack("bins")).reshape(self.grid.shape)

    def _sectorStack(self):
        bins = self._stack("bins").reshape((-1,) + self.grid.shape)
        return bins.sum(axis=1)

    @property
    def sector_masses(self):
        return _mean(self._sectorStack())

    @property
    def sector_errors(self):
        return _standardError(self._sectorStack())

    @property
    def mean_pairings(self):
        return _mean(self._stack("pairings").reshape(self.trials, -1))

    @property
    def pairing_errors(self):
        return _standardError(self._stack("pairings").reshape(self.trials, -1))

    @property
    def mean_counts(self):
        return _mean(self._stack("counts").reshape(self.trials, -1))

    @property
    def count_errors(self):
        return _standardError(self._stack("counts").reshape(self.trials, -1))

    @property
    def mean_zero_count(self):
        return float(_mean(self._stack("zero_count")))

    @property
    def mean_elapsed(self):
        return float(_mean(self._stack("elapsed")))

    def merge(self, other):
        """Associative, commutative union of two aggregates."""
        if self.r != other.r or self.n != other.n or self.grid != other.grid:
            raise WindowMismatch("cannot merge aggregates of different runs")
        return AggregatedMeasure(self.r, self.n, self.grid,
                                 self.test_functions,
                                 self.records + other.records,
                                 self.failures + other.failures)

    @classmethod
    def from_measure(cls, measure, grid, test_functions, trial=0,
                     zeros=None, elapsed=0.):
        """One-trial aggregate of a weighted point measure."""
        record = _record(measure, grid, test_functions, trial, zeros, elapsed,
                         keepAtoms=True)
        return cls(measure.r, measure.n, grid, test_functions, [record])

    def to_dict(self):
        """Summary statistics as a JSON-serialisable document."""
        return {
            "r": self.r,
            "n": self.n,
            "trials": self.trials,
            "failures": [dict(f.record, trial=f.trial)
                         for f in self.failures],
            "mean_total_mass": self.mean_total_mass,
            "se_total_mass": self.se_total_mass,
            "mean_zero_count": self.mean_zero_count,
            "pairings": [
                {"test_function": str(phi), "mean": float(m),
                 "standard_error": float(s), "mean_count": float(c),
                 "count_standard_error": float(cs)}
                for phi, m, s, c, cs in zip(
                    self.test_functions, self.mean_pairings,
                    self.pairing_errors, self.mean_counts, self.count_errors)
            ],
            "grid": self.grid.to_dict(),
            "sector_masses": self.sector_masses.tolist(),
            "sector_errors": self.sector_errors.tolist(),
            "bin_masses": self.bin_masses.tolist(),
            "bin_errors": self.bin_errors.tolist(),
        }

    def write_atoms(self, path):
        """Dumps (trial, re, im, weight) rows of the kept atoms."""
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["trial", "re", "im", "weight"])
            for rec in self.records:
                if rec.atoms is None:
                    continue
                for z, w in zip(*rec.atoms):
                    writer.writerow([rec.trial, repr(float(z.real)),
                                     repr(float(z.imag)), repr(float(w))])


def _record(measure, grid, test_functions, trial, zeros, elapsed, keepAtoms):
    pairings = [pair(measure, phi) for phi in test_functions]
    if zeros is not None:
        keep = ~zeros.origin
        locations = zeros.locations[keep]
        multiplicities = zeros.multiplicities[keep]
    else:
        locations, multiplicities = measure.locations, np.ones(len(measure))
    counts = [float(np.dot(multiplicities, phi(locations)))
              if locations.size else 0. for phi in test_functions]
    return TrialRecord(
        trial=trial,
        total_mass=measure.total_mass,
        bins=grid.masses(measure.locations, measure.weights).reshape(-1),
        pairings=np.array(pairings, dtype=float),
        counts=np.array(counts, dtype=float),
        zero_count=float(multiplicities.sum()),
        elapsed=elapsed,
        atoms=(measure.locations, measure.weights) if keepAtoms else None,
    )


TrialJob = namedtuple("TrialJob", [
    "spec", "r", "grid", "test_functions", "template", "method", "tolerance",
    "keep_atoms",
])


def run_trial(job, trial):
    """Sample, locate zeros and measure one trial. Errors raised while
    evaluating the sample or locating its zeros are recorded as trial
    failures instead of raised."""
    watch = StopWatch()
    aggregate = AggregatedMeasure(job.r, job.spec.n, job.grid,
                                  job.test_functions)
    try:
        function = sample(job.spec, trial, template=job.template)
        zeros = find_zeros(function, job.r, job.tolerance, job.method)
    except ZeroLimitError as e:
        zerolimit.logger.warning("trial {0} failed: {1}".format(trial, e))
        aggregate.failures = [TrialFailure(trial, e.record())]
        return aggregate
    measure = normalized_counting_measure(zeros, job.spec.n)
    record = _record(measure, job.grid, job.test_functions, trial, zeros,
                     watch.get(), job.keep_atoms)
    aggregate.records = [record]
    zerolimit.logger.debug("trial {0}: {1} zeros, mass {2:.6f}".format(
        trial, record.zero_count, record.total_mass))
    return aggregate


def merge(left, right):
    return left.merge(right)


def monte_carlo_expectation(spec, r, M, grid=None, test_functions=(),
                            form=REDUCED, method="auto", tolerance=1e-10,
                            keep_atoms=False):
    """Estimates E Z(r, G_n) over trials 0..M-1.

    :param spec: The EnsembleSpec.
    :param r: Disk radius.
    :param M: Number of trials, at least 1.
    :param grid: The BinGrid; defaults to 40 x 24 bins.
    :param test_functions: TestFunctions to pair every trial with.
    :param form: ``reduced`` or ``full`` term layout.
    :param method: Zero finder routing, see :func:`zeros.find_zeros`.
    :param keep_atoms: Keep per-trial atoms for CSV dumps.

    :returns: An AggregatedMeasure.

    :raises TrialFailureRate: if more than 2% of the trials failed."""
    if M < 1:
        raise ValueError("need at least one trial")
    if grid is None:
        grid = BinGrid(r)
    job = TrialJob(spec, float(r), grid, list(test_functions),
                   representation(spec, form), method, tolerance, keep_atoms)
    aggregate = futures.mapReduce(partial(run_trial, job), merge, range(M))
    aggregate.test_functions = list(test_functions)
    if aggregate.trials:
        zerolimit.logger.info("n={0}: {1} trials, {2} failed, mean mass "
                              "{3:.6f}, {4:.3f} s per trial".format(
                                  spec.n, aggregate.trials,
                                  len(aggregate.failures),
                                  aggregate.mean_total_mass,
                                  aggregate.mean_elapsed))
    else:
        zerolimit.logger.info("n={0}: all {1} trials failed".format(
            spec.n, M))
    if len(aggregate.failures) > MAX_FAILURE_RATE * M:
        raise TrialFailureRate(len(aggregate.failures), M)
    return aggregate


Comparison = namedtuple("Comparison", [
    "test_function", "empirical", "standard_error", "theoretical", "gap",
    "gap_in_se",
])


class ComparisonReport(object):
    """Pairing gaps and the binned discrepancy of an empirical aggregate
    against a theoretical measure."""
    def __init__(self, rows, discrepancy, empirical_bins, theoretical_bins):
        self.rows = rows
        self.discrepancy = discrepancy
        self.empirical_bins = empirical_bins
        self.theoretical_bins = theoretical_bins

    def to_dict(self):
        return {
            "pairings": [
                {"test_function": str(row.test_function),
                 "empirical": row.empirical,
                 "standard_error": row.standard_error,
                 "theoretical": row.theoretical,
                 "gap": row.gap,
                 "gap_in_se": row.gap_in_se}
                for row in self.rows
            ],
            "binned_discrepancy": self.discrepancy,
        }


def compare(empirical, theoretical, test_functions=None):
    """Compares an AggregatedMeasure with a LimitMeasure or ExpectedMeasure.

    :raises WindowMismatch: if the radii differ."""
    if theoretical.r is not None and \
            abs(empirical.r - theoretical.r) > 1e-12 * empirical.r:
        raise WindowMismatch("empirical r={0} but theoretical r={1}".format(
            empirical.r, theoretical.r))
    if test_functions is None:
        test_functions = empirical.test_functions
    points = theoretical.as_point_measure(empirical.r)
    theoreticalBins = empirical.grid.masses(points.locations, points.weights)
    empiricalBins = empirical.bin_masses
    indexOf = dict((str(phi), i) for i, phi in
                   enumerate(empirical.test_functions))
    rows = []
    for phi in test_functions:
        if str(phi) in indexOf:
            i = indexOf[str(phi)]
            value = float(empirical.mean_pairings[i])
            error = float(empirical.pairing_errors[i])
        else:
            if any(rec.atoms is None for rec in empirical.records):
                raise ValueError("{0} was not declared for the run and no "
                                 "atoms were kept".format(phi))
            values = np.array([pair(WeightedPointMeasure(
                rec.atoms[0], rec.atoms[1], empirical.r, empirical.n), phi)
                for rec in empirical.records])
            value = float(values.mean())
            error = float(_standardError(values[:, None])[0])
        expected = pair(points, phi)
        gap = value - expected
        if error > 0:
            inSe = abs(gap) / error
        else:
            inSe = 0. if gap == 0 else float("inf")
        rows.append(Comparison(phi, value, error, expected, gap, inSe))
    discrepancy = float(np.abs(empiricalBins - theoreticalBins).sum())
    return ComparisonReport(rows, discrepancy, empiricalBins, theoreticalBins)
