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
"""Command line front-end: ``zerolimit <subcommand> [--config FILE]``."""
import argparse
import logging
import os
import pickle
import sys
import traceback

import numpy as np

import zerolimit
from . import futures, reporting, utils
from .basis import parse_basis
from .config import DEFAULTS, RunConfig
from .ensemble import EnsembleSpec, sample
from .exceptions import WindowTooSmall, ZeroLimitError, ZeroFinderError
from .lemmas import probe_rows
from .limit import (
    NORMALIZATIONS,
    ExpectedMeasure,
    LimitMeasure,
    limit_pairing,
    renormalized,
)
from .measures import BinGrid, compare, monte_carlo_expectation
from .zeros import dual_path_check, find_zeros_polynomial


COMMANDS = ("simulate", "limit", "compare", "lemmas", "roots")
ROOT_DEGREES = (5, 20, 50)
ROOT_SAMPLES = 20
ROOT_TOLERANCE = 1e-8

# Fields an aggregate depends on
AGGREGATE_FIELDS = ("basis", "r", "trials", "seed", "form", "method",
                    "tolerance", "radial_bins", "angular_bins",
                    "test_functions")


class App(object):
    """zerolimit application. Runs one subcommand against a RunConfig."""
    def __init__(self, config, command, refresh=False):
        if command not in COMMANDS:
            raise ValueError("unknown command {0!r}".format(command))
        self.config = config
        self.command = command
        self.refresh = refresh
        self.files = set()
        self._basis = None
        os.makedirs(config.output, exist_ok=True)

    @property
    def basis(self):
        if self._basis is None:
            self._basis = self.config.basis_system()
        return self._basis

    def path(self, name):
        self.files.add(name)
        return os.path.join(self.config.output, name)

    def run(self):
        """Runs the subcommand and writes its report and the manifest.

        :returns: The report document."""
        self.config.log()
        report = getattr(self, "run_" + self.command)()
        report["command"] = self.command
        report["run_config"] = self.config.to_dict()
        reporting.write_json(self.path("report.json"), report)
        reporting.write_manifest(self.config.output, self.config,
                                 self.command, self.files)
        return report

    def aggregate(self, n):
        """Monte Carlo aggregate for degree ``n``, cached in the output
        directory under a digest of the fields it depends on."""
        keep = bool(self.config.dump_zeros or self.config.overlay)
        # Not listed in the manifest: it holds wall times
        cache = os.path.join(self.config.output,
                             "aggregate-n{0}-{1}.pkl".format(
                                 n, self.config.digest(*AGGREGATE_FIELDS)))
        if not self.refresh and os.path.exists(cache):
            with open(cache, "rb") as f:
                aggregate = pickle.load(f)
            if not keep or all(rec.atoms is not None
                               for rec in aggregate.records):
                zerolimit.logger.info("Using cached aggregate for "
                                      "n={0}.".format(n))
                return aggregate
        c = self.config
        spec = EnsembleSpec(self.basis, n, c.seed)
        grid = BinGrid(c.r, c.radial_bins, c.angular_bins)
        watch = utils.StopWatch()
        aggregate = monte_carlo_expectation(
            spec, c.r, c.trials, grid, c.phis, form=c.form, method=c.method,
            tolerance=c.tolerance, keep_atoms=keep)
        zerolimit.logger.info("n={0}: {1} trials in {2:.1f}s".format(
            n, aggregate.trials, watch.get()))
        with open(cache, "wb") as f:
            pickle.dump(aggregate, f, pickle.HIGHEST_PROTOCOL)
        if c.dump_zeros:
            aggregate.write_atoms(self.path("atoms-n{0}.csv".format(n)))
        return aggregate

    def limit(self):
        c = self.config
        return LimitMeasure(self.basis, c.window, c.resolution, c.r,
                            c.curve_normalization)

    def run_simulate(self):
        runs = []
        for n in self.config.ns:
            document = self.aggregate(n).to_dict()
            runs.append(document)
        return {"runs": runs}

    def run_limit(self):
        c = self.config
        limit = self.limit()
        limit.write_grid(self.path("limit-grid.csv"))
        limit.write_curve(self.path("limit-curve.csv"))
        masses = [limit.pair_unweighted(phi) for phi in c.phis]
        skipped = None
        try:
            pairings = [limit_pairing(limit, phi) for phi in c.phis]
        except WindowTooSmall as e:
            zerolimit.logger.warning("No kernel pairings: {0}".format(e))
            pairings = [None] * len(c.phis)
            skipped = e.record()
        return {
            "pairings_skipped": skipped,
            "curve_mass": limit.curve_mass,
            "arclength": limit.arclength,
            "segments": len(limit.segments),
            "degenerate_segments": int(limit.degenerate.sum())
            if limit.segments else 0,
            "pairings": [
                {"test_function": str(phi), "mass": m, "limit_pairing": p}
                for phi, m, p in zip(c.phis, masses, pairings)
            ],
        }

    def run_compare(self):
        c = self.config
        limit = self.limit()
        limit.quadrature(c.r)
        limits = dict((mode, renormalized(limit, mode))
                      for mode in NORMALIZATIONS)
        runs, rows, aggregates = [], [], []
        for n in c.ns:
            aggregate = self.aggregate(n)
            aggregates.append(aggregate)
            run = {"n": n, "trials": aggregate.trials,
                   "mean_total_mass": aggregate.mean_total_mass,
                   "limit": {}}
            for mode in NORMALIZATIONS:
                report = compare(aggregate, limits[mode])
                run["limit"][mode] = report.to_dict()
                rows.append((n, "limit", mode, report.discrepancy))
            if c.expected:
                expected = ExpectedMeasure(self.basis, n, c.window,
                                           c.resolution, c.r)
                report = compare(aggregate, expected)
                run["expected"] = report.to_dict()
                rows.append((n, "expected", "", report.discrepancy))
            runs.append(run)
        trend = [run["limit"][c.curve_normalization]["binned_discrepancy"]
                 for run in runs]
        monotone = all(b < a for a, b in zip(trend, trend[1:]))
        if not monotone:
            zerolimit.logger.warning("Discrepancy is not decreasing in n: "
                                     "{0}".format(trend))
        reporting.write_rows(self.path("discrepancy.csv"),
                             ["n", "oracle", "normalization", "discrepancy"],
                             rows)
        if c.overlay:
            if reporting.write_overlay(self.path("overlay.svg"), limit,
                                       aggregates):
                self.files.add("overlay.svg")
            else:
                self.files.discard("overlay.svg")
        return {"runs": runs,
                "trend": {"discrepancies": trend, "monotone": monotone}}

    def run_lemmas(self):
        rows = probe_rows(self.config.lemma_ns)
        reporting.write_rows(self.path("lemmas.csv"),
                             ["lemma", "n", "parameter", "value", "target",
                              "gap"], rows)
        return {"probes": [row._asdict() for row in rows]}

    def run_roots(self):
        c = self.config
        # Self-test on the cube roots of unity
        zeros = find_zeros_polynomial([-1, 0, 0, 1], 2.)
        exact = np.exp(2j * np.pi * np.arange(3) / 3)
        gap = max(np.abs(exact - z).min() for z in zeros.locations) \
            if len(zeros) else float("inf")
        selfTest = {"zeros": zeros.total, "residual": zeros.residual,
                    "gap": float(gap),
                    "passed": zeros.total == 3 and gap < ROOT_TOLERANCE}
        kac = EnsembleSpec(parse_basis("z"), 1, c.seed)
        rows = []
        for trial in range(ROOT_SAMPLES):
            degree = ROOT_DEGREES[trial % len(ROOT_DEGREES)]
            function = sample(kac._replace(n=degree), trial)
            try:
                check = dual_path_check(function, c.r, c.tolerance)
            except ZeroFinderError as e:
                zerolimit.logger.error("roots trial {0}: {1}".format(trial,
                                                                     e))
                rows.append((trial, degree, float("inf"), -1, -1, -1, False))
                continue
            passed = (check.distance <= ROOT_TOLERANCE and
                      check.polynomial_count == check.disk_count and
                      check.argument_count == check.disk_count)
            rows.append((trial, degree) + tuple(check) + (passed,))
        reporting.write_rows(self.path("roots.csv"),
                             ["trial", "degree", "distance",
                              "polynomial_count", "argument_count",
                              "disk_count", "passed"], rows)
        return {
            "self_test": selfTest,
            "dual_path": {
                "samples": len(rows),
                "max_distance": max(row[2] for row in rows),
                "passed": all(row[-1] for row in rows),
            },
            "passed": selfTest["passed"] and all(row[-1] for row in rows),
        }


def run_simulate(config, **kwargs):
    return App(config, "simulate", **kwargs).run()


def run_limit(config, **kwargs):
    return App(config, "limit", **kwargs).run()


def run_compare(config, **kwargs):
    return App(config, "compare", **kwargs).run()


def run_lemmas(config, **kwargs):
    return App(config, "lemmas", **kwargs).run()


def run_roots(config, **kwargs):
    return App(config, "roots", **kwargs).run()


def makeParser():
    """Create the zerolimit arguments parser."""
    parser = argparse.ArgumentParser(
        description="Simulates zeros of random entire functions and checks "
                    "them against their limiting distribution.",
        prog="{0} -m zerolimit".format(sys.executable),
    )
    parser.add_argument('command',
                        choices=COMMANDS,
                        help="The subcommand to run")
    parser.add_argument('--config', '-c',
                        help="JSON run configuration",
                        metavar="FileName")
    parser.add_argument('--n',
                        type=int,
                        nargs='+',
                        help="Degree or strictly increasing degree sweep")
    parser.add_argument('--r',
                        type=float,
                        help="Disk radius")
    parser.add_argument('--trials',
                        type=int,
                        help="Monte Carlo trials per degree")
    parser.add_argument('--seed',
                        type=int,
                        help="Ensemble seed")
    parser.add_argument('--out',
                        help="Output directory",
                        metavar="Directory")
    parser.add_argument('--workers',
                        type=int,
                        help="Worker processes (default: config, then "
                             "$ZEROLIMIT_WORKERS, then 1)")
    parser.add_argument('--nice',
                        type=int,
                        metavar="NiceLevel",
                        help="*nix niceness level (-20 to 19) of the "
                             "workers")
    parser.add_argument('--refresh',
                        help="Ignore cached aggregates",
                        action='store_true')
    parser.add_argument('--verbose', '-v',
                        action='count',
                        help="Verbosity level (-vv for more)",
                        default=1)
    parser.add_argument('--quiet', '-q',
                        action='store_true')
    return parser


def main(argv=None):
    """Parses the command line, runs the subcommand and exits with 0 on
    success, 1 on a zerolimit error and 2 on any other failure."""
    args = makeParser().parse_args(argv)
    verbose = args.verbose if not args.quiet else -1
    zerolimit.logger = utils.initLogging(verbosity=verbose)
    output = args.out or DEFAULTS["output"]
    exitCode = 0
    try:
        config = RunConfig.load(args.config) if args.config else RunConfig()
        n = args.n if args.n is None or len(args.n) > 1 else args.n[0]
        config = config.override(n=n, r=args.r, trials=args.trials,
                                 seed=args.seed, output=args.out,
                                 workers=args.workers)
        output = config.output
        futures.start(config.worker_count, max(verbose, 0), args.nice)
        report = App(config, args.command, args.refresh).run()
        if report.get("passed") is False:
            zerolimit.logger.error("Validation failed, see report.json.")
            exitCode = 1
    except ZeroLimitError as e:
        zerolimit.logger.error(str(e))
        reporting.write_error(output, e)
        exitCode = 1
    except Exception:
        logging.error(traceback.format_exc())
        exitCode = 2
    finally:
        futures.shutdown()
    if exitCode:
        sys.exit(exitCode)


if __name__ == "__main__":
    main()
