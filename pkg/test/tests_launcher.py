import json
import os
import shutil
import tempfile
import unittest

try:
    import matplotlib
except ImportError:
    matplotlib = None

from zerolimit import launcher
from zerolimit.config import RunConfig
from zerolimit.launcher import App


class TestApp(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def config(self, **fields):
        document = {"output": self.directory, "resolution": 64,
                    "trials": 3, "n": 6}
        document.update(fields)
        return RunConfig(document)

    def read(self, name):
        with open(os.path.join(self.directory, name)) as f:
            return json.load(f)

    def test_simulate(self):
        report = App(self.config(test_functions=["constant", "sector:0:1"]),
                     "simulate").run()
        self.assertEqual(report["command"], "simulate")
        self.assertEqual(report["runs"][0]["trials"], 3)
        self.assertEqual(len(report["runs"][0]["pairings"]), 2)
        manifest = self.read("manifest.json")
        self.assertIn("report.json", manifest["files"])
        self.assertEqual(manifest["seed"], 0)
        self.assertEqual(self.read("report.json")["runs"][0]["trials"], 3)

    def test_cached_aggregate(self):
        first = App(self.config(), "simulate").run()
        cached = [name for name in os.listdir(self.directory)
                  if name.endswith(".pkl")]
        self.assertEqual(len(cached), 1)
        again = App(self.config(), "simulate").run()
        self.assertEqual(first["runs"][0]["mean_total_mass"],
                         again["runs"][0]["mean_total_mass"])

    def test_reproducible_report(self):
        reports = []
        for attempt in range(2):
            App(self.config(), "simulate", refresh=True).run()
            with open(os.path.join(self.directory, "report.json")) as f:
                reports.append(f.read())
        self.assertEqual(reports[0], reports[1])
        self.assertNotIn("seconds", reports[0])
        files = self.read("manifest.json")["files"]
        self.assertFalse([name for name in files if name.endswith(".pkl")])

    def test_dump_zeros(self):
        App(self.config(dump_zeros=True), "simulate").run()
        self.assertTrue(os.path.exists(os.path.join(self.directory,
                                                    "atoms-n6.csv")))

    def test_limit(self):
        report = App(self.config(resolution=256), "limit").run()
        self.assertAlmostEqual(report["curve_mass"], 1., delta=0.02)
        self.assertIsNone(report["pairings_skipped"])
        pairing = report["pairings"][0]["limit_pairing"]
        self.assertAlmostEqual(pairing, 0.6931, delta=0.02)
        for name in ("limit-grid.csv", "limit-curve.csv"):
            self.assertTrue(os.path.exists(os.path.join(self.directory,
                                                        name)))

    def test_limit_window_without_disk(self):
        report = App(self.config(basis=["exp(z)"], window=[-1, 1, -4, 4],
                                 r=3., resolution=63), "limit").run()
        self.assertIsNone(report["pairings"][0]["limit_pairing"])
        self.assertEqual(report["pairings_skipped"]["error"],
                         "WindowTooSmall")
        self.assertAlmostEqual(report["curve_mass"], 8 / (2 * 3.14159265),
                               delta=0.01)

    def test_compare(self):
        report = App(self.config(n=[4, 8]), "compare").run()
        self.assertEqual([run["n"] for run in report["runs"]], [4, 8])
        run = report["runs"][0]
        self.assertEqual(set(run["limit"]), set(["two-pi", "paper-literal"]))
        self.assertIn("expected", run)
        self.assertEqual(len(report["trend"]["discrepancies"]), 2)
        with open(os.path.join(self.directory, "discrepancy.csv")) as f:
            # Two normalizations and the expected oracle per degree
            self.assertEqual(len(f.read().splitlines()), 1 + 2 * 3)

    @unittest.skipIf(matplotlib is None, "matplotlib not installed")
    def test_reproducible_overlay(self):
        figures = []
        for attempt in range(2):
            App(self.config(n=4, overlay=True), "compare").run()
            with open(os.path.join(self.directory, "overlay.svg")) as f:
                figures.append(f.read())
        self.assertEqual(figures[0], figures[1])

    def test_lemmas(self):
        report = App(self.config(lemma_n=[10]), "lemmas").run()
        self.assertEqual(len(report["probes"]), 6)
        with open(os.path.join(self.directory, "lemmas.csv")) as f:
            self.assertEqual(len(f.read().splitlines()), 7)

    def test_roots(self):
        report = App(self.config(), "roots").run()
        self.assertTrue(report["self_test"]["passed"])
        self.assertEqual(report["dual_path"]["samples"], 20)
        self.assertTrue(report["passed"])

    def test_unknown_command(self):
        self.assertRaises(ValueError, App, self.config(), "fly")


class TestMain(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def write(self, document):
        path = os.path.join(self.directory, "run.json")
        with open(path, "w") as f:
            json.dump(document, f)
        return path

    def test_success(self):
        path = self.write({"n": 1, "trials": 1, "resolution": 32})
        launcher.main(["simulate", "--config", path, "--out",
                       self.directory, "-q"])
        self.assertTrue(os.path.exists(os.path.join(self.directory,
                                                    "report.json")))

    def test_parse_error(self):
        path = self.write({"basis": ["z +"], "n": 2, "trials": 1})
        with self.assertRaises(SystemExit) as context:
            launcher.main(["simulate", "--config", path, "--out",
                           self.directory, "-q"])
        self.assertEqual(context.exception.code, 1)
        with open(os.path.join(self.directory, "error.json")) as f:
            record = json.load(f)
        self.assertEqual(record["error"], "ParseError")
        self.assertEqual(record["line"], 1)

    def test_config_error(self):
        path = self.write({"trials": 0})
        with self.assertRaises(SystemExit) as context:
            launcher.main(["simulate", "--config", path, "--out",
                           self.directory, "-q"])
        self.assertEqual(context.exception.code, 1)
        with open(os.path.join(self.directory, "error.json")) as f:
            self.assertEqual(json.load(f)["field"], "trials")


if __name__ == "__main__":
    unittest.main(verbosity=2)
