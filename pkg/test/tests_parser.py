#!/usr/bin/env python
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
import json
import os
import shutil
import tempfile
import unittest

from zerolimit import utils
from zerolimit.config import RunConfig
from zerolimit.exceptions import ConfigError
from zerolimit.launcher import makeParser


class TestUtils(unittest.TestCase):
    def setUp(self):
        self.backup = os.environ.copy()
        os.environ.pop(utils.WORKERS_ENVIRONMENT_VARIABLE, None)

    def tearDown(self):
        os.environ.clear()
        os.environ.update(self.backup)

    def test_getCpuCount(self):
        """We cannot know the core count of the test host, so we only check
        that getCPUcount() returns a positive int."""
        self.assertIsInstance(utils.getCPUcount(), int)
        self.assertTrue(utils.getCPUcount() > 0)

    def test_getWorkerQteDefault(self):
        self.assertEqual(utils.getWorkerQte(), 1)

    def test_getWorkerQteConfigured(self):
        os.environ[utils.WORKERS_ENVIRONMENT_VARIABLE] = "6"
        self.assertEqual(utils.getWorkerQte(3), 3)

    def test_getWorkerQteEnvironment(self):
        os.environ[utils.WORKERS_ENVIRONMENT_VARIABLE] = "6"
        self.assertEqual(utils.getWorkerQte(), 6)
        os.environ[utils.WORKERS_ENVIRONMENT_VARIABLE] = "auto"
        self.assertEqual(utils.getWorkerQte(), utils.getCPUcount())


class TestConfig(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.ns, [300])
        self.assertEqual(config.window, (-2., 2., -2., 2.))
        self.assertEqual(str(config.phis[0]), "constant")
        self.assertEqual(config.basis_system().ell, 1)

    def test_sweep(self):
        config = RunConfig({"n": [50, 300]})
        self.assertEqual(config.ns, [50, 300])
        self.assertRaises(ConfigError, RunConfig, {"n": [300, 50]})
        self.assertRaises(ConfigError, RunConfig, {"n": 0})

    def test_invalid_fields(self):
        for document in ({"r": -1}, {"trials": 0}, {"resolution": 8},
                         {"form": "tensor"}, {"window": [1, 0, 0, 1]},
                         {"curve_normalization": "half"},
                         {"test_functions": ["sector:1"]},
                         {"basis": 3}, {"colour": "red"}):
            with self.assertRaises(ConfigError) as context:
                RunConfig(document)
            self.assertIn("field", context.exception.record())

    def test_load(self):
        with open(os.path.join(self.directory, "basis.txt"), "w") as f:
            f.write("z\n1\n")
        path = os.path.join(self.directory, "run.json")
        with open(path, "w") as f:
            json.dump({"basis": "basis.txt", "n": 10, "trials": 3}, f)
        config = RunConfig.load(path)
        self.assertEqual(config.trials, 3)
        self.assertEqual(config.basis_system().ell, 2)
        self.assertEqual(len(config.digest()), 16)

    def test_override(self):
        config = RunConfig({"trials": 3}).override(trials=None, seed=9)
        self.assertEqual(config.trials, 3)
        self.assertEqual(config.seed, 9)

    def test_digest(self):
        a = RunConfig({"n": 10})
        b = RunConfig({"n": 10, "overlay": True})
        self.assertEqual(a.digest("basis", "n"), b.digest("basis", "n"))
        self.assertNotEqual(a.digest(), b.digest())


class TestCommandLine(unittest.TestCase):
    def test_parse(self):
        args = makeParser().parse_args(["compare", "--n", "50", "300",
                                        "--r", "2", "-vv"])
        self.assertEqual(args.command, "compare")
        self.assertEqual(args.n, [50, 300])
        self.assertEqual(args.r, 2.)
        self.assertEqual(args.verbose, 3)

    def test_unknown_command(self):
        with self.assertRaises(SystemExit):
            makeParser().parse_args(["fly"])


if __name__ == "__main__":
    unittest.main()
