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
"""Run configuration: a JSON document validated field by field.

Command line flags override individual fields; see ``README.txt`` for the
schema."""
import hashlib
import json
import os

import zerolimit
from . import utils
from .basis import load_basis, parse_basis
from .ensemble import FULL, REDUCED
from .exceptions import ConfigError
from .limit import NORMALIZATIONS, TWO_PI
from .measures import parse_test_function


DEFAULTS = {
    "basis": ["z"],
    "n": 300,
    "r": 2.,
    "trials": 50,
    "seed": 0,
    "resolution": 512,
    "window": None,
    "curve_normalization": TWO_PI,
    "test_functions": ["constant"],
    "output": "zerolimit-out",
    "workers": None,
    "form": REDUCED,
    "method": "auto",
    "tolerance": 1e-10,
    "radial_bins": 40,
    "angular_bins": 24,
    "dump_zeros": False,
    "overlay": False,
    "expected": True,
    "lemma_n": [10, 100, 1000],
}


def _positiveInt(field, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int) or \
            value < minimum:
        raise ConfigError(field, "expected an integer >= {0}, got "
                                 "{1!r}".format(minimum, value))
    return value


def _increasing(field, values):
    if isinstance(values, int) and not isinstance(values, bool):
        values = [values]
    if not isinstance(values, list) or not values:
        raise ConfigError(field, "expected an integer or a list of them")
    values = [_positiveInt(field, v) for v in values]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(field, "sweep must be strictly increasing")
    return values


class RunConfig(object):
    """Validated run configuration.

    :param document: Mapping of configuration fields; missing fields take
        their defaults.
    :param base: Directory relative basis paths are resolved against."""
    def __init__(self, document=None, base="."):
        document = dict(document or {})
        unknown = set(document) - set(DEFAULTS)
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown field")
        self.document = dict(DEFAULTS)
        self.document.update(document)
        self.base = base
        self.validate()

    @classmethod
    def load(cls, path):
        try:
            with open(path) as f:
                document = json.load(f)
        except ValueError as e:
            raise ConfigError("<document>", str(e))
        if not isinstance(document, dict):
            raise ConfigError("<document>", "expected a JSON object")
        return cls(document, os.path.dirname(os.path.abspath(path)))

    def __getattr__(self, name):
        try:
            return self.__dict__["document"][name]
        except KeyError:
            raise AttributeError(name)

    def validate(self):
        d = self.document
        self.ns = _increasing("n", d["n"])
        if not isinstance(d["r"], (int, float)) or d["r"] <= 0:
            raise ConfigError("r", "expected a positive number")
        _positiveInt("trials", d["trials"])
        _positiveInt("seed", d["seed"], 0)
        _positiveInt("resolution", d["resolution"], 16)
        _positiveInt("radial_bins", d["radial_bins"])
        _positiveInt("angular_bins", d["angular_bins"])
        if d["workers"] is not None:
            _positiveInt("workers", d["workers"])
        if d["window"] is not None:
            window = d["window"]
            if not isinstance(window, list) or len(window) != 4 or \
                    window[0] >= window[1] or window[2] >= window[3]:
                raise ConfigError("window", "expected [xmin, xmax, ymin, "
                                            "ymax]")
        if d["curve_normalization"] not in NORMALIZATIONS:
            raise ConfigError("curve_normalization", "expected one of "
                              "{0}".format(", ".join(NORMALIZATIONS)))
        if d["form"] not in (FULL, REDUCED):
            raise ConfigError("form", "expected 'full' or 'reduced'")
        if d["method"] not in ("auto", "polynomial", "argument"):
            raise ConfigError("method", "expected auto, polynomial or "
                                        "argument")
        if not isinstance(d["tolerance"], (int, float)) or \
                d["tolerance"] <= 0:
            raise ConfigError("tolerance", "expected a positive number")
        self.lemma_ns = _increasing("lemma_n", d["lemma_n"])
        try:
            self.phis = [parse_test_function(t) for t in d["test_functions"]]
        except (ValueError, TypeError, AttributeError) as e:
            raise ConfigError("test_functions", str(e))
        if not isinstance(d["basis"], (str, list)):
            raise ConfigError("basis", "expected a file path or a list of "
                                       "expressions")

    def override(self, **fields):
        """Returns a copy with the non-None ``fields`` replaced."""
        document = dict(self.document)
        document.update((k, v) for k, v in fields.items() if v is not None)
        return RunConfig(document, self.base)

    @property
    def window(self):
        if self.document["window"] is not None:
            return tuple(float(v) for v in self.document["window"])
        r = float(self.r)
        return (-r, r, -r, r)

    @property
    def worker_count(self):
        return utils.getWorkerQte(self.workers)

    def basis_system(self):
        """Parses the basis from its file or inline expression list."""
        basis = self.document["basis"]
        if isinstance(basis, list):
            return parse_basis("\n".join(basis))
        return load_basis(os.path.join(self.base, basis))

    def to_dict(self):
        return dict(self.document)

    def digest(self, *fields):
        """Hash of the canonical JSON of ``fields`` (all when empty)."""
        chosen = fields or sorted(self.document)
        text = json.dumps(dict((k, self.document[k]) for k in chosen),
                          sort_keys=True)
        if isinstance(self.document["basis"], str):
            with open(os.path.join(self.base, self.document["basis"])) as f:
                text += f.read()
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def log(self):
        zerolimit.logger.info("config: {0}".format(
            json.dumps(self.document, sort_keys=True)))
