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
"""Exceptions raised by zerolimit.

Every error carries its structured fields so the launcher can write a
machine-readable error record."""


def _rebuild(cls, message, state):
    error = cls.__new__(cls)
    Exception.__init__(error, message)
    error.__dict__.update(state)
    return error


class ZeroLimitError(Exception):
    """Base class of every error raised by zerolimit."""
    fields = ()

    def __reduce__(self):
        # Subclass constructors take structured fields, not the message
        return (_rebuild, (self.__class__, str(self), self.__dict__))

    def record(self):
        """Returns a JSON-serialisable description of the error."""
        entry = {"error": self.__class__.__name__, "message": str(self)}
        for name in self.fields:
            value = getattr(self, name, None)
            if isinstance(value, complex):
                value = [value.real, value.imag]
            entry[name] = value
        return entry


class ConfigError(ZeroLimitError):
    """A run configuration field is missing or invalid."""
    fields = ("field",)

    def __init__(self, field, message):
        super(ConfigError, self).__init__(
            "config field '{0}': {1}".format(field, message)
        )
        self.field = field


class ParseError(ZeroLimitError):
    """A basis expression could not be parsed."""
    fields = ("line", "column")

    def __init__(self, message, line, column):
        super(ParseError, self).__init__(
            "line {0}, column {1}: {2}".format(line, column, message)
        )
        self.line = line
        self.column = column


class EvaluationOverflow(ZeroLimitError):
    """Evaluation produced a non-finite value."""
    fields = ("z",)

    def __init__(self, z):
        z = complex(z)
        super(EvaluationOverflow, self).__init__(
            "non-finite value at z={0!r}".format(z)
        )
        self.z = z


class DomainError(ZeroLimitError):
    """A quantity was requested at a common zero of the basis."""
    fields = ("z",)

    def __init__(self, z):
        z = complex(z)
        super(DomainError, self).__init__(
            "all basis functions vanish at z={0!r}".format(z)
        )
        self.z = z


class TermCountOverflow(ZeroLimitError):
    """The number of ensemble terms exceeds the platform integer."""
    fields = ("ell", "n")

    def __init__(self, ell, n):
        super(TermCountOverflow, self).__init__(
            "term count for l={0}, n={1} exceeds sys.maxsize".format(ell, n)
        )
        self.ell = ell
        self.n = n


class TermBudgetExceeded(ZeroLimitError):
    """The full tensor form has too many terms; use the reduced form."""
    fields = ("count", "budget")

    def __init__(self, count, budget):
        super(TermBudgetExceeded, self).__init__(
            "full form needs {0} terms (budget {1}); use the reduced "
            "form".format(count, budget)
        )
        self.count = count
        self.budget = budget


class DegreeOverflow(ZeroLimitError):
    """The expanded polynomial degree is too large."""
    fields = ("degree",)

    def __init__(self, degree):
        super(DegreeOverflow, self).__init__(
            "expanded degree {0} exceeds the limit".format(degree)
        )
        self.degree = degree


class ZeroFinderError(ZeroLimitError):
    """Base class of the zero-finder failures."""


class NonConvergence(ZeroFinderError):
    """Simultaneous iteration did not converge."""
    fields = ("worst_residual", "iterations")

    def __init__(self, worst_residual, iterations):
        super(NonConvergence, self).__init__(
            "no convergence after {0} iterations (worst residual "
            "{1:.3e})".format(iterations, worst_residual)
        )
        self.worst_residual = float(worst_residual)
        self.iterations = iterations


class BoundaryZeroUnresolvable(ZeroFinderError):
    """A zero stays on the contour after every dilation."""
    fields = ("box",)

    def __init__(self, box):
        super(BoundaryZeroUnresolvable, self).__init__(
            "zero on the boundary of box {0} after all retries".format(box)
        )
        self.box = list(box)


class QuadratureNonconvergence(ZeroFinderError):
    """The contour integral did not reach an integer."""
    fields = ("value", "intervals")

    def __init__(self, value, intervals):
        super(QuadratureNonconvergence, self).__init__(
            "contour integral {0!r} not resolved ({1} intervals)".format(
                value, intervals)
        )
        self.value = complex(value)
        self.intervals = intervals


class CountMismatch(ZeroFinderError):
    """Located zeros disagree with the whole-disk count."""
    fields = ("expected", "found", "boxes")

    def __init__(self, expected, found, boxes=()):
        super(CountMismatch, self).__init__(
            "whole-disk count {0} but {1} zeros located".format(
                expected, found)
        )
        self.expected = expected
        self.found = found
        self.boxes = [list(b) for b in boxes]


class DegenerateSample(ZeroFinderError):
    """The sampled function is numerically zero on the disk."""


class DegenerateNormalization(ZeroLimitError):
    """The counting measure needs n >= 1."""


class TrialFailureRate(ZeroLimitError):
    """Too many Monte Carlo trials failed."""
    fields = ("failures", "trials")

    def __init__(self, failures, trials):
        super(TrialFailureRate, self).__init__(
            "{0} of {1} trials failed".format(failures, trials)
        )
        self.failures = failures
        self.trials = trials


class WindowMismatch(ZeroLimitError):
    """Measures compared over different radii or windows."""


class WindowTooSmall(ZeroLimitError):
    """The grid window does not contain the closed disk."""
    fields = ("window", "r")

    def __init__(self, window, r):
        super(WindowTooSmall, self).__init__(
            "window {0} does not contain the disk of radius {1}".format(
                tuple(window), r)
        )
        self.window = list(window)
        self.r = r


class QuadratureDomainTooSmall(ZeroLimitError):
    """Too much kernel mass lies outside the quadrature domain."""
    fields = ("tail_mass",)

    def __init__(self, tail_mass):
        super(QuadratureDomainTooSmall, self).__init__(
            "kernel mass {0:.3e} outside the domain".format(tail_mass)
        )
        self.tail_mass = float(tail_mass)


class GridTooCoarse(ZeroLimitError):
    """Halving the grid step moved the probe by more than 5%."""
    fields = ("coarse", "fine")

    def __init__(self, coarse, fine):
        super(GridTooCoarse, self).__init__(
            "grid too coarse: {0!r} at h, {1!r} at h/2".format(coarse, fine)
        )
        self.coarse = float(coarse)
        self.fine = float(fine)


class WorkerLost(ZeroLimitError):
    """Every worker of the pool died."""


class RemoteError(ZeroLimitError):
    """A worker raised an exception that could not be shipped back."""
    fields = ("traceback",)

    def __init__(self, message, traceback):
        super(RemoteError, self).__init__(message)
        self.traceback = traceback


class DerivativeMismatch(ZeroLimitError):
    """A symbolic derivative disagrees with central differences."""
    fields = ("index", "z", "error")

    def __init__(self, index, z, error):
        z = complex(z)
        super(DerivativeMismatch, self).__init__(
            "derivative of basis function {0} off by {1:.3e} at "
            "z={2!r}".format(index, error, z)
        )
        self.index = index
        self.z = z
        self.error = float(error)
