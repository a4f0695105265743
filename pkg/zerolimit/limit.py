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
"""The limiting zero measure of the ensemble and its finite-n counterpart.

The limit has an absolutely continuous part, (1/pi) ddbar log S outside
{S < 1}, and a singular part on the level curve {S = 1} weighted by the
argument form. Both are discretized to weighted points so pairings and bins
are computed exactly like those of an empirical measure."""
from collections import namedtuple
import csv

import numpy as np

import zerolimit
from .exceptions import DomainError, WindowTooSmall
from .measures import WeightedPointMeasure, pair


TWO_PI = "two-pi"
PAPER_LITERAL = "paper-literal"
NORMALIZATIONS = (TWO_PI, PAPER_LITERAL)

DEGENERATE_DERIVATIVE = 1e-16
BOUNDARY_SUBDIVISIONS = 8
ORIGIN_SUBDIVISIONS = 16
EXPECTED_CHUNK = 2 ** 22


def xi(x):
    """2/x above 1, 1 at 1, 0 below 1."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > 1, 2. / np.where(x > 1, x, 1.), 0.)
    out = np.where(x == 1, 1., out)
    return float(out) if out.ndim == 0 else out


def _gatedDensity(basis, z, s):
    """Q/pi where S > 1, Q/(2 pi) on S = 1, 0 elsewhere."""
    out = np.zeros(s.shape)
    mask = s >= 1
    if np.any(mask):
        q = np.asarray(basis.laplacian_log_norm(z[mask]))
        out[mask] = np.where(s[mask] > 1, q / np.pi, q / (2 * np.pi))
    return out


def ac_density(basis, z):
    """|f| Xi(|f|) (1/2pi) Q(z) with Q = ddbar log S.

    :raises DomainError: where every basis function vanishes."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    s = basis.norm_squared(z)
    if np.any(s == 0):
        raise DomainError(z[s == 0][0])
    out = _gatedDensity(basis, z, s)
    return float(out[0]) if scalar else out


def expected_density(basis, n, z):
    """Exact expected zero density of G_n divided by n, without kernel.

    (1/(n pi)) ddbar log sum_k S^k, written as
    (E[k] Q + Var[k] |<f', f>|^2 / S^2) / (n pi) with k distributed
    proportionally to S^k on 0..n."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex)).reshape(-1)
    f = basis.values(z)
    df = basis.derivative_values(z)
    s = np.sum(f.real ** 2 + f.imag ** 2, axis=0)
    derivativeNorm = np.sum(df.real ** 2 + df.imag ** 2, axis=0)
    out = derivativeNorm / (n * np.pi)
    positive = s > 0
    k = np.arange(n + 1, dtype=float)
    chunk = max(1, EXPECTED_CHUNK // (n + 1))
    index = np.nonzero(positive)[0]
    for start in range(0, index.size, chunk):
        part = index[start:start + chunk]
        logWeights = k[None, :] * np.log(s[part])[:, None]
        logWeights -= logWeights.max(axis=1, keepdims=True)
        weights = np.exp(logWeights)
        weights /= weights.sum(axis=1, keepdims=True)
        mean = weights @ k
        variance = np.maximum(weights @ (k * k) - mean * mean, 0.)
        q = np.asarray(basis.laplacian_log_norm(z[part]))
        cross = np.sum(df[:, part] * np.conj(f[:, part]), axis=0)
        gradient = (cross.real ** 2 + cross.imag ** 2) / s[part] ** 2
        out[part] = (mean * q + variance * gradient) / (n * np.pi)
    return float(out[0]) if scalar else out


Segment = namedtuple("Segment", ["start", "end", "degenerate"])

# Edge pairs crossed by the contour, corners ordered BL, BR, TR, TL and
# edges bottom, right, top, left. Saddles 5 and 10 are resolved separately.
_CASES = {
    1: ((3, 0),), 2: ((0, 1),), 3: ((3, 1),), 4: ((1, 2),),
    6: ((0, 2),), 7: ((3, 2),), 8: ((2, 3),), 9: ((0, 2),),
    11: ((1, 2),), 12: ((1, 3),), 13: ((0, 1),), 14: ((3, 0),),
}
_EDGES = ((0, 1), (1, 2), (2, 3), (3, 0))


def _gridNodes(window, resolution):
    xmin, xmax, ymin, ymax = window
    x = np.linspace(xmin, xmax, resolution + 1)
    y = np.linspace(ymin, ymax, resolution + 1)
    return x, y


def extract_level_curve(basis, window, resolution):
    """Marching squares of S = 1 over the window.

    :param window: (xmin, xmax, ymin, ymax).
    :param resolution: Cells per side, at least 16.

    :returns: A list of Segments oriented with {S < 1} on their left."""
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    x, y = _gridNodes(window, resolution)
    dx, dy = x[1] - x[0], y[1] - y[0]
    nodes = x[None, :] + 1j * y[:, None]
    f = basis.values(nodes)
    values = np.sum(f.real ** 2 + f.imag ** 2, axis=0) - 1
    df = basis.derivative_values(nodes)
    slopes = np.sum(df.real ** 2 + df.imag ** 2, axis=0)

    corners = np.stack([values[:-1, :-1], values[:-1, 1:],
                        values[1:, 1:], values[1:, :-1]])
    case = np.zeros(corners.shape[1:], dtype=np.int64)
    for bit in range(4):
        case |= (corners[bit] > 0).astype(np.int64) << bit

    rows, cols = np.nonzero((case != 0) & (case != 15))
    if not rows.size:
        return []
    centers = (x[cols] + dx / 2) + 1j * (y[rows] + dy / 2)
    fc = basis.values(centers)
    centerValues = np.sum(fc.real ** 2 + fc.imag ** 2, axis=0) - 1
    dfc = basis.derivative_values(centers)
    centerSlopes = np.sum(dfc.real ** 2 + dfc.imag ** 2, axis=0)

    segments = []
    for item, (j, i) in enumerate(zip(rows, cols)):
        v = corners[:, j, i]
        positions = (complex(x[i], y[j]), complex(x[i + 1], y[j]),
                     complex(x[i + 1], y[j + 1]), complex(x[i], y[j + 1]))
        c = case[j, i]
        if c == 5:
            pairs = ((0, 1), (2, 3)) if centerValues[item] > 0 \
                else ((3, 0), (1, 2))
        elif c == 10:
            pairs = ((3, 0), (1, 2)) if centerValues[item] > 0 \
                else ((0, 1), (2, 3))
        else:
            pairs = _CASES[c]
        degenerate = bool(
            min(slopes[j, i], slopes[j, i + 1], slopes[j + 1, i + 1],
                slopes[j + 1, i], centerSlopes[item]) < DEGENERATE_DERIVATIVE)
        for first, second in pairs:
            p0 = _crossing(v, positions, first)
            p1 = _crossing(v, positions, second)
            if abs(p1 - p0) <= 1e-15 * max(dx, dy):
                continue
            if _lowSideOnRight(v, positions[0], dx, dy, p0, p1):
                p0, p1 = p1, p0
            segments.append(Segment(p0, p1, degenerate))
    return segments


def _crossing(v, positions, edge):
    a, b = _EDGES[edge]
    t = v[a] / (v[a] - v[b])
    return positions[a] + t * (positions[b] - positions[a])


def _lowSideOnRight(v, origin, dx, dy, p0, p1):
    """True when the bilinear interpolant rises toward the segment's left."""
    mid = (p0 + p1) / 2 - origin
    u, s = mid.real / dx, mid.imag / dy
    gradX = ((v[1] - v[0]) * (1 - s) + (v[2] - v[3]) * s) / dx
    gradY = ((v[3] - v[0]) * (1 - u) + (v[2] - v[1]) * u) / dy
    tangent = p1 - p0
    return -tangent.imag * gradX + tangent.real * gradY > 0


def curve_weights(segments, basis, normalization=TWO_PI):
    """Argument-form weight of every segment at its midpoint.

    :returns: Array of nonnegative weights, 0 on degenerate segments."""
    if normalization not in NORMALIZATIONS:
        raise ValueError("unknown curve normalization {0!r}".format(
            normalization))
    if not segments:
        return np.zeros(0)
    starts = np.array([seg.start for seg in segments])
    ends = np.array([seg.end for seg in segments])
    midpoints = (starts + ends) / 2
    tangent = ends - starts
    f = basis.values(midpoints)
    df = basis.derivative_values(midpoints)
    form = np.sum(np.conj(f) * df, axis=0) * tangent
    weights = np.abs(form.imag)
    if normalization == TWO_PI:
        weights = weights / (2 * np.pi)
    degenerate = np.array([seg.degenerate for seg in segments])
    weights[degenerate] = 0.
    if np.any(degenerate):
        zerolimit.logger.warning("{0} degenerate curve segments carry no "
                                 "weight".format(int(degenerate.sum())))
    return weights


class _GridMeasure(object):
    """Cell-centred density on a window plus optional weighted segments."""
    def __init__(self, basis, window, resolution, r=None):
        self.basis = basis
        self.window = tuple(float(w) for w in window)
        self.resolution = int(resolution)
        self.r = None if r is None else float(r)
        x, y = _gridNodes(self.window, self.resolution)
        self.dx, self.dy = x[1] - x[0], y[1] - y[0]
        self.centers = ((x[:-1] + self.dx / 2)[None, :]
                        + 1j * (y[:-1] + self.dy / 2)[:, None])
        self.density = self._density(self.centers.reshape(-1)) \
            .reshape(self.centers.shape)
        self.segments = []
        self.weights = np.zeros(0)
        self._quadrature = {}

    def _density(self, z):
        raise NotImplementedError

    @property
    def midpoints(self):
        return np.array([(seg.start + seg.end) / 2 for seg in self.segments],
                        dtype=complex)

    @property
    def degenerate(self):
        return np.array([seg.degenerate for seg in self.segments], dtype=bool)

    @property
    def arclength(self):
        if not self.segments:
            return 0.
        lengths = np.array([abs(seg.end - seg.start)
                            for seg in self.segments])
        return float(lengths[~self.degenerate].sum())

    @property
    def curve_mass(self):
        return float(self.weights.sum())

    def _checkWindow(self, r):
        xmin, xmax, ymin, ymax = self.window
        if xmin > -r or xmax < r or ymin > -r or ymax < r:
            raise WindowTooSmall(self.window, r)

    def _refinedCells(self, cells, k, r):
        """k x k midpoint subsamples of the given flat cell indices."""
        offsets = (np.arange(k) + 0.5) / k - 0.5
        local = (offsets[None, :] * self.dx
                 + 1j * offsets[:, None] * self.dy).reshape(-1)
        points = (self.centers.reshape(-1)[cells][:, None]
                  + local[None, :]).reshape(-1)
        area = self.dx * self.dy / (k * k)
        return points, area

    def _kernelMasses(self, points, density, area, r):
        radius = np.abs(points)
        inside = (radius < r) & (radius > 0)
        masses = np.zeros(points.shape)
        masses[inside] = density[inside] * area * np.log(r / radius[inside])
        return points[inside], masses[inside]

    def quadrature(self, r=None):
        """The measure times log(r/|z|) as (points, masses) over |z| < r.

        Cells cut by the circle get an 8 x 8 midpoint rule and cells near
        the origin a 16 x 16 one; segments contribute their midpoints.

        :raises WindowTooSmall: if the window misses part of the disk."""
        r = self.r if r is None else float(r)
        if r in self._quadrature:
            return self._quadrature[r]
        self._checkWindow(r)
        centers = self.centers.reshape(-1)
        density = self.density.reshape(-1)
        diagonal = np.hypot(self.dx, self.dy)
        radius = np.abs(centers)
        nearOrigin = radius < 1.5 * diagonal
        nearCircle = (np.abs(radius - r) < diagonal) & ~nearOrigin
        plain = ~nearOrigin & ~nearCircle & (radius < r)

        parts = [self._kernelMasses(centers[plain], density[plain],
                                    self.dx * self.dy, r)]
        for mask, k in ((nearCircle, BOUNDARY_SUBDIVISIONS),
                        (nearOrigin, ORIGIN_SUBDIVISIONS)):
            cells = np.nonzero(mask)[0]
            if cells.size:
                points, area = self._refinedCells(cells, k, r)
                parts.append(self._kernelMasses(points, self._density(points),
                                                area, r))
        if self.segments:
            parts.append(self._kernelMasses(self.midpoints, self.weights, 1.,
                                            r))
        points = np.concatenate([p for p, _ in parts])
        masses = np.concatenate([m for _, m in parts])
        self._quadrature[r] = (points, masses)
        return points, masses

    def as_point_measure(self, r=None):
        r = self.r if r is None else float(r)
        points, masses = self.quadrature(r)
        return WeightedPointMeasure(points, masses, r, getattr(self, "n", None))

    def pair_unweighted(self, phi):
        """Integral of phi against the measure itself, without the kernel."""
        total = float(np.sum(self.density * phi(self.centers))
                      * self.dx * self.dy)
        if self.segments:
            total += float(np.dot(self.weights, phi(self.midpoints)))
        return total

    def write_grid(self, path):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["x", "y", "density"])
            for z, d in zip(self.centers.reshape(-1),
                            self.density.reshape(-1)):
                writer.writerow([repr(float(z.real)), repr(float(z.imag)),
                                 repr(float(d))])

    def write_curve(self, path):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["x0", "y0", "x1", "y1", "weight", "degenerate"])
            for seg, w in zip(self.segments, self.weights):
                writer.writerow([repr(float(seg.start.real)),
                                 repr(float(seg.start.imag)),
                                 repr(float(seg.end.real)),
                                 repr(float(seg.end.imag)),
                                 repr(float(w)), int(seg.degenerate)])


class LimitMeasure(_GridMeasure):
    """The limit of E Z(r, G_n) for a basis, before the log kernel.

    :param basis: The BasisSystem.
    :param window: (xmin, xmax, ymin, ymax) grid window.
    :param resolution: Cells per side.
    :param r: Default radius for :meth:`quadrature`.
    :param normalization: ``two-pi`` or ``paper-literal`` curve weights."""
    def __init__(self, basis, window, resolution=512, r=None,
                 normalization=TWO_PI):
        super(LimitMeasure, self).__init__(basis, window, resolution, r)
        self.normalization = normalization
        self.segments = extract_level_curve(basis, self.window,
                                            self.resolution)
        self.weights = curve_weights(self.segments, basis, normalization)
        zerolimit.logger.info("limit measure: {0} curve segments, curve "
                              "mass {1:.6f}".format(len(self.segments),
                                                    self.curve_mass))

    def _density(self, z):
        s = self.basis.norm_squared(z)
        out = np.zeros(s.shape)
        positive = s > 0
        out[positive] = _gatedDensity(self.basis, z[positive], s[positive])
        return out


class ExpectedMeasure(_GridMeasure):
    """The exact expectation of Z(r, G_n) / log kernel at finite n."""
    def __init__(self, basis, n, window, resolution=512, r=None):
        self.n = n
        super(ExpectedMeasure, self).__init__(basis, window, resolution, r)

    def _density(self, z):
        return expected_density(self.basis, self.n, z)


def limit_pairing(limit, phi, r=None):
    """Integral of log(r/|z|) phi against the limit measure.

    :raises WindowTooSmall: if the window does not contain the disk."""
    return pair(limit.as_point_measure(r), phi)


def renormalized(limit, normalization):
    """A copy of ``limit`` whose curve weights use ``normalization``."""
    if normalization not in NORMALIZATIONS:
        raise ValueError("unknown curve normalization {0!r}".format(
            normalization))
    if normalization == limit.normalization:
        return limit
    copy = LimitMeasure.__new__(LimitMeasure)
    copy.__dict__.update(limit.__dict__)
    factor = 2 * np.pi if normalization == PAPER_LITERAL else 1 / (2 * np.pi)
    copy.weights = limit.weights * factor
    copy.normalization = normalization
    copy._quadrature = {}
    return copy
