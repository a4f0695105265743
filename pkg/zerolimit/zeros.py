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
"""Zeros of a sampled function inside the disk |z| < r.

Polynomial samples go through Ehrlich-Aberth simultaneous iteration; any
other sample goes through argument-principle counting on a quadtree of boxes
followed by Newton polishing. Both paths cross-check the number of zeros
against the winding number of G on the circle |z| = r."""
from collections import deque, namedtuple
import csv

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linear_sum_assignment

import zerolimit
from .ensemble import monomial_values
from .exceptions import (
    BoundaryZeroUnresolvable,
    CountMismatch,
    DegenerateSample,
    DegreeOverflow,
    EvaluationOverflow,
    NonConvergence,
    QuadratureNonconvergence,
)
from .quadrature import box_path, circle_path, contour_integral


POLYNOMIAL = "polynomial"
ARGUMENT = "argument-principle"
MAX_DEGREE = 10 ** 4
ABERTH_ITERATIONS = 500
BOUNDARY_RETRIES = 8
BOUNDARY_SAMPLES = 64
CONTOUR_TOLERANCE = 1e-3
# Asymmetric margins keep the quadtree lines off symmetric zero patterns
ROOT_MARGINS = (0.0137, 0.0241, 0.0173, 0.0311)
MIN_SIDE = 1e-3
# Newton iterates may wander this fraction of a box side outside it
NEWTON_MARGIN = 0.5


class ZeroSet(object):
    """Zeros with multiplicities found inside the disk of radius ``radius``.

    ``residual`` is the largest |G| over the reported zeros and ``scale``
    the largest |G| sampled on |z| = radius."""
    def __init__(self, locations, multiplicities, radius, method,
                 residuals=None, scale=1., count=None):
        self.locations = np.asarray(locations, dtype=complex).reshape(-1)
        self.multiplicities = np.asarray(multiplicities,
                                         dtype=np.int64).reshape(-1)
        self.radius = float(radius)
        self.method = method
        if residuals is None:
            residuals = np.zeros(self.locations.shape)
        self.residuals = np.asarray(residuals, dtype=float).reshape(-1)
        self.scale = float(scale)
        self.count = int(self.multiplicities.sum()) if count is None \
            else int(count)

    @property
    def zeros(self):
        return list(zip(self.locations, self.multiplicities))

    @property
    def residual(self):
        return float(self.residuals.max()) if self.residuals.size else 0.

    @property
    def origin(self):
        """Flags zeros too close to 0 to carry a finite log weight."""
        return np.abs(self.locations) <= 1e-12 * self.radius

    @property
    def total(self):
        return int(self.multiplicities.sum())

    def __len__(self):
        return self.locations.size

    def __repr__(self):
        return "ZeroSet({0} zeros, r={1}, {2})".format(
            self.total, self.radius, self.method)

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["re", "im", "multiplicity", "residual"])
            for z, m, res in zip(self.locations, self.multiplicities,
                                 self.residuals):
                writer.writerow([repr(float(z.real)), repr(float(z.imag)),
                                 int(m), repr(float(res))])

    @classmethod
    def from_csv(cls, path, radius, method=POLYNOMIAL):
        rows = []
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                rows.append((complex(float(row["re"]), float(row["im"])),
                             int(row["multiplicity"]), float(row["residual"])))
        if not rows:
            return cls([], [], radius, method)
        locations, multiplicities, residuals = zip(*rows)
        return cls(locations, multiplicities, radius, method, residuals)


def to_polynomial(sample):
    """Monomial coefficients (ascending) of a polynomial sample, or None
    when some basis function is not a polynomial.

    :raises DegreeOverflow: above degree 10**4."""
    pieces = sample.basis.polynomials()
    if pieces is None:
        return None
    exponents = sample.template.exponents
    degrees = np.array([len(p) - 1 for p in pieces])
    degree = int((exponents * degrees).sum(axis=1).max())
    if degree > MAX_DEGREE:
        raise DegreeOverflow(degree)
    top = int(exponents.max())
    powers = []
    for p in pieces:
        table = [np.array([1 + 0j])]
        for _ in range(top):
            table.append(P.polymul(table[-1], p))
        powers.append(table)
    result = np.zeros(degree + 1, dtype=complex)
    for c, k in zip(sample.scaled, exponents):
        monomial = np.array([1 + 0j])
        for j, kj in enumerate(k):
            if kj:
                monomial = P.polymul(monomial, powers[j][kj])
        result[:monomial.size] += c * monomial
    return result


def _trim(coeffs):
    coeffs = np.asarray(coeffs, dtype=complex)
    big = np.abs(coeffs).max() if coeffs.size else 0.
    if big == 0:
        raise DegenerateSample("polynomial is identically zero")
    end = coeffs.size
    while end > 1 and abs(coeffs[end - 1]) <= 1e-14 * big:
        end -= 1
    return coeffs[:end]


def _newtonRatio(coeffs, z):
    """p(z)/p'(z), evaluated through the reversed polynomial when |z| > 1
    so no power of |z| above 1 is ever formed."""
    d = coeffs.size - 1
    z = np.asarray(z, dtype=complex)
    ratio = np.empty(z.shape, dtype=complex)
    inside = np.abs(z) <= 1
    descending = coeffs[::-1]
    derivative = P.polyder(coeffs)[::-1]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if np.any(inside):
            zi = z[inside]
            ratio[inside] = np.polyval(descending, zi) / \
                np.polyval(derivative, zi)
        if np.any(~inside):
            zo = z[~inside]
            y = 1 / zo
            # q(y) = y^d p(1/y) has the reversed coefficients
            q = np.polyval(coeffs, y)
            dq = np.polyval(P.polyder(descending)[::-1], y)
            ratio[~inside] = zo * q / (d * q - y * dq)
    return ratio


def _polynomialScale(coeffs, z):
    """sum_k |c_k| |z|^k, the rounding scale of p at z."""
    return np.polyval(np.abs(coeffs[::-1]), np.abs(z))


def aberth(coeffs, iterations=ABERTH_ITERATIONS):
    """All roots of the polynomial with ascending ``coeffs``.

    :raises NonConvergence: after ``iterations`` steps without
        convergence."""
    coeffs = _trim(coeffs)
    d = coeffs.size - 1
    if d == 0:
        return np.empty(0, dtype=complex)
    if d == 1:
        return np.array([-coeffs[0] / coeffs[1]])
    lead = abs(coeffs[-1])
    radius = (abs(coeffs[0]) / lead) ** (1. / d) if coeffs[0] != 0 else 1.
    radius = radius if np.isfinite(radius) and radius > 0 else 1.
    roots = radius * np.exp(1j * (2 * np.pi * np.arange(d) / d + 0.4))
    eye = np.eye(d, dtype=bool)
    step = np.full(d, np.inf)
    for iteration in range(iterations):
        ratio = _newtonRatio(coeffs, roots)
        with np.errstate(divide="ignore", invalid="ignore"):
            difference = roots[:, None] - roots[None, :]
            difference[eye] = 1
            repulsion = (1 / difference)
            repulsion[eye] = 0
            step = ratio / (1 - ratio * repulsion.sum(axis=1))
        step[~np.isfinite(step)] = 0
        roots = roots - step
        if np.all(np.abs(step) <= 1e-14 * np.maximum(1, np.abs(roots))):
            break
    else:
        residual = np.abs(np.polyval(coeffs[::-1], roots)) / \
            _polynomialScale(coeffs, roots)
        raise NonConvergence(float(np.nanmax(residual)), iterations)
    # Newton polish
    for _ in range(2):
        ratio = _newtonRatio(coeffs, roots)
        ratio[~np.isfinite(ratio)] = 0
        roots = roots - ratio
    zerolimit.logger.debug("aberth: degree {0} in {1} iterations".format(
        d, iteration + 1))
    return roots


def _cluster(roots, radius):
    """Groups roots closer than 1e-8 * radius; returns (centers, sizes)."""
    if roots.size < 2:
        return roots, np.ones(roots.size, dtype=np.int64)
    points = np.column_stack([roots.real, roots.imag])
    labels = fcluster(linkage(points, method="single"),
                      t=1e-8 * radius, criterion="distance")
    centers, sizes = [], []
    for label in np.unique(labels):
        members = roots[labels == label]
        centers.append(members.mean())
        sizes.append(members.size)
    return np.array(centers), np.array(sizes, dtype=np.int64)


def _windingCount(logDerivative, path, breakpoints):
    result = contour_integral(logDerivative, path, breakpoints,
                              tolerance=CONTOUR_TOLERANCE)
    count = result.value / (2j * np.pi)
    nearest = int(round(count.real))
    if not result.converged or abs(count - nearest) > 0.25:
        raise QuadratureNonconvergence(count, result.intervals)
    return nearest


def _circleScale(evaluate, radius, points=256):
    z = radius * np.exp(2j * np.pi * np.arange(points) / points)
    return float(np.abs(evaluate(z)).max())


def find_zeros_polynomial(coeffs, r, tol=1e-10):
    """Zeros of a polynomial inside |z| < r by Ehrlich-Aberth iteration.

    :param coeffs: Ascending monomial coefficients.
    :param r: Disk radius.
    :param tol: Residual bound relative to max |p| on |z| = r.

    :raises NonConvergence: if iteration fails or a residual is too big.
    :raises CountMismatch: if the zeros found disagree with the winding
        number on |z| = r."""
    coeffs = _trim(coeffs)
    descending = coeffs[::-1]
    scale = _circleScale(lambda z: np.polyval(descending, z), r)
    roots = aberth(coeffs)
    roots = roots[np.abs(roots) < r]
    locations, multiplicities = _cluster(roots, r)
    residuals = np.abs(np.polyval(descending, locations))
    if residuals.size and residuals.max() > tol * scale:
        raise NonConvergence(float(residuals.max() / scale), 0)
    zeros = ZeroSet(locations, multiplicities, r, POLYNOMIAL, residuals,
                    scale)
    if coeffs.size > 1:
        expected = count_zeros_disk(
            lambda z: 1 / _newtonRatio(coeffs, z), r)
        if expected != zeros.total:
            raise CountMismatch(expected, zeros.total)
    return zeros


def _logDerivative(sample):
    def logDerivative(z):
        value, slope = sample.evaluate_both(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return slope / value
    return logDerivative


def count_zeros_disk(function, r):
    """Winding count of zeros in |z| < r.

    :param function: A SampledFunction, or a vectorized callable returning
        G'/G."""
    logDerivative = function if callable(function) and \
        not hasattr(function, "evaluate_both") else _logDerivative(function)
    path, breakpoints = circle_path(r)
    return _windingCount(logDerivative, path, breakpoints)


def _nearBoundary(sample, box):
    """True when a boundary sample lies within 1e-7 side of a zero,
    judged by the Newton distance |G/G'|."""
    x0, x1, y0, y1 = box
    path, _ = box_path(box)
    t = (np.arange(4 * BOUNDARY_SAMPLES) + 0.5) / BOUNDARY_SAMPLES
    z, _ = path(t)
    value, slope = sample.evaluate_both(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        distance = np.abs(value / slope)
    distance[value == 0] = 0
    side = max(x1 - x0, y1 - y0)
    return np.nanmin(distance) < 1e-7 * side


def _dilate(box, rng):
    x0, x1, y0, y1 = box
    factor = 1 + rng.uniform(1e-6, 1e-5)
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    hx, hy = 0.5 * (x1 - x0) * factor, 0.5 * (y1 - y0) * factor
    return (cx - hx, cx + hx, cy - hy, cy + hy)


def count_zeros_argument(sample, box, rng=None):
    """Number of zeros of ``sample`` in ``box = (x0, x1, y0, y1)``.

    The box is dilated by a random factor in [1e-6, 1e-5] and retried when
    a zero sits on its boundary or the contour integral does not settle.

    :returns: (count, box actually used).

    :raises BoundaryZeroUnresolvable: after 8 retries."""
    if rng is None:
        rng = np.random.default_rng(0)
    logDerivative = _logDerivative(sample)
    current = tuple(float(v) for v in box)
    for attempt in range(BOUNDARY_RETRIES + 1):
        if not _nearBoundary(sample, current):
            try:
                path, breakpoints = box_path(current)
                return _windingCount(logDerivative, path, breakpoints), current
            except QuadratureNonconvergence as e:
                zerolimit.logger.debug("box {0}: {1}".format(current, e))
        current = _dilate(current, rng)
    raise BoundaryZeroUnresolvable(box)


def _newton(sample, z, box, iterations=100):
    """Newton iteration from z. Returns None once an iterate leaves the
    padded box."""
    for _ in range(iterations):
        try:
            value, slope = sample.evaluate_both(z)
        except EvaluationOverflow:
            return None
        if value == 0 or slope == 0:
            break
        step = value / slope
        z = z - step
        if not _inside(z, box, NEWTON_MARGIN):
            return None
        if abs(step) <= 4e-16 * max(1., abs(z)):
            break
    return z


def _inside(z, box, margin):
    x0, x1, y0, y1 = box
    pad = margin * max(x1 - x0, y1 - y0)
    return (x0 - pad <= z.real <= x1 + pad) and (y0 - pad <= z.imag <= y1 + pad)


def _split(box):
    x0, x1, y0, y1 = box
    xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    return [(x0, xm, y0, ym), (xm, x1, y0, ym),
            (x0, xm, ym, y1), (xm, x1, ym, y1)]


def _coefficientScale(sample, radius, points=256):
    z = radius * np.exp(2j * np.pi * np.arange(points) / points)
    monomials, _ = monomial_values(sample.basis, sample.template.exponents, z)
    return float((np.abs(sample.scaled)[:, None] * np.abs(monomials))
                 .sum(axis=0).max())


def find_zeros_entire(sample, r, tol=1e-10, rng=None):
    """Zeros of an arbitrary sample inside |z| < r.

    The bounding square of the disk is subdivided into quadrants; boxes
    without zeros are dropped, boxes holding one zero (or smaller than
    1e-3 r) seed Newton iteration.

    :raises DegenerateSample: if G is numerically zero on |z| = r.
    :raises CountMismatch: if the located zeros disagree with the
        whole-disk count; carries the terminal boxes."""
    if rng is None:
        rng = np.random.default_rng(0)
    scale = _circleScale(sample.evaluate, r)
    if scale <= 1e-13 * _coefficientScale(sample, r):
        raise DegenerateSample("G vanishes on |z| = {0}".format(r))
    expected = count_zeros_disk(sample, r)
    a, b, c, d = ROOT_MARGINS
    root = (-r * (1 + a), r * (1 + b), -r * (1 + c), r * (1 + d))
    minSide = MIN_SIDE * r
    count, root = count_zeros_argument(sample, root, rng)
    queue = deque([(root, count)])
    found, terminal = [], []
    while queue:
        box, count = queue.popleft()
        if count == 0:
            continue
        side = max(box[1] - box[0], box[3] - box[2])
        if count == 1 or side < minSide:
            center = complex(0.5 * (box[0] + box[1]), 0.5 * (box[2] + box[3]))
            z = _newton(sample, center, box)
            if z is not None and not _inside(z, box, 1e-4):
                z = None
            if z is None and side < minSide:
                z = center
            if z is not None:
                found.append((z, count))
                terminal.append(box)
                continue
        for child in _split(box):
            childCount, child = count_zeros_argument(sample, child, rng)
            queue.append((child, childCount))
    locations, multiplicities = _deduplicate(found, r)
    keep = np.abs(locations) < r
    locations, multiplicities = locations[keep], multiplicities[keep]
    residuals = np.abs(sample.evaluate(locations)) if locations.size \
        else np.empty(0)
    zerolimit.logger.debug("quadtree: {0} terminal boxes, {1} zeros".format(
        len(terminal), int(multiplicities.sum())))
    if int(multiplicities.sum()) != expected:
        raise CountMismatch(expected, int(multiplicities.sum()), terminal)
    if residuals.size and residuals.max() > tol * scale:
        raise NonConvergence(float(residuals.max() / scale), 0)
    return ZeroSet(locations, multiplicities, r, ARGUMENT, residuals, scale,
                   expected)


def _deduplicate(found, radius):
    """Merges Newton results closer than 1e-8 * radius."""
    if not found:
        return np.empty(0, dtype=complex), np.empty(0, dtype=np.int64)
    points = np.array([z for z, _ in found])
    counts = np.array([m for _, m in found], dtype=np.int64)
    if points.size == 1:
        return points, counts
    labels = fcluster(linkage(np.column_stack([points.real, points.imag]),
                              method="single"),
                      t=1e-8 * radius, criterion="distance")
    locations, multiplicities = [], []
    for label in np.unique(labels):
        members = labels == label
        best = np.flatnonzero(members)[0]
        locations.append(points[best])
        multiplicities.append(counts[members].max())
    return np.array(locations), np.array(multiplicities, dtype=np.int64)


def find_zeros(sample, r, tol=1e-10, method="auto"):
    """Routes a sample to the polynomial or the argument-principle path.

    :param method: ``auto``, ``polynomial`` or ``argument``."""
    if method in ("auto", "polynomial"):
        coeffs = to_polynomial(sample)
        if coeffs is not None:
            return find_zeros_polynomial(coeffs, r, tol)
        if method == "polynomial":
            raise ValueError("basis is not polynomial")
    return find_zeros_entire(sample, r, tol)


DualPathResult = namedtuple("DualPathResult", [
    "distance", "polynomial_count", "argument_count", "disk_count",
])


def _expand(zeros):
    return np.repeat(zeros.locations, zeros.multiplicities)


def dual_path_check(sample, r, tol=1e-10):
    """Locates the zeros of a polynomial sample on both paths.

    :returns: A DualPathResult whose ``distance`` is the largest gap of an
        optimal matching of the two multisets (inf if their sizes
        differ)."""
    coeffs = to_polynomial(sample)
    if coeffs is None:
        raise ValueError("basis is not polynomial")
    polynomial = find_zeros_polynomial(coeffs, r, tol)
    argument = find_zeros_entire(sample, r, tol)
    left, right = _expand(polynomial), _expand(argument)
    if left.size != right.size:
        distance = float("inf")
    elif not left.size:
        distance = 0.
    else:
        cost = np.abs(left[:, None] - right[None, :])
        rows, cols = linear_sum_assignment(cost)
        distance = float(cost[rows, cols].max())
    return DualPathResult(distance, polynomial.total, argument.total,
                          count_zeros_disk(sample, r))
