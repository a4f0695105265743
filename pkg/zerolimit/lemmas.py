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
"""Numerical probes of the one-dimensional kernels behind the limit.

``kernel_1d`` is (1/n) d^2/dx^2 log sum_{j=0}^n e^{jx}, a probability
density concentrating at 0; ``radial_derivative`` is the radial derivative
of (1/n) log sum |z|^{2k}; ``lemma2_circle_probe`` pairs the planar measure
(1/n)(1/4pi) Laplacian log sum |g|^{2k} with a test function on a grid."""
from collections import namedtuple

import numpy as np
from scipy.integrate import simpson

import zerolimit
from .exceptions import GridTooCoarse, QuadratureDomainTooSmall
from .limit import xi
from .measures import TestFunction


MAX_TAIL_MASS = 1e-4
MIN_NODES = 64
DEFAULT_NODES = 8192
NODE_RESOLUTION = 0.1
COARSENESS = 0.05


def _smallArgument(n, x):
    return (n + 1) * np.abs(x) < 2


def _weightMoments(n, x):
    """Mean and variance of j in 0..n under weights e^{jx}, small |x|."""
    j = np.arange(n + 1, dtype=float) - n / 2.
    logWeights = x[:, None] * j[None, :]
    logWeights -= logWeights.max(axis=1, keepdims=True)
    weights = np.exp(logWeights)
    weights /= weights.sum(axis=1, keepdims=True)
    mean = weights @ j
    variance = weights @ (j * j) - mean * mean
    return mean + n / 2., np.maximum(variance, 0.)


def kernel_1d(n, x):
    """(1/n) d^2/dx^2 log sum_{j=0}^n e^{jx}, nonnegative, integral 1.

    Away from 0 the geometric-sum closed form is used; near 0 the value is
    the variance of j under the weights e^{jx}, which is n(n+2)/12 at 0."""
    if n < 1:
        raise ValueError("n must be at least 1")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    small = _smallArgument(n, x)
    if np.any(small):
        out[small] = _weightMoments(n, x[small])[1] / n
    large = ~small
    if np.any(large):
        y = x[large]
        with np.errstate(over="ignore"):
            out[large] = (0.25 / np.sinh(y / 2) ** 2
                          - 0.25 * (n + 1) ** 2 / np.sinh((n + 1) * y / 2) ** 2
                          ) / n
    out = np.maximum(out, 0.)
    return float(out[0]) if scalar else out


def log_sum_derivative(n, x):
    """d/dx log sum_{j=0}^n e^{jx}, the weighted mean of j."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    small = _smallArgument(n, x)
    if np.any(small):
        out[small] = _weightMoments(n, x[small])[0]
    out[x == 0] = n / 2.
    negative = ~small & (x < 0)
    positive = ~small & (x > 0)
    with np.errstate(over="ignore"):
        y = x[negative]
        out[negative] = 1 / np.expm1(-y) - (n + 1) / np.expm1(-(n + 1) * y)
        y = -x[positive]
        out[positive] = n - (1 / np.expm1(-y)
                             - (n + 1) / np.expm1(-(n + 1) * y))
    return float(out[0]) if scalar else out


def radial_derivative(n, r):
    """(1/n) d/dr log sum_{k=0}^n r^{2k}; exactly 1 at r = 1."""
    if n < 1 or np.any(np.asarray(r) <= 0):
        raise ValueError("need n >= 1 and r > 0")
    r = np.asarray(r, dtype=float)
    value = 2. * log_sum_derivative(n, 2 * np.log(r)) / (n * r)
    return float(value) if np.ndim(value) == 0 else value


def radial_derivative_literal(n, r):
    """The same derivative from the unrearranged quotient, for r != 1."""
    return (-(2 * n + 2) * r ** (2 * n + 1) / (1 - r ** (2 * n + 2))
            + 2 * r / (1 - r * r)) / n


def kernel_mass_outside(n, a, b):
    """Mass of kernel_1d(n, .) outside [a, b], from its antiderivative."""
    return float((log_sum_derivative(n, a) + log_sum_derivative(n, -b)) / n)


class KernelProbe(namedtuple("KernelProbe", ["n", "phi", "bounds", "nodes"])):
    """Kernel pairing setup.

    :param n: Degree, at least 1.
    :param phi: Bounded callable on real arrays.
    :param bounds: Finite quadrature domain.
    :param nodes: Minimum node count, at least 64."""
    __slots__ = ()

    def __new__(cls, n, phi, bounds=(-10., 10.), nodes=DEFAULT_NODES):
        if nodes < MIN_NODES:
            raise ValueError("a kernel probe needs at least 64 nodes")
        a, b = bounds
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError("bounds must be finite and increasing")
        return super(KernelProbe, cls).__new__(cls, n, phi, (a, b), nodes)

    @property
    def node_count(self):
        """Node count raised so that the step resolves the kernel width."""
        a, b = self.bounds
        needed = int(np.ceil((b - a) * (self.n + 1) / NODE_RESOLUTION))
        count = max(self.nodes, needed)
        return count + 1 if count % 2 == 0 else count


def _realValues(phi, x):
    values = phi(x.astype(complex)) if isinstance(phi, TestFunction) \
        else phi(x)
    return np.broadcast_to(np.asarray(values, dtype=float), x.shape)


def lemma1_pair(probe):
    """Composite Simpson quadrature of kernel_1d(n, x) phi(x).

    :raises QuadratureDomainTooSmall: if more than 1e-4 of the kernel mass
        lies outside the domain."""
    a, b = probe.bounds
    tail = kernel_mass_outside(probe.n, a, b)
    if tail > MAX_TAIL_MASS:
        raise QuadratureDomainTooSmall(tail)
    x = np.linspace(a, b, probe.node_count)
    integrand = kernel_1d(probe.n, x) * _realValues(probe.phi, x)
    return float(simpson(integrand, x=x))


def log_power_sum(s, n):
    """log sum_{k=0}^n s^k for s >= 0, without overflow."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        L = np.log(s)
        above = n * L + np.log(-np.expm1(-(n + 1) * L)) - \
            np.log(-np.expm1(-L))
        below = np.log(np.expm1((n + 1) * L) / np.expm1(L))
    out = np.where(L > 0, above, below)
    out = np.where(L == 0, np.log(n + 1.), out)
    return np.where(s == 0, 0., out)


def _probeOnGrid(n, phi, norm, window, resolution):
    xmin, xmax, ymin, ymax = window
    x = np.linspace(xmin, xmax, resolution + 1)
    y = np.linspace(ymin, ymax, resolution + 1)
    dx, dy = x[1] - x[0], y[1] - y[0]
    z = x[None, :] + 1j * y[:, None]
    F = log_power_sum(norm(z), n)
    laplacian = ((F[1:-1, 2:] - 2 * F[1:-1, 1:-1] + F[1:-1, :-2]) / dx ** 2
                 + (F[2:, 1:-1] - 2 * F[1:-1, 1:-1] + F[:-2, 1:-1]) / dy ** 2)
    values = phi(z[1:-1, 1:-1])
    return float(np.sum(laplacian * values) * dx * dy / (4 * np.pi * n))


def lemma2_circle_probe(n, phi, g=None, window=(-2., 2., -2., 2.),
                        resolution=400, check=True):
    """Pairs (1/n)(1/4pi) Laplacian log sum_k S^k with ``phi``.

    :param n: Degree, at least 1.
    :param phi: Planar TestFunction supported inside the window.
    :param g: None for the identity, a basis expression, or a BasisSystem
        whose squared norm replaces |g|^2.
    :param window: (xmin, xmax, ymin, ymax).
    :param resolution: Cells per side, even.
    :param check: Compare with the result at twice the step.

    :raises GridTooCoarse: if doubling the step moves the result by more
        than 5%."""
    if g is None:
        norm = lambda z: np.abs(z) ** 2
    elif hasattr(g, "norm_squared"):
        norm = g.norm_squared
    else:
        norm = lambda z: np.abs(g(z)) ** 2
    fine = _probeOnGrid(n, phi, norm, window, resolution)
    if check:
        coarse = _probeOnGrid(n, phi, norm, window, resolution // 2)
        zerolimit.logger.debug("circle probe n={0}: {1!r} at h, {2!r} at "
                               "2h".format(n, fine, coarse))
        if abs(fine - coarse) > COARSENESS * max(abs(fine), 1e-12):
            raise GridTooCoarse(coarse, fine)
    return fine


ProbeRow = namedtuple("ProbeRow", ["lemma", "n", "parameter", "value",
                                   "target", "gap"])


def _gaussian(x):
    return np.exp(-x * x)


def probe_rows(ns=(10, 100, 1000)):
    """The default probe sweep, one row per probe and n."""
    rows = []

    def add(lemma, n, parameter, value, target):
        rows.append(ProbeRow(lemma, n, parameter, value, target,
                             abs(value - target)))

    sector = TestFunction("sector", 0., np.pi / 3, 0.1)
    for n in ns:
        add("kernel", n, "exp(-x^2)",
            lemma1_pair(KernelProbe(n, _gaussian)), 1.)
        for r in (0.5, 1., 2.):
            add("radial", n, "r={0}".format(r), radial_derivative(n, r),
                xi(r))
        add("circle", n, "constant",
            lemma2_circle_probe(n, TestFunction("constant")), 1.)
        add("circle", n, str(sector), lemma2_circle_probe(n, sector), 1 / 6.)
    return rows
