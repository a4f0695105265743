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
"""Adaptive Gauss-Kronrod (G7/K15) quadrature of complex integrands.

All intervals still under refinement are evaluated in one vectorized call
per round, so the integrand is called O(depth) times instead of once per
node."""
from collections import namedtuple

import numpy as np


# QUADPACK qk15 abscissae and weights on [-1, 1] (nonnegative half)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG, _WG[-2::-1]])

QuadratureResult = namedtuple("QuadratureResult",
                              ["value", "error", "intervals", "converged"])


def integrate(function, breakpoints, tolerance=1e-3, max_intervals=20000):
    """Integrates a complex-valued ``function`` of a real parameter.

    :param function: Vectorized callable; receives a float array of
        parameters and returns complex values of the same shape.
    :param breakpoints: Increasing parameters; the initial intervals.
    :param tolerance: Absolute error target for the whole integral. An
        interval is accepted when its Gauss/Kronrod difference is below its
        share (by length) of the tolerance.
    :param max_intervals: Cap on the number of intervals ever created.

    :returns: A QuadratureResult. ``converged`` is False when the cap was
        hit or a non-finite value was met; the value then covers only the
        accepted intervals plus the last estimates."""
    breakpoints = np.asarray(breakpoints, dtype=float)
    left, right = breakpoints[:-1], breakpoints[1:]
    length = breakpoints[-1] - breakpoints[0]
    total, error = 0j, 0.
    created = left.size
    while left.size:
        center = 0.5 * (left + right)
        half = 0.5 * (right - left)
        t = center[:, None] + half[:, None] * NODES
        values = function(t)
        kronrod = half * (values @ KRONROD_WEIGHTS)
        gauss = half * (values @ GAUSS_WEIGHTS)
        estimate = np.abs(kronrod - gauss)
        finite = np.isfinite(kronrod) & np.isfinite(estimate)
        accept = finite & (estimate <= tolerance * (2 * half) / length)
        total += kronrod[accept].sum()
        error += estimate[accept].sum()
        left, right = left[~accept], right[~accept]
        center = center[~accept]
        if not left.size:
            break
        if created + left.size > max_intervals or \
                np.any(right - left <= 1e-15 * length):
            rest = kronrod[~accept]
            return QuadratureResult(total + rest[np.isfinite(rest)].sum(),
                                    np.inf, created, False)
        left, right = (np.concatenate([left, center]),
                       np.concatenate([center, right]))
        created += left.size // 2
    return QuadratureResult(total, error, created, True)


def box_path(box):
    """Counterclockwise boundary of ``box = (x0, x1, y0, y1)`` as a map
    from t in [0, 4] to (z(t), z'(t))."""
    x0, x1, y0, y1 = box
    corners = np.array([complex(x0, y0), complex(x1, y0), complex(x1, y1),
                        complex(x0, y1), complex(x0, y0)])
    edges = np.diff(corners)

    def path(t):
        side = np.clip(np.floor(t).astype(int), 0, 3)
        return corners[side] + (t - side) * edges[side], edges[side]
    return path, np.arange(5.)


def circle_path(radius, center=0j, pieces=16):
    """Counterclockwise circle as a map from t in [0, 2 pi]."""
    def path(t):
        z = radius * np.exp(1j * t)
        return center + z, 1j * z
    return path, np.linspace(0, 2 * np.pi, pieces + 1)


def contour_integral(function, path, breakpoints, **kwargs):
    """Integral of ``function(z) dz`` along a parametrized path."""
    def integrand(t):
        z, dz = path(t)
        return function(z) * dz
    return integrate(integrand, breakpoints, **kwargs)
