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
"""The random functions G_n = sum_alpha a_alpha * w_alpha * prod f_alpha.

Two term layouts are supported. The full form has one standard complex
Gaussian coefficient per ordered tuple (j_1, ..., j_nu); the reduced form has
one per unordered multi-index weighted by sqrt(multinomial). Both induce the
covariance kernel sum_k <f(z), f(w)>^k.

Coefficients of trial ``t`` come from a Philox stream keyed by
(seed, t); term ``i`` always consumes stream positions 2i and 2i+1."""
from collections import namedtuple
from itertools import product
import csv
import sys

import numpy as np
from scipy.special import gammaln

from .exceptions import (
    EvaluationOverflow,
    TermBudgetExceeded,
    TermCountOverflow,
)


FULL = "full"
REDUCED = "reduced"
FULL_TERM_BUDGET = 10 ** 6
# Points evaluated per block, bounds the (terms x points) work array
EVALUATION_BLOCK = 4096


EnsembleSpec = namedtuple("EnsembleSpec", ["basis", "n", "seed"])
EnsembleSpec.__doc__ = """Identity of an ensemble: basis, degree cap n >= 0
and the 64-bit master seed."""

TermTemplate = namedtuple("TermTemplate",
                          ["form", "alphas", "exponents", "weights"])
TermTemplate.__doc__ = """Coefficient-free term layout.

alphas are 1-based index tuples, exponents[i, j] counts index j+1 in
alphas[i], weights are the structural weights."""


def count_terms(ell, n):
    """N_{l,n} = 1 + l + ... + l^n, in exact integer arithmetic.

    :raises TermCountOverflow: if the count exceeds sys.maxsize."""
    if ell < 1 or n < 0:
        raise ValueError("need l >= 1 and n >= 0")
    if ell == 1:
        total = n + 1
    else:
        total = (ell ** (n + 1) - 1) // (ell - 1)
    if total > sys.maxsize:
        raise TermCountOverflow(ell, n)
    return total


def count_reduced_terms(ell, n):
    """Number of unordered multi-indices of length at most n."""
    from math import comb
    return sum(comb(nu + ell - 1, ell - 1) for nu in range(n + 1))


def _compositions(nu, ell):
    """Exponent vectors (k_1..k_l) with sum nu, in descending lex order."""
    if ell == 1:
        yield (nu,)
        return
    for first in range(nu, -1, -1):
        for rest in _compositions(nu - first, ell - 1):
            yield (first,) + rest


def reduced_representation(spec):
    """One term per unordered multi-index alpha with |alpha| <= n.

    The structural weight is sqrt(|alpha|! / prod k_j!), so that the
    reduced form has the same covariance as the full one."""
    ell = spec.basis.ell
    exponents = [k for nu in range(spec.n + 1) for k in _compositions(nu, ell)]
    exponents = np.array(exponents, dtype=np.int64).reshape(-1, ell)
    alphas = [tuple(j + 1 for j in range(ell) for _ in range(k[j]))
              for k in exponents]
    logMultinomial = (gammaln(exponents.sum(axis=1) + 1)
                      - gammaln(exponents + 1).sum(axis=1))
    weights = np.exp(0.5 * logMultinomial)
    return TermTemplate(REDUCED, alphas, exponents, weights)


def full_representation(spec, budget=FULL_TERM_BUDGET):
    """One term per ordered tuple (j_1, ..., j_nu), nu = 0..n.

    :raises TermBudgetExceeded: if N_{l,n} exceeds ``budget``."""
    ell = spec.basis.ell
    total = count_terms(ell, spec.n)
    if total > budget:
        raise TermBudgetExceeded(total, budget)
    alphas = [alpha for nu in range(spec.n + 1)
              for alpha in product(range(1, ell + 1), repeat=nu)]
    exponents = np.zeros((total, ell), dtype=np.int64)
    for row, alpha in enumerate(alphas):
        for j in alpha:
            exponents[row, j - 1] += 1
    return TermTemplate(FULL, alphas, exponents, np.ones(total))


def representation(spec, form=REDUCED):
    if form == REDUCED:
        return reduced_representation(spec)
    if form == FULL:
        return full_representation(spec)
    raise ValueError("unknown form {0!r}".format(form))


def trial_generator(seed, trial):
    """Counter-based generator owning the coefficient stream of one trial."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(sequence))


def draw_coefficients(seed, trial, count):
    """``count`` standard complex Gaussians (E|a|^2 = 1) of one trial."""
    normals = trial_generator(seed, trial).standard_normal(2 * count)
    return (normals[0::2] + 1j * normals[1::2]) * np.sqrt(0.5)


class SampledFunction(object):
    """One realization of G_n.

    :param basis: The BasisSystem the terms are built from.
    :param n: Degree cap used for the measure normalization.
    :param template: The TermTemplate giving the term layout.
    :param coefficients: One complex coefficient per term.
    :param trial: Trial index the coefficients were drawn for, if any."""
    def __init__(self, basis, n, template, coefficients, trial=None):
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.shape != (len(template.alphas),):
            raise ValueError("one coefficient per term is required")
        self.basis = basis
        self.n = n
        self.template = template
        self.coefficients = coefficients
        self.trial = trial

    @property
    def form(self):
        return self.template.form

    @property
    def terms(self):
        """(coefficient, alpha, structural weight) triples."""
        return list(zip(self.coefficients, self.template.alphas,
                        self.template.weights))

    @property
    def scaled(self):
        """coefficient * structural weight per term."""
        return self.coefficients * self.template.weights

    def __len__(self):
        return len(self.coefficients)

    def evaluate(self, z):
        return self._evaluate(z, derivative=False)[0]

    def derivative(self, z):
        return self._evaluate(z, derivative=True)[1]

    def evaluate_both(self, z):
        """(G(z), G'(z)) from one pass over the monomials."""
        return self._evaluate(z, derivative=True)

    def _evaluate(self, z, derivative):
        points = np.asarray(z, dtype=complex)
        flat = points.reshape(-1)
        value = np.empty(flat.shape, dtype=complex)
        slope = np.empty(flat.shape, dtype=complex) if derivative else None
        scaled = self.scaled
        for start in range(0, flat.size, EVALUATION_BLOCK):
            block = flat[start:start + EVALUATION_BLOCK]
            monomials, slopes = monomial_values(
                self.basis, self.template.exponents, block, derivative)
            value[start:start + block.size] = scaled @ monomials
            if derivative:
                slope[start:start + block.size] = scaled @ slopes
        for result in (value, slope):
            if result is not None:
                bad = ~np.isfinite(result)
                if np.any(bad):
                    raise EvaluationOverflow(flat[bad][0])
        if points.ndim == 0:
            return (complex(value[0]),
                    complex(slope[0]) if derivative else None)
        return (value.reshape(points.shape),
                slope.reshape(points.shape) if derivative else None)

    def to_csv(self, path):
        """Writes (alpha, weight, coeff_re, coeff_im) rows for audit/replay."""
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["alpha", "weight", "coeff_re", "coeff_im"])
            for c, alpha, w in self.terms:
                writer.writerow(["-".join(str(j) for j in alpha),
                                 repr(float(w)), repr(float(c.real)),
                                 repr(float(c.imag))])

    @classmethod
    def from_csv(cls, path, basis, form=None):
        """Rebuilds a sample written by :meth:`to_csv`."""
        alphas, weights, coefficients = [], [], []
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                text = row["alpha"].strip()
                alphas.append(tuple(int(j) for j in text.split("-"))
                              if text else ())
                weights.append(float(row["weight"]))
                coefficients.append(complex(float(row["coeff_re"]),
                                            float(row["coeff_im"])))
        if form is None:
            form = REDUCED
            if any(list(a) != sorted(a) for a in alphas) or \
                    len(set(tuple(sorted(a)) for a in alphas)) < len(alphas):
                form = FULL
        exponents = np.zeros((len(alphas), basis.ell), dtype=np.int64)
        for row, alpha in enumerate(alphas):
            for j in alpha:
                exponents[row, j - 1] += 1
        n = max((len(a) for a in alphas), default=0)
        template = TermTemplate(form, alphas, exponents, np.array(weights))
        return cls(basis, n, template, coefficients)


def monomial_values(basis, exponents, z, derivative=False):
    """prod_j f_j(z)^k_j for every exponent row, and optionally its
    derivative by the product rule.

    :returns: (values, slopes) of shape (terms, points); slopes is None
        unless ``derivative``."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    n = int(exponents.max()) if exponents.size else 0
    f = basis.values(z)
    ell = f.shape[0]
    with np.errstate(over="ignore", invalid="ignore"):
        powers = np.empty((ell, n + 1, z.size), dtype=complex)
        powers[:, 0] = 1
        for k in range(1, n + 1):
            powers[:, k] = powers[:, k - 1] * f
        factors = [powers[j, exponents[:, j]] for j in range(ell)]
        values = factors[0].copy()
        for j in range(1, ell):
            values *= factors[j]
        if not derivative:
            return values, None
        df = basis.derivative_values(z)
        slopes = np.zeros_like(values)
        for j in range(ell):
            k = exponents[:, j]
            lowered = powers[j, np.maximum(k - 1, 0)] * (k[:, None] * df[j])
            for i in range(ell):
                if i != j:
                    lowered = lowered * factors[i]
            slopes += lowered
    return values, slopes


def sample(spec, trial, form=REDUCED, template=None):
    """Draws trial ``trial`` of the ensemble in the requested form."""
    if template is None:
        template = representation(spec, form)
    coefficients = draw_coefficients(spec.seed, trial, len(template.alphas))
    return SampledFunction(spec.basis, spec.n, template, coefficients, trial)


def sample_full(spec, trial):
    """One coefficient per ordered tuple; deterministic in (seed, trial).

    :raises TermBudgetExceeded: above 10**6 terms."""
    return sample(spec, trial, FULL)


def sample_reduced(spec, trial):
    return sample(spec, trial, REDUCED)


def eval_G(sample, z):
    return sample.evaluate(z)


def eval_G_deriv(sample, z):
    return sample.derivative(z)


class CovarianceKernel(object):
    """K(z, w) = sum_{k=0}^n <f(z), f(w)>^k."""
    def __init__(self, basis, n):
        self.basis = basis
        self.n = n

    def __call__(self, z, w):
        return covariance(self, z, w)


def covariance(kernel, z, w):
    """Evaluates the covariance kernel; Hermitian, real >= 1 on the
    diagonal.

    :raises EvaluationOverflow: when the power sum is not finite."""
    p = np.asarray(kernel.basis.inner(z, w))
    total = np.ones(p.shape, dtype=complex)
    term = np.ones(p.shape, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(kernel.n):
            term = term * p
            total = total + term
    bad = ~np.isfinite(total)
    if np.any(bad):
        raise EvaluationOverflow(np.broadcast_to(np.asarray(z), p.shape)[bad]
                                 .flat[0])
    if total.ndim == 0:
        return complex(total)
    return total


def empirical_covariance(spec, z, w, trials, form=REDUCED):
    """Monte Carlo estimate of E[G(z) conj(G(w))] over trials 0..M-1.

    ``z`` and ``w`` may be equally shaped arrays of point pairs.

    :returns: (mean, standard error of the real part, standard error of the
        imaginary part)."""
    template = representation(spec, form)
    count = len(template.alphas)
    coefficients = np.empty((trials, count), dtype=complex)
    for trial in range(trials):
        coefficients[trial] = draw_coefficients(spec.seed, trial, count)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    points = np.concatenate([z.reshape(-1), w.reshape(-1)])
    monomials, _ = monomial_values(spec.basis, template.exponents, points)
    values = (coefficients * template.weights) @ monomials
    half = z.size
    products = values[:, :half] * np.conj(values[:, half:])
    scale = np.sqrt(trials)
    mean = products.mean(axis=0).reshape(z.shape)
    seRe = (products.real.std(axis=0, ddof=1) / scale).reshape(z.shape)
    seIm = (products.imag.std(axis=0, ddof=1) / scale).reshape(z.shape)
    if z.ndim == 0:
        return complex(mean), float(seRe), float(seIm)
    return mean, seRe, seIm
