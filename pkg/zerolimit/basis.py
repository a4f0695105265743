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
"""Basis functions f_1, ..., f_l as expression trees.

The grammar only produces entire functions: complex constants, the variable
``z``, sums, products, nonnegative integer powers and ``exp``. Every node
evaluates vectorized over numpy arrays and differentiates symbolically."""
import re

import numpy as np
from numpy.polynomial import polynomial as P

from .exceptions import (
    DerivativeMismatch,
    DomainError,
    EvaluationOverflow,
    ParseError,
)


class Expr(object):
    """Node of an entire-function expression tree. Immutable."""
    __slots__ = ()

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other):
        return add(self, _wrap(other))

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, _wrap(other))

    __rmul__ = __mul__

    def __pow__(self, k):
        return power(self, k)

    def __neg__(self):
        return mul(Constant(-1), self)

    def __sub__(self, other):
        return add(self, -_wrap(other))

    def __rsub__(self, other):
        return add(_wrap(other), -self)

    def __reduce__(self):
        return (self.__class__,
                tuple(getattr(self, name) for name in self.__slots__))

    def __repr__(self):
        return "{0}({1})".format(self.__class__.__name__, str(self))


class Constant(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", complex(value))

    def _evaluate(self, z):
        return np.full(z.shape, self.value, dtype=complex)

    def derivative(self):
        return ZERO

    def polynomial(self):
        return np.array([self.value])

    def __str__(self):
        v = self.value
        if v.imag == 0:
            return repr(v.real)
        if v.real == 0:
            return "{0!r}i".format(v.imag)
        return "({0!r}{1:+}i)".format(v.real, v.imag)


class Variable(Expr):
    __slots__ = ()

    def _evaluate(self, z):
        return z.astype(complex, copy=True)

    def derivative(self):
        return ONE

    def polynomial(self):
        return np.array([0j, 1 + 0j])

    def __str__(self):
        return "z"


class Sum(Expr):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def _evaluate(self, z):
        return self.left._evaluate(z) + self.right._evaluate(z)

    def derivative(self):
        return add(self.left.derivative(), self.right.derivative())

    def polynomial(self):
        a, b = self.left.polynomial(), self.right.polynomial()
        if a is None or b is None:
            return None
        return P.polyadd(a, b)

    def __str__(self):
        return "({0} + {1})".format(self.left, self.right)


class Product(Expr):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def _evaluate(self, z):
        return self.left._evaluate(z) * self.right._evaluate(z)

    def derivative(self):
        return add(mul(self.left.derivative(), self.right),
                   mul(self.left, self.right.derivative()))

    def polynomial(self):
        a, b = self.left.polynomial(), self.right.polynomial()
        if a is None or b is None:
            return None
        return P.polymul(a, b)

    def __str__(self):
        return "{0}*{1}".format(self.left, self.right)


class Power(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", int(exponent))

    def _evaluate(self, z):
        return self.base._evaluate(z) ** self.exponent

    def derivative(self):
        k = self.exponent
        return mul(mul(Constant(k), power(self.base, k - 1)),
                   self.base.derivative())

    def polynomial(self):
        a = self.base.polynomial()
        if a is None:
            return None
        return P.polypow(a, self.exponent)

    def __str__(self):
        return "({0})^{1}".format(self.base, self.exponent)


class Exp(Expr):
    __slots__ = ("argument",)

    def __init__(self, argument):
        object.__setattr__(self, "argument", argument)

    def _evaluate(self, z):
        return np.exp(self.argument._evaluate(z))

    def derivative(self):
        return mul(self, self.argument.derivative())

    def polynomial(self):
        a = self.argument.polynomial()
        if a is None or np.any(a[1:] != 0):
            return None
        return np.array([np.exp(a[0])])

    def __str__(self):
        return "exp({0})".format(self.argument)


def _setattr(self, name, value):
    raise AttributeError("expression nodes are immutable")


Expr.__setattr__ = _setattr

ZERO = Constant(0)
ONE = Constant(1)
Z = Variable()


def _wrap(value):
    if isinstance(value, Expr):
        return value
    return Constant(value)


def _isConstant(expr, value=None):
    if not isinstance(expr, Constant):
        return False
    return value is None or expr.value == value


def add(a, b):
    """Sum node with constant folding."""
    if _isConstant(a) and _isConstant(b):
        return Constant(a.value + b.value)
    if _isConstant(a, 0):
        return b
    if _isConstant(b, 0):
        return a
    return Sum(a, b)


def mul(a, b):
    """Product node with constant folding."""
    if _isConstant(a) and _isConstant(b):
        return Constant(a.value * b.value)
    if _isConstant(a, 0) or _isConstant(b, 0):
        return ZERO
    if _isConstant(a, 1):
        return b
    if _isConstant(b, 1):
        return a
    return Product(a, b)


def power(base, k):
    """Integer power node; k must be a nonnegative integer."""
    if int(k) != k or k < 0:
        raise ValueError("exponent must be a nonnegative integer")
    k = int(k)
    if k == 0:
        return ONE
    if k == 1:
        return base
    if _isConstant(base):
        return Constant(base.value ** k)
    return Power(base, k)


def exp(argument):
    """Exponential node."""
    if _isConstant(argument):
        return Constant(np.exp(argument.value))
    return Exp(argument)


def evaluate(expr, z):
    """Evaluates an expression at one point or an array of points.

    :param expr: The expression tree.
    :param z: A complex scalar or array.

    :returns: A complex scalar or an array shaped like ``z``.

    :raises EvaluationOverflow: if any value is not finite."""
    points = np.asarray(z, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        values = expr._evaluate(points)
    _checkFinite(values, points)
    if np.ndim(z) == 0:
        return complex(values)
    return values


def _checkFinite(values, points):
    bad = ~np.isfinite(values)
    if np.any(bad):
        where = np.broadcast_to(points, values.shape)[bad]
        raise EvaluationOverflow(where.flat[0])


def differentiate(expr):
    """Returns the exact derivative tree of ``expr``."""
    return expr.derivative()


class BasisSystem(object):
    """The ordered basis f = (f_1, ..., f_l) with its cached derivatives."""
    def __init__(self, functions):
        functions = tuple(functions)
        if not functions:
            raise ValueError("a basis needs at least one function")
        self.functions = functions
        self.derivatives = tuple(differentiate(f) for f in functions)

    @property
    def ell(self):
        return len(self.functions)

    def __len__(self):
        return len(self.functions)

    def __str__(self):
        return "\n".join(str(f) for f in self.functions)

    def values(self, z):
        """f_j(z) stacked on a leading axis of length l."""
        return np.stack([np.asarray(evaluate(f, z)) for f in self.functions])

    def derivative_values(self, z):
        """f_j'(z) stacked on a leading axis of length l."""
        return np.stack([np.asarray(evaluate(d, z))
                         for d in self.derivatives])

    def norm_squared(self, z):
        """S(z) = sum_j |f_j(z)|^2."""
        f = self.values(z)
        return np.sum(f.real ** 2 + f.imag ** 2, axis=0)

    def inner(self, z, w):
        """<f(z), f(w)> = sum_j f_j(z) conj(f_j(w))."""
        return np.sum(self.values(z) * np.conj(self.values(w)), axis=0)

    def laplacian_log_norm(self, z):
        """The scalar d/dz d/dzbar log S(z).

        Computed from the Lagrange identity
        ``S*sum|f'|^2 - |<f', f>|^2 = sum_{j<k} |f_j f_k' - f_k f_j'|^2``
        so that the value is nonnegative by construction and exactly zero
        for a single function.

        :raises DomainError: where S(z) = 0."""
        f = self.values(z)
        df = self.derivative_values(z)
        s = np.sum(f.real ** 2 + f.imag ** 2, axis=0)
        zero = s == 0
        if np.any(zero):
            raise DomainError(np.broadcast_to(np.asarray(z), s.shape)[zero]
                              .flat[0])
        numerator = np.zeros(s.shape)
        for j in range(self.ell):
            for k in range(j + 1, self.ell):
                w = f[j] * df[k] - f[k] * df[j]
                numerator = numerator + (w.real ** 2 + w.imag ** 2)
        with np.errstate(over="ignore", invalid="ignore"):
            q = numerator / s / s
        _checkFinite(q, np.asarray(z))
        if np.ndim(z) == 0:
            return float(q)
        return q

    def polynomials(self):
        """Monomial coefficients (ascending) of every function, or None if
        some function is not a polynomial."""
        coefficients = [f.polynomial() for f in self.functions]
        if any(c is None for c in coefficients):
            return None
        return [P.polytrim(c, 0) if len(c) > 1 else c for c in coefficients]

    def validate(self, points=100, radius=2., step=1e-6, seed=20240617):
        """Checks every derivative against central differences.

        :param points: Number of random points in the disk.
        :param radius: Radius of the disk the points are drawn from.
        :param step: Finite-difference step.
        :param seed: Seed of the point generator.

        :returns: The largest scaled error observed.

        :raises DerivativeMismatch: if a scaled error exceeds 1e-6."""
        rng = np.random.default_rng(seed)
        z = (radius * np.sqrt(rng.random(points))
             * np.exp(2j * np.pi * rng.random(points)))
        worst = 0.
        for index, (f, d) in enumerate(zip(self.functions, self.derivatives)):
            exact = evaluate(d, z)
            approx = (evaluate(f, z + step) - evaluate(f, z - step)) / (2 * step)
            error = np.abs(exact - approx) / (1 + np.abs(exact))
            position = int(np.argmax(error))
            if error[position] > 1e-6:
                raise DerivativeMismatch(index, z[position], error[position])
            worst = max(worst, float(error[position]))
        return worst


def norm_squared(basis, z):
    return basis.norm_squared(z)


def laplacian_log_norm(basis, z):
    return basis.laplacian_log_norm(z)


_TOKEN = re.compile(r"""
    (?P<space>[ \t]+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]+)
  | (?P<op>[-+*^()])
""", re.VERBOSE)


class _Parser(object):
    """Recursive descent over one line of the basis mini-language.

        expr    := term (('+' | '-') term)*
        term    := unary ('*'? unary)*
        unary   := '-' unary | '+' unary | factor
        factor  := primary ('^' integer)?
        primary := number ['i'] | 'i' | 'z' | 'exp' '(' expr ')'
                 | '(' expr ')'
    """
    def __init__(self, text, line=1):
        self.line = line
        self.tokens = []
        position = 0
        while position < len(text):
            match = _TOKEN.match(text, position)
            if match is None:
                self.fail("unexpected character {0!r}".format(text[position]),
                          position)
            kind = match.lastgroup
            if kind != "space":
                self.tokens.append((kind, match.group(), position))
            position = match.end()
        self.end = len(text)
        self.index = 0

    def fail(self, message, position):
        raise ParseError(message, self.line, position + 1)

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return (None, None, self.end)

    def take(self):
        token = self.peek()
        self.index += 1
        return token

    def expect(self, value):
        kind, text, position = self.take()
        if text != value:
            found = "end of line" if kind is None else repr(text)
            self.fail("expected {0!r}, found {1}".format(value, found),
                      position)

    def parse(self):
        if not self.tokens:
            self.fail("empty expression", 0)
        expr = self.expression()
        kind, text, position = self.peek()
        if kind is not None:
            self.fail("unexpected {0!r}".format(text), position)
        return expr

    def expression(self):
        expr = self.term()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            right = self.term()
            expr = add(expr, right if op == "+" else -right)
        return expr

    def _startsPrimary(self):
        kind, text, _ = self.peek()
        return kind in ("number", "name") or text == "("

    def term(self):
        expr = self.unary()
        while self.peek()[1] == "*" or self._startsPrimary():
            if self.peek()[1] == "*":
                self.take()
            expr = mul(expr, self.unary())
        return expr

    def unary(self):
        _, text, _ = self.peek()
        if text == "-":
            self.take()
            return -self.unary()
        if text == "+":
            self.take()
            return self.unary()
        return self.factor()

    def factor(self):
        base = self.primary()
        if self.peek()[1] == "^":
            self.take()
            kind, text, position = self.take()
            if kind != "number" or not text.isdigit():
                self.fail("exponent must be a nonnegative integer", position)
            return power(base, int(text))
        return base

    def primary(self):
        kind, text, position = self.take()
        if kind == "number":
            value = float(text)
            nextKind, nextText, _ = self.peek()
            if nextKind == "name" and nextText == "i":
                self.take()
                return Constant(1j * value)
            return Constant(value)
        if kind == "name":
            if text == "z":
                return Z
            if text == "i":
                return Constant(1j)
            if text == "exp":
                self.expect("(")
                argument = self.expression()
                self.expect(")")
                return exp(argument)
            self.fail("unknown name {0!r}".format(text), position)
        if text == "(":
            expr = self.expression()
            self.expect(")")
            return expr
        found = "end of line" if kind is None else repr(text)
        self.fail("unexpected {0}".format(found), position)


def parse_expression(text, line=1):
    """Parses one basis function, e.g. ``2*z^3 - (1+2i)*exp(z)``."""
    return _Parser(text, line).parse()


def parse_basis(text):
    """Parses a basis file: one function per line, ``#`` starts a comment,
    blank lines are ignored.

    :raises ParseError: naming the line and column of the first error."""
    functions = []
    lines = text.splitlines()
    for number, raw in enumerate(lines, 1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        functions.append(parse_expression(content, number))
    if not functions:
        raise ParseError("no basis function found", max(1, len(lines)), 1)
    return BasisSystem(functions)


def load_basis(path):
    """Reads and parses a basis file."""
    with open(path) as f:
        return parse_basis(f.read())
