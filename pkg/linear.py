import math
from fractions import Fraction
from functools import reduce

import numpy as np

from exceptions import RationalDivisionError, UnboundVariableError

"""
linear.py holds the exact arithmetic everything polyhedral is built on.

Functions:
    to_rational      - coerce ints, strings and fractions into a canonical Fraction
    rat_arith        - add/sub/mul/div/cmp on two rationals
    rat_floor_ceil   - (largest integer <= a, smallest integer >= a)
    format_rational  - "p/q" rendering, q omitted when 1
    lin_eval         - exact value of a LinearExpression under a valuation
    rref / nullspace - exact row reduction on numpy object arrays of Fractions

Classes:
    LinearExpression - sum of rational coefficients times variables plus a constant
    LinearConstraint - expression >= 0 or expression == 0, scaled to primitive integers
"""

GE = ">="
EQ = "=="

_RAT_OPS = ("add", "sub", "mul", "div", "cmp")


def to_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating-point values are not exact, pass a Fraction or an int")
    return Fraction(value)


def rat_arith(a, b, op: str):
    """
    Exact arithmetic on two rationals.

    Parameters
    ----------
    a, b : Fraction or int
    op : str
        One of "add", "sub", "mul", "div", "cmp".

    Returns
    -------
    Fraction, or an int in {-1, 0, 1} for "cmp"
    """
    a, b = to_rational(a), to_rational(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise RationalDivisionError(f"division of {format_rational(a)} by zero")
        return a / b
    if op == "cmp":
        return (a > b) - (a < b)
    raise ValueError(f"unknown rational operation '{op}', expected one of {_RAT_OPS}")


def rat_floor_ceil(a) -> tuple[int, int]:
    a = to_rational(a)
    return math.floor(a), math.ceil(a)


def format_rational(r) -> str:
    r = to_rational(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def _lcm(a, b):
    return a * b // math.gcd(a, b)


class LinearExpression:
    """
    Immutable linear expression sum(c_i * x_i) + constant with rational coefficients.
    Zero coefficients are never stored.
    """

    __slots__ = ("_coefficients", "_constant", "_hash")

    def __init__(self, coefficients=None, constant=0):
        coefficients = coefficients or {}
        self._coefficients = {
            name: to_rational(c) for name, c in sorted(coefficients.items()) if c != 0
        }
        self._constant = to_rational(constant)
        self._hash = None

    @classmethod
    def variable(cls, name, coefficient=1):
        return cls({name: coefficient})

    @classmethod
    def constant_expr(cls, value):
        return cls({}, value)

    @property
    def coefficients(self) -> dict:
        return dict(self._coefficients)

    @property
    def constant(self) -> Fraction:
        return self._constant

    @property
    def variables(self) -> tuple:
        return tuple(self._coefficients)

    def coefficient(self, name) -> Fraction:
        return self._coefficients.get(name, Fraction(0))

    def is_constant(self) -> bool:
        return not self._coefficients

    def items(self):
        return self._coefficients.items()

    def __add__(self, other):
        other = _as_expression(other)
        coefficients = dict(self._coefficients)
        for name, c in other._coefficients.items():
            coefficients[name] = coefficients.get(name, 0) + c
        return LinearExpression(coefficients, self._constant + other._constant)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-_as_expression(other))

    def __rsub__(self, other):
        return _as_expression(other) - self

    def __mul__(self, scalar):
        scalar = to_rational(scalar)
        return LinearExpression(
            {name: c * scalar for name, c in self._coefficients.items()},
            self._constant * scalar,
        )

    __rmul__ = __mul__

    def evaluate(self, valuation) -> Fraction:
        total = self._constant
        for name, c in self._coefficients.items():
            if name not in valuation:
                raise UnboundVariableError(name, "linear expression")
            total += c * to_rational(valuation[name])
        return total

    def rename(self, mapping):
        coefficients = {}
        for name, c in self._coefficients.items():
            target = mapping.get(name, name)
            coefficients[target] = coefficients.get(target, 0) + c
        return LinearExpression(coefficients, self._constant)

    def substitute(self, name, expression):
        """Replace variable `name` by `expression`."""
        c = self._coefficients.get(name)
        if c is None:
            return self
        rest = dict(self._coefficients)
        del rest[name]
        return LinearExpression(rest, self._constant) + expression * c

    def primitive(self):
        """
        Scale by a positive rational so all coefficients and the constant are
        integers with gcd 1.

        Returns
        -------
        (LinearExpression, Fraction)
            The scaled expression and the positive scale factor used.
        """
        values = list(self._coefficients.values()) + [self._constant]
        denominator = reduce(_lcm, (v.denominator for v in values), 1)
        numerators = [int(v * denominator) for v in values]
        g = reduce(math.gcd, (abs(n) for n in numerators), 0)
        if g == 0:
            return LinearExpression(), Fraction(1)
        scale = Fraction(denominator, g)
        return self * scale, scale

    def _key(self):
        return (tuple(self._coefficients.items()), self._constant)

    def __eq__(self, other):
        return isinstance(other, LinearExpression) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __str__(self):
        text = format_rational(self._constant)
        for name, c in self._coefficients.items():
            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            term = name if magnitude == 1 else f"{format_rational(magnitude)}*{name}"
            text += f" {sign} {term}"
        return text

    def __repr__(self):
        return f"LinearExpression({self})"


def _as_expression(value) -> LinearExpression:
    if isinstance(value, LinearExpression):
        return value
    if isinstance(value, str):
        return LinearExpression.variable(value)
    return LinearExpression.constant_expr(value)


def lin_eval(e: LinearExpression, v) -> Fraction:
    return e.evaluate(v)


class LinearConstraint:
    """
    Immutable `expression >= 0` or `expression == 0`.

    The expression is kept with primitive integer coefficients; equalities also
    have a positive leading coefficient. Constant constraints collapse to the
    tautology `0 >= 0` or the contradiction `-1 >= 0`.
    """

    __slots__ = ("expression", "relation", "_hash")

    def __init__(self, expression, relation=GE):
        if relation not in (GE, EQ):
            raise ValueError(f"unsupported linear relation '{relation}'")
        expression = _as_expression(expression)
        if expression.is_constant():
            value = expression.constant
            holds = value >= 0 if relation == GE else value == 0
            expression = LinearExpression.constant_expr(0 if holds else -1)
            relation = GE
        else:
            expression, _ = expression.primitive()
            if relation == EQ:
                leading = next(iter(expression.items()))[1]
                if leading < 0:
                    expression = -expression
        self.expression = expression
        self.relation = relation
        self._hash = None

    @classmethod
    def ge(cls, lhs, rhs=0):
        return cls(_as_expression(lhs) - _as_expression(rhs), GE)

    @classmethod
    def le(cls, lhs, rhs=0):
        return cls(_as_expression(rhs) - _as_expression(lhs), GE)

    @classmethod
    def eq(cls, lhs, rhs=0):
        return cls(_as_expression(lhs) - _as_expression(rhs), EQ)

    @property
    def variables(self) -> tuple:
        return self.expression.variables

    def is_tautology(self) -> bool:
        return self.expression.is_constant() and self.expression.constant == 0

    def is_contradiction(self) -> bool:
        return self.expression.is_constant() and self.expression.constant < 0

    def is_equality(self) -> bool:
        return self.relation == EQ

    def satisfied_by(self, valuation) -> bool:
        value = self.expression.evaluate(valuation)
        return value >= 0 if self.relation == GE else value == 0

    def split(self) -> list:
        """Equalities become the two opposite inequalities."""
        if self.relation == GE:
            return [self]
        return [LinearConstraint(self.expression, GE), LinearConstraint(-self.expression, GE)]

    def rename(self, mapping):
        return LinearConstraint(self.expression.rename(mapping), self.relation)

    def sort_key(self):
        return (self.relation != EQ, len(self.variables), str(self))

    def _key(self):
        return (self.expression, self.relation)

    def __eq__(self, other):
        return isinstance(other, LinearConstraint) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __str__(self):
        symbol = ">=" if self.relation == GE else "="
        return f"{self.expression} {symbol} 0"

    def __repr__(self):
        return f"LinearConstraint({self})"


TAUTOLOGY = LinearConstraint(LinearExpression.constant_expr(0))
CONTRADICTION = LinearConstraint(LinearExpression.constant_expr(-1))


def rref(matrix):
    """
    Reduced row echelon form over the rationals.

    Parameters
    ----------
    matrix : numpy.ndarray of dtype object holding Fractions

    Returns
    -------
    (numpy.ndarray, list of int)
        The reduced matrix and the pivot column of each nonzero row.
    """
    m = np.array(matrix, dtype=object, copy=True)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if m[i, c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        m[r] = m[r] / m[r, c]
        for i in range(rows):
            if i != r and m[i, c] != 0:
                m[i] = m[i] - m[i, c] * m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def nullspace(matrix) -> list:
    """
    Basis of {v | matrix @ v = 0} with exact Fractions, one list per basis vector.
    """
    m = np.array(matrix, dtype=object)
    if m.ndim != 2 or m.shape[1] == 0:
        return []
    m = np.vectorize(to_rational, otypes=[object])(m) if m.size else m
    reduced, pivots = rref(m)
    cols = m.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row, p in enumerate(pivots):
            v[p] = -reduced[row, f]
        basis.append(v)
    return basis
