from fractions import Fraction

import numpy as np
import pytest

from exceptions import RationalDivisionError, UnboundVariableError
from linear import (
    CONTRADICTION,
    EQ,
    TAUTOLOGY,
    LinearConstraint,
    LinearExpression,
    format_rational,
    lin_eval,
    nullspace,
    rat_arith,
    rat_floor_ceil,
    rref,
    to_rational,
)


@pytest.mark.parametrize(
    "a, b, op, expected",
    [
        (Fraction(1, 3), Fraction(1, 6), "add", Fraction(1, 2)),
        (Fraction(179, 19), 9, "sub", Fraction(8, 19)),
        (Fraction(2, 3), Fraction(3, 4), "mul", Fraction(1, 2)),
        (1, 3, "div", Fraction(1, 3)),
        (Fraction(179, 19), 9, "cmp", 1),
        (4, Fraction(8, 2), "cmp", 0),
    ],
)
def test_rat_arith(a, b, op, expected):
    assert rat_arith(a, b, op) == expected


def test_division_by_zero():
    with pytest.raises(RationalDivisionError):
        rat_arith(1, 0, "div")
    with pytest.raises(ZeroDivisionError):
        rat_arith(Fraction(5, 2), 0, "div")


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        to_rational(0.5)


@pytest.mark.parametrize(
    "value, expected",
    [(Fraction(179, 19), (9, 10)), (Fraction(-7, 2), (-4, -3)), (5, (5, 5))],
)
def test_floor_ceil(value, expected):
    assert rat_floor_ceil(value) == expected


def test_format_rational():
    assert format_rational(Fraction(179, 19)) == "179/19"
    assert format_rational(Fraction(8, 2)) == "4"


def test_expression_arithmetic():
    x = LinearExpression.variable("x")
    y = LinearExpression.variable("y")
    e = 2 * x - y + 3
    assert e.coefficients == {"x": 2, "y": -1}
    assert e.constant == 3
    assert (e - e).is_constant()
    assert lin_eval(e, {"x": Fraction(1, 2), "y": 4}) == 0
    assert e.substitute("y", x + 1).coefficients == {"x": 1}
    assert e.rename({"x": "y"}).coefficients == {"y": 1}


def test_evaluate_unbound():
    with pytest.raises(UnboundVariableError):
        lin_eval(LinearExpression.variable("x"), {})


def test_constraint_canonical_form():
    x = LinearExpression.variable("x")
    y = LinearExpression.variable("y")
    # 1/2 x - 3/2 y + 1 >= 0 scales to x - 3y + 2 >= 0
    c = LinearConstraint(x * Fraction(1, 2) - y * Fraction(3, 2) + 1)
    assert c.expression == x - y * 3 + 2
    assert LinearConstraint.le("x", 4) == LinearConstraint(4 - x)
    # equalities get a positive leading coefficient
    assert LinearConstraint(-x + y, EQ) == LinearConstraint(x - y, EQ)


def test_constant_constraints_collapse():
    assert LinearConstraint(LinearExpression.constant_expr(3)) == TAUTOLOGY
    assert LinearConstraint(LinearExpression.constant_expr(-1), EQ) == CONTRADICTION
    assert TAUTOLOGY.is_tautology()
    assert CONTRADICTION.is_contradiction()


def test_constraint_satisfaction_and_split():
    c = LinearConstraint.eq("z", LinearExpression.variable("x") + LinearExpression.variable("y"))
    assert c.satisfied_by({"x": 1, "y": 2, "z": 3})
    assert not c.satisfied_by({"x": 1, "y": 2, "z": 4})
    parts = c.split()
    assert len(parts) == 2
    assert all(p.relation != EQ for p in parts)


def test_rref_and_nullspace():
    m = np.array([[Fraction(1), Fraction(2), Fraction(3)], [Fraction(2), Fraction(4), Fraction(6)]], dtype=object)
    reduced, pivots = rref(m)
    assert list(pivots) == [0]
    basis = nullspace(m)
    assert len(basis) == 2
    for v in basis:
        assert sum(m[0, j] * v[j] for j in range(3)) == 0
