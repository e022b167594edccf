import logging

from constraints import BinOp, Const, Neg, Var, node_intervals
from linear import EQ, LinearConstraint, LinearExpression
from polyhedra import Polyhedron, alpha_box, eliminate_constraints
from registry import get_relaxation

logger = logging.getLogger(__name__)

FRESH_PREFIX = "_t"


class Relaxation:
    def __init__(self):
        """
        Initialize the strategy, add a name which is used to register it
        """
        self.name = "DummyRelaxation"
        # False means nonlinear constraints are over-approximated by true
        self.lifts_products = True

    def __str__(self) -> str:
        return self.name

    def product_facets(self, product, x, y, bounds):
        """
        Linear constraints linking a fresh product variable to its factors.

        Parameters
        ----------
        product : str
            Variable standing for x * y.
        x, y : str
            Factor variables (equal for a square).
        bounds : dict of str to Interval
            Current bounds of every variable, fresh ones included; the product's
            bound already accounts for a side it is equated to.

        Returns
        -------
        list of LinearConstraint
        """
        return []


class FreshVariables:
    """Allocator of fresh variable names for one solve context."""

    def __init__(self, prefix=FRESH_PREFIX):
        self.prefix = prefix
        self.count = 0

    def __call__(self):
        name = f"{self.prefix}{self.count}"
        self.count += 1
        return name


def linear_relation(difference: LinearExpression, relation) -> list:
    """Integer rewriting of (difference rel 0): strict relations become non-strict with -1."""
    if relation == "<":
        return [LinearConstraint(-difference - 1)]
    if relation == "<=":
        return [LinearConstraint(-difference)]
    if relation == ">":
        return [LinearConstraint(difference - 1)]
    if relation == ">=":
        return [LinearConstraint(difference)]
    if relation == "==":
        return [LinearConstraint(difference, EQ)]
    return []


class _Lifter:
    """Replaces every product of non-constant terms by a fresh variable."""

    def __init__(self, strategy, bounds, intervals, fresh):
        self.strategy = strategy
        self.bounds = dict(bounds)
        self.intervals = intervals
        self.fresh = fresh
        self.facets = []
        self.fresh_names = []

    def _fresh(self, interval):
        name = self.fresh()
        self.bounds[name] = interval
        self.fresh_names.append(name)
        return name

    def _as_variable(self, expression, node):
        coefficients = expression.coefficients
        if expression.constant == 0 and len(coefficients) == 1:
            (name, a), = coefficients.items()
            if a == 1:
                return name
        name = self._fresh(self.intervals[id(node)])
        self.facets.append(LinearConstraint(LinearExpression.variable(name) - expression, EQ))
        return name

    def linear(self, e) -> LinearExpression:
        if isinstance(e, Var):
            return LinearExpression.variable(e.name)
        if isinstance(e, Const):
            return LinearExpression.constant_expr(e.value)
        if isinstance(e, Neg):
            return -self.linear(e.operand)
        assert isinstance(e, BinOp)
        left, right = self.linear(e.left), self.linear(e.right)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if left.is_constant():
            return right * left.constant
        if right.is_constant():
            return left * right.constant
        x = self._as_variable(left, e.left)
        y = self._as_variable(right, e.right)
        product = self._fresh(self.intervals[id(e)])
        self.facets.extend(self.strategy.product_facets(product, x, y, self.bounds))
        return LinearExpression.variable(product)


def relax(c, b, strategy="envelope", fresh=None) -> list:
    """
    Linear relaxation of one constraint relative to the bounds b.

    Parameters
    ----------
    c : Constraint
    b : Box
    strategy : str or Relaxation
        Registered name ("drop", "envelope", "corner") or an instance.
    fresh : FreshVariables, optional
        Allocator shared across one relax_system call.

    Returns
    -------
    list of LinearConstraint
        Over the variables of c; satisfied by every integer solution of c within b.
    """
    strategy = get_relaxation(strategy)
    difference = c.difference()
    if difference is not None:
        return linear_relation(difference, c.relation)
    if not strategy.lifts_products:
        return []
    lifter = _Lifter(strategy, b, node_intervals(c, b), fresh or FreshVariables())
    difference = lifter.linear(c.left) - lifter.linear(c.right)
    lifted = lifter.facets + linear_relation(difference, c.relation)
    result = eliminate_constraints(lifted, lifter.fresh_names)
    logger.debug(f"relaxed {c} with {strategy} into {len(result)} constraints")
    return [r for r in result if not r.is_tautology()]


def relax_system(cs, b, strategy="envelope") -> Polyhedron:
    """alpha_box(b) intersected with the relaxation of every member of cs."""
    strategy = get_relaxation(strategy)
    fresh = FreshVariables()
    constraints = list(alpha_box(b).constraints)
    for c in cs:
        constraints.extend(relax(c, b, strategy, fresh))
    return Polyhedron(b.variables, constraints)
