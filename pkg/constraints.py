import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from constants import SHAVE_BUDGET, TUPLE_CAP
from exceptions import UnboundVariableError
from lattices import ArcElement, Box, Interval, TupleSet, check_cap
from linear import LinearExpression

"""
constraints.py is the constraint language over integer variables and its filters.

Classes:
    Var, Const, Neg, BinOp - expression AST over {+, -, *}
    Constraint             - left <rel> right with rel in {<, <=, >, >=, ==, !=}

Functions:
    eval_constraint - truth of a constraint under a total valuation
    exact_filter    - f_c on a tuple set, the exact oracle
    solve_exact     - greatest fixpoint of the exact filters
    domain_filter   - alpha_arc . f_c . gamma_arc by support checking
    bound_filter    - interval (HC4) revise plus exact bound shaving on small boxes
    bound_fixpoint  - bound_filter of a constraint set until stable
"""

logger = logging.getLogger(__name__)

INF = math.inf
RELATIONS = ("<", "<=", ">", ">=", "==", "!=")
NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}
MIRRORED = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}
_SEXPR_RELATIONS = {"<": "<", "<=": "<=", ">": ">", ">=": ">=", "==": "=", "!=": "!="}
# HC4 revise sweeps per bound_filter call
_HC4_SWEEPS = 64
# bound_fixpoint sweeps over a constraint set
_FIXPOINT_SWEEPS = 1000


class Expr:
    """Integer expression. Subclasses are frozen dataclasses."""

    def __add__(self, other):
        return BinOp("+", self, as_expr(other))

    def __radd__(self, other):
        return BinOp("+", as_expr(other), self)

    def __sub__(self, other):
        return BinOp("-", self, as_expr(other))

    def __rsub__(self, other):
        return BinOp("-", as_expr(other), self)

    def __mul__(self, other):
        return BinOp("*", self, as_expr(other))

    def __rmul__(self, other):
        return BinOp("*", as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def lt(self, other):
        return Constraint(self, "<", as_expr(other))

    def le(self, other):
        return Constraint(self, "<=", as_expr(other))

    def gt(self, other):
        return Constraint(self, ">", as_expr(other))

    def ge(self, other):
        return Constraint(self, ">=", as_expr(other))

    def eq(self, other):
        return Constraint(self, "==", as_expr(other))

    def ne(self, other):
        return Constraint(self, "!=", as_expr(other))


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str

    def variables(self):
        return {self.name}

    def evaluate(self, valuation):
        if self.name not in valuation:
            raise UnboundVariableError(self.name, "expression")
        return valuation[self.name]

    def rename(self, mapping):
        if self.name not in mapping:
            return self
        target = mapping[self.name]
        return target if isinstance(target, Expr) else Var(target)

    def sexpr(self):
        return self.name

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: int

    def variables(self):
        return set()

    def evaluate(self, valuation):
        return self.value

    def rename(self, mapping):
        return self

    def sexpr(self):
        return str(self.value)

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    operand: Expr

    def variables(self):
        return self.operand.variables()

    def evaluate(self, valuation):
        return -self.operand.evaluate(valuation)

    def rename(self, mapping):
        return Neg(self.operand.rename(mapping))

    def sexpr(self):
        return f"(- {self.operand.sexpr()})"

    def __str__(self):
        return f"-{_wrap(self.operand, 3)}"


_PRECEDENCE = {"+": 1, "-": 1, "*": 2}


def _wrap(e, level):
    text = str(e)
    if isinstance(e, BinOp) and _PRECEDENCE[e.op] < level:
        return f"({text})"
    return text


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in _PRECEDENCE:
            raise ValueError(f"unsupported operator '{self.op}'")

    def variables(self):
        return self.left.variables() | self.right.variables()

    def evaluate(self, valuation):
        a = self.left.evaluate(valuation)
        b = self.right.evaluate(valuation)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        return a * b

    def rename(self, mapping):
        return BinOp(self.op, self.left.rename(mapping), self.right.rename(mapping))

    def sexpr(self):
        return f"({self.op} {self.left.sexpr()} {self.right.sexpr()})"

    def __str__(self):
        level = _PRECEDENCE[self.op]
        right_level = level + 1 if self.op == "-" else level
        return f"{_wrap(self.left, level)} {self.op} {_wrap(self.right, right_level)}"


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return Var(value)
    return Const(int(value))


def to_linear(e: Expr):
    """LinearExpression of e, or None when e multiplies two non-constant terms."""
    if isinstance(e, Var):
        return LinearExpression.variable(e.name)
    if isinstance(e, Const):
        return LinearExpression.constant_expr(e.value)
    if isinstance(e, Neg):
        inner = to_linear(e.operand)
        return None if inner is None else -inner
    left, right = to_linear(e.left), to_linear(e.right)
    if left is None or right is None:
        return None
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if left.is_constant():
        return right * left.constant
    if right.is_constant():
        return left * right.constant
    return None


@dataclass(frozen=True, eq=True)
class Constraint:
    left: Expr
    relation: str
    right: Expr

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unsupported relation '{self.relation}'")

    @property
    def variables(self) -> tuple:
        return tuple(sorted(self.left.variables() | self.right.variables()))

    def evaluate(self, valuation) -> bool:
        return _compare(self.left.evaluate(valuation), self.relation, self.right.evaluate(valuation))

    def negate(self):
        return Constraint(self.left, NEGATED[self.relation], self.right)

    def rename(self, mapping):
        return Constraint(self.left.rename(mapping), self.relation, self.right.rename(mapping))

    def difference(self):
        """LinearExpression of left - right, or None when nonlinear."""
        left, right = to_linear(self.left), to_linear(self.right)
        if left is None or right is None:
            return None
        return left - right

    def is_linear(self) -> bool:
        return self.difference() is not None

    def sexpr(self):
        return f"({_SEXPR_RELATIONS[self.relation]} {self.left.sexpr()} {self.right.sexpr()})"

    def __str__(self):
        return f"{self.left} {self.relation} {self.right}"


def constraint_variables(cs) -> tuple:
    return tuple(sorted(set().union(*(c.variables for c in cs)))) if cs else ()


def _compare(a, relation, b) -> bool:
    if relation == "<":
        return a < b
    if relation == "<=":
        return a <= b
    if relation == ">":
        return a > b
    if relation == ">=":
        return a >= b
    if relation == "==":
        return a == b
    return a != b


def eval_constraint(c: Constraint, v) -> bool:
    return c.evaluate(v)


def exact_filter(c: Constraint, s: TupleSet) -> TupleSet:
    missing = set(c.variables) - set(s.variables)
    if missing:
        raise UnboundVariableError(sorted(missing)[0], "tuple set")
    return TupleSet(s.variables, (t for t in s.tuples if c.evaluate(dict(zip(s.variables, t)))))


def solve_exact(cs, d: TupleSet, cap=TUPLE_CAP) -> TupleSet:
    """Greatest fixpoint of the composed exact filters, starting from d."""
    check_cap(len(d), cap)
    current = d
    while True:
        previous = current
        for c in cs:
            current = exact_filter(c, current)
        if current == previous:
            return current


def domain_filter(c: Constraint, a: ArcElement, cap=TUPLE_CAP) -> ArcElement:
    """
    Keep exactly the values that take part in a solution of c, over the
    variables of c; other components survive unless c has no solution at all.
    """
    names = c.variables
    if a.is_empty():
        return ArcElement({name: () for name in a.variables})
    check_cap(math.prod(len(a[name]) for name in names), cap)
    supported = {name: set() for name in names}
    for values in itertools.product(*(a[name] for name in names)):
        valuation = dict(zip(names, values))
        if c.evaluate(valuation):
            for name, value in valuation.items():
                supported[name].add(value)
    if names and not supported[names[0]]:
        return ArcElement({name: () for name in a.variables})
    if not names and not c.evaluate({}):
        return ArcElement({name: () for name in a.variables})
    return ArcElement({name: supported.get(name, a[name]) for name in a.variables})


# interval arithmetic on integer bounds with infinite ends


def _mul(a, b):
    if a == 0 or b == 0:
        return 0
    return a * b


def _imul(x: Interval, y: Interval) -> Interval:
    corners = [_mul(p, q) for p in (x.lo, x.hi) for q in (y.lo, y.hi)]
    return Interval(min(corners), max(corners))


def _quotient(a, c):
    """a / c for bounds; None when undefined (both infinite)."""
    if c in (INF, -INF):
        if a in (INF, -INF):
            return None
        return 0
    if a in (INF, -INF):
        return a if c > 0 else -a
    return Fraction(a, c)


def _divide_signed(t: Interval, y: Interval) -> Interval:
    """Integer x with x * y in t for some y in y, where 0 is not in y."""
    corners = [_quotient(a, c) for a in (t.lo, t.hi) for c in (y.lo, y.hi)]
    if None in corners:
        return Interval()
    lo, hi = min(corners), max(corners)
    lo = lo if lo == -INF else math.ceil(lo)
    hi = hi if hi == INF else math.floor(hi)
    return Interval(lo, hi)


def _idiv(t: Interval, y: Interval) -> Interval:
    """
    Integer-aware projection of x * y in t onto x. A zero divisor only supports
    x when 0 is in t.
    """
    if t.is_empty() or y.is_empty():
        return Interval.empty()
    if 0 in y and 0 in t:
        return Interval()
    parts = []
    negative = y.meet(Interval(-INF, -1))
    positive = y.meet(Interval(1, INF))
    for part in (negative, positive):
        if not part.is_empty():
            parts.append(_divide_signed(t, part))
    result = Interval.empty()
    for part in parts:
        result = result.join(part)
    return result


def _forward(e: Expr, box, cache) -> Interval:
    key = id(e)
    if key in cache:
        return cache[key]
    if isinstance(e, Var):
        result = box[e.name]
    elif isinstance(e, Const):
        result = Interval.point(e.value)
    elif isinstance(e, Neg):
        inner = _forward(e.operand, box, cache)
        result = Interval(-inner.hi, -inner.lo) if not inner.is_empty() else inner
    else:
        x = _forward(e.left, box, cache)
        y = _forward(e.right, box, cache)
        if x.is_empty() or y.is_empty():
            result = Interval.empty()
        elif e.op == "+":
            result = Interval(x.lo + y.lo, x.hi + y.hi)
        elif e.op == "-":
            result = Interval(x.lo - y.hi, x.hi - y.lo)
        else:
            result = _imul(x, y)
    cache[key] = result
    return result


def _backward(e: Expr, target: Interval, box, cache) -> bool:
    """Narrow the box so that e can evaluate into target. False on emptiness."""
    current = cache[id(e)].meet(target)
    if current.is_empty():
        return False
    if isinstance(e, Var):
        box[e.name] = box[e.name].meet(current)
        return not box[e.name].is_empty()
    if isinstance(e, Const):
        return True
    if isinstance(e, Neg):
        return _backward(e.operand, Interval(-current.hi, -current.lo), box, cache)
    x = cache[id(e.left)]
    y = cache[id(e.right)]
    if e.op == "+":
        tx = Interval(current.lo - y.hi, current.hi - y.lo)
        ty = Interval(current.lo - x.hi, current.hi - x.lo)
    elif e.op == "-":
        tx = Interval(current.lo + y.lo, current.hi + y.hi)
        ty = Interval(x.lo - current.hi, x.hi - current.lo)
    else:
        tx = _idiv(current, y)
        ty = _idiv(current, x)
    if not _backward(e.left, tx, box, cache):
        return False
    # the right child sees the left child's narrowing through the fresh cache entry
    cache[id(e.left)] = cache[id(e.left)].meet(tx)
    if e.op == "*":
        ty = ty.meet(_idiv(current, cache[id(e.left)]))
    return _backward(e.right, ty, box, cache)


def _relation_targets(relation, left: Interval, right: Interval):
    """Intervals the two sides must lie in."""
    if relation in ("<", "<="):
        gap = 1 if relation == "<" else 0
        return Interval(-INF, right.hi - gap), Interval(left.lo + gap, INF)
    if relation in (">", ">="):
        gap = 1 if relation == ">" else 0
        return Interval(right.lo + gap, INF), Interval(-INF, left.hi - gap)
    if relation == "==":
        both = left.meet(right)
        return both, both
    # !=
    tl, tr = left, right
    if right.is_singleton():
        tl = _remove_endpoint(left, right.lo)
    if left.is_singleton():
        tr = _remove_endpoint(right, left.lo)
    return tl, tr


def _remove_endpoint(iv: Interval, value) -> Interval:
    if iv.is_singleton() and iv.lo == value:
        return Interval.empty()
    if iv.lo == value:
        return Interval(iv.lo + 1, iv.hi)
    if iv.hi == value:
        return Interval(iv.lo, iv.hi - 1)
    return iv


def node_intervals(c: Constraint, b) -> dict:
    """
    Forward interval of every node of c, keyed by id(node). The two sides are
    narrowed by the relation, so in z == x * y the product node gets z's bounds too.
    """
    cache = {}
    left = _forward(c.left, b, cache)
    right = _forward(c.right, b, cache)
    if not left.is_empty() and not right.is_empty():
        tl, tr = _relation_targets(c.relation, left, right)
        cache[id(c.left)] = left.meet(tl)
        cache[id(c.right)] = right.meet(tr)
    return cache


def _revise(c: Constraint, box: dict) -> bool:
    """HC4 revise to a local fixpoint. Mutates box, False on emptiness."""
    for _ in range(_HC4_SWEEPS):
        before = dict(box)
        cache = {}
        left = _forward(c.left, box, cache)
        right = _forward(c.right, box, cache)
        if left.is_empty() or right.is_empty():
            return False
        tl, tr = _relation_targets(c.relation, left, right)
        if not _backward(c.left, tl, box, cache):
            return False
        cache = {}
        _forward(c.left, box, cache)
        _forward(c.right, box, cache)
        if not _backward(c.right, tr, box, cache):
            return False
        if box == before:
            return True
    return True


def _has_support(c, names, box, fixed, value, budget):
    """Search a solution with fixed = value among the other variables' bounds."""
    others = [n for n in names if n != fixed]
    ranges = [range(box[n].lo, box[n].hi + 1) for n in others]
    valuation = {fixed: value}
    for values in itertools.product(*ranges):
        budget[0] -= 1
        if budget[0] < 0:
            return True
        valuation.update(zip(others, values))
        if c.evaluate(valuation):
            return True
    return False


def _shave(c: Constraint, box: dict, budget) -> bool:
    """
    Move each bound inward until it has an integer support inside the current
    bounds. Stops (soundly) when the evaluation budget runs out.
    """
    names = c.variables
    if not all(box[n].is_finite() for n in names):
        return True
    if math.prod(box[n].size() for n in names) > budget:
        return True
    budget = [budget]
    changed = True
    while changed and budget[0] > 0:
        changed = False
        for name in names:
            iv = box[name]
            lo, hi = iv.lo, iv.hi
            while lo <= hi and not _has_support(c, names, box, name, lo, budget):
                lo += 1
            while hi >= lo and not _has_support(c, names, box, name, hi, budget):
                hi -= 1
            if lo > hi:
                box[name] = Interval.empty()
                return False
            if (lo, hi) != (iv.lo, iv.hi):
                box[name] = Interval(lo, hi)
                changed = True
    return True


def bound_filter(c: Constraint, b: Box, shave_budget=SHAVE_BUDGET) -> Box:
    """
    Bound filtering of one constraint.

    Parameters
    ----------
    c : Constraint
    b : Box
        Must hold every variable of c; other components are returned untouched.
    shave_budget : int
        Constraint evaluations allowed for exact shaving after the interval revise.

    Returns
    -------
    Box
        Contains alpha_inter . domain_filter . gamma_inter of b; equal to it when
        the shaving budget suffices.
    """
    if b.is_empty():
        return b
    names = c.variables
    for name in names:
        if name not in b:
            raise UnboundVariableError(name, "box")
    if not names:
        return b if c.evaluate({}) else Box.empty(b.variables)
    box = {name: b[name] for name in names}
    if not _revise(c, box) or not _shave(c, box, shave_budget):
        return Box.empty(b.variables)
    return b.extend(box)


def bound_fixpoint(cs, b: Box, shave_budget=SHAVE_BUDGET, sweeps=_FIXPOINT_SWEEPS) -> Box:
    """Apply bound_filter over cs until nothing changes (or the sweep cap)."""
    current = b
    for _ in range(sweeps):
        previous = current
        for c in cs:
            current = bound_filter(c, current, shave_budget)
            if current.is_empty():
                return current
        if current == previous:
            break
    return current
