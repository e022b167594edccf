"""
Convex polyhedra over the rationals, in constraint-only form.

A Polyhedron is a conjunction of LinearConstraints over named dimensions; the
single constraint -1 >= 0 is the canonical empty polyhedron. Every operation is a
pure function; anything semantic (emptiness, entailment, bounds) goes through the
exact simplex of simplex.py.
"""
import itertools
import logging
import math
from fractions import Fraction

from constants import D_EXACT, JOIN_MODES, POINT_BUDGET
from exceptions import OracleBudgetError
from lattices import Box, Interval
from linear import (
    CONTRADICTION,
    EQ,
    GE,
    LinearConstraint,
    LinearExpression,
    nullspace,
    rat_floor_ceil,
)
from simplex import SimplexStatus, solve_lp
from utils import PROFILER

logger = logging.getLogger(__name__)

# minimize intermediate Fourier-Motzkin systems above this many constraints
_FM_MINIMIZE_ABOVE = 12


class Polyhedron:
    """
    Immutable conjunction of linear constraints.

    Parameters
    ----------
    dims : sequence of str
        Ordered dimension names; every constraint variable must be one of them.
    constraints : iterable of LinearConstraint
    """

    __slots__ = ("dims", "constraints")

    def __init__(self, dims, constraints=()):
        self.dims = tuple(dict.fromkeys(dims))
        kept = set()
        for c in constraints:
            if c.is_tautology():
                continue
            if c.is_contradiction():
                kept = {CONTRADICTION}
                break
            kept.add(c)
        known = set(self.dims)
        for c in kept:
            missing = set(c.variables) - known
            if missing:
                raise ValueError(f"constraint {c} uses {sorted(missing)} outside dims {self.dims}")
        self.constraints = tuple(sorted(kept, key=LinearConstraint.sort_key))

    @classmethod
    def universe(cls, dims):
        return cls(dims)

    @classmethod
    def empty(cls, dims):
        return cls(dims, [CONTRADICTION])

    def is_marked_empty(self) -> bool:
        return self.constraints == (CONTRADICTION,)

    def is_universe(self) -> bool:
        return not self.constraints

    def with_constraints(self, constraints):
        return Polyhedron(self.dims, list(self.constraints) + list(constraints))

    def __eq__(self, other):
        return (
            isinstance(other, Polyhedron)
            and set(self.dims) == set(other.dims)
            and set(self.constraints) == set(other.constraints)
        )

    def __hash__(self):
        return hash((frozenset(self.dims), frozenset(self.constraints)))

    def __str__(self):
        return poly_dump(self)

    def __repr__(self):
        body = " & ".join(str(c) for c in self.constraints) or "true"
        return f"Polyhedron({', '.join(self.dims)}: {body})"


def _merged_dims(p, q):
    return tuple(dict.fromkeys(p.dims + q.dims))


def simplex_optimize(p: Polyhedron, objective: LinearExpression, sense="max"):
    """
    Optimize objective over p.

    Returns
    -------
    simplex.SimplexResult
        status OPTIMAL with the exact value and an optimal point, UNBOUNDED or INFEASIBLE.
    """
    outside = set(objective.variables) - set(p.dims)
    if outside:
        raise ValueError(f"objective ranges over {sorted(outside)} outside dims {p.dims}")
    return solve_lp(p.constraints, objective, sense)


def poly_intersect(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    return Polyhedron(_merged_dims(p, q), p.constraints + q.constraints)


def poly_extend(p: Polyhedron, dims) -> Polyhedron:
    return Polyhedron(p.dims + tuple(dims), p.constraints)


def poly_rename(p: Polyhedron, mapping) -> Polyhedron:
    dims = [mapping.get(d, d) for d in p.dims]
    return Polyhedron(dims, [c.rename(mapping) for c in p.constraints])


def _feasible(constraints) -> bool:
    return solve_lp(constraints, LinearExpression()).status is not SimplexStatus.INFEASIBLE


def poly_is_empty(p: Polyhedron) -> bool:
    if p.is_marked_empty():
        return True
    if p.is_universe():
        return False
    return not _feasible(p.constraints)


def _entails(constraints, c: LinearConstraint) -> bool:
    """True iff every rational point of the conjunction satisfies c."""
    if c.is_tautology() or c in constraints:
        return True
    for part in c.split():
        result = solve_lp(constraints, part.expression, "min")
        if result.status is SimplexStatus.INFEASIBLE:
            return True
        if result.status is SimplexStatus.UNBOUNDED or result.value < 0:
            return False
    return True


def poly_entails(p: Polyhedron, c: LinearConstraint) -> bool:
    return _entails(p.constraints, c)


def poly_includes(p: Polyhedron, q: Polyhedron) -> bool:
    """True iff q is a subset of p."""
    if q.is_marked_empty():
        return True
    if poly_is_empty(q):
        return True
    return all(_entails(q.constraints, c) for c in p.constraints)


def poly_equal(p: Polyhedron, q: Polyhedron) -> bool:
    return poly_includes(p, q) and poly_includes(q, p)


def poly_contains_point(p: Polyhedron, point) -> bool:
    return all(c.satisfied_by(point) for c in p.constraints)


def _syntactic_reduce(constraints):
    """
    Drop duplicates and tautologies, keep the tightest of parallel inequalities,
    merge opposite inequalities into equalities.
    """
    equalities = set()
    tightest = {}
    for c in constraints:
        if c.is_tautology():
            continue
        if c.is_contradiction():
            return [CONTRADICTION]
        if c.relation == EQ:
            equalities.add(c)
            continue
        key = tuple(c.expression.items())
        best = tightest.get(key)
        if best is None or c.expression.constant < best.expression.constant:
            tightest[key] = c
    out = list(equalities)
    for key, c in tightest.items():
        negated = tuple((name, -a) for name, a in key)
        other = tightest.get(negated)
        if other is not None:
            total = c.expression.constant + other.expression.constant
            if total < 0:
                return [CONTRADICTION]
            if total == 0:
                eq = LinearConstraint(c.expression, EQ)
                if eq not in equalities:
                    equalities.add(eq)
                    out.append(eq)
                continue
        out.append(c)
    return out


def _remove_redundant(constraints):
    """One simplex entailment check per constraint, against the ones still kept."""
    reduced = _syntactic_reduce(constraints)
    if reduced == [CONTRADICTION]:
        return reduced
    if not _feasible(reduced):
        return [CONTRADICTION]
    kept = sorted(reduced, key=LinearConstraint.sort_key, reverse=True)
    i = 0
    while i < len(kept):
        others = kept[:i] + kept[i + 1 :]
        if _entails(others, kept[i]):
            kept = others
        else:
            i += 1
    return kept


def poly_minimize(p: Polyhedron) -> Polyhedron:
    return Polyhedron(p.dims, _remove_redundant(p.constraints))


def _eliminate_one(constraints, name):
    pivot = next(
        (c for c in constraints if c.relation == EQ and c.expression.coefficient(name) != 0), None
    )
    if pivot is not None:
        a = pivot.expression.coefficient(name)
        replacement = pivot.expression.substitute(name, LinearExpression()) * (-1 / a)
        out = []
        for c in constraints:
            if c is pivot:
                continue
            if c.expression.coefficient(name) == 0:
                out.append(c)
            else:
                out.append(LinearConstraint(c.expression.substitute(name, replacement), c.relation))
        return out
    positive, negative, out = [], [], []
    for c in constraints:
        a = c.expression.coefficient(name)
        if a > 0:
            positive.append(c)
        elif a < 0:
            negative.append(c)
        else:
            out.append(c)
    for cp in positive:
        ap = cp.expression.coefficient(name)
        for cn in negative:
            an = -cn.expression.coefficient(name)
            out.append(LinearConstraint(cp.expression * an + cn.expression * ap, GE))
    return out


def eliminate_constraints(constraints, names):
    """Fourier-Motzkin elimination on a bare list of constraints."""
    current = _syntactic_reduce(constraints)
    for name in names:
        if current == [CONTRADICTION]:
            break
        current = _syntactic_reduce(_eliminate_one(current, name))
        if len(current) > _FM_MINIMIZE_ABOVE:
            current = _remove_redundant(current)
    return current


@PROFILER.profile("poly_eliminate")
def poly_eliminate(p: Polyhedron, names) -> Polyhedron:
    """Existentially quantify the given dimensions away (exact projection)."""
    names = [n for n in names if n in p.dims]
    dims = [d for d in p.dims if d not in names]
    return Polyhedron(dims, _remove_redundant(eliminate_constraints(p.constraints, names)))


def poly_project(p: Polyhedron, keep) -> Polyhedron:
    keep = tuple(keep)
    projected = poly_eliminate(p, [d for d in p.dims if d not in keep])
    return Polyhedron(keep, projected.constraints)


def _split(constraints):
    return [part for c in constraints for part in c.split()]


def _bound_of(constraints, expression, sense):
    result = solve_lp(constraints, expression, sense)
    if result.status is SimplexStatus.OPTIMAL:
        return result.value
    return None


def _template_facets(p, q, directions):
    """For each direction e, the facet min(e over p and q) <= e <= max(...) when finite."""
    facets = []
    for e in directions:
        lows = [_bound_of(x.constraints, e, "min") for x in (p, q)]
        highs = [_bound_of(x.constraints, e, "max") for x in (p, q)]
        if None not in lows:
            facets.append(LinearConstraint(e - min(lows), GE))
        if None not in highs:
            facets.append(LinearConstraint(max(highs) - e, GE))
    return facets


def _direction(c: LinearConstraint):
    """(e, b) with e primitive and homogeneous such that c reads e >= b."""
    e, scale = LinearExpression(c.expression.coefficients).primitive()
    return e, -c.expression.constant * scale


def _support_facets(p, q):
    """
    For every constraint direction e of p or q, the facet e >= min(inf_p e, inf_q e).
    Listed constraints give lower bounds on each infimum; the side that decides
    the minimum always gets its exact value from the simplex.
    """
    directions = {}
    for side, poly in enumerate((p, q)):
        for c in _split(poly.constraints):
            e, b = _direction(c)
            entry = directions.setdefault(tuple(e.items()), [e, None, None])
            known = entry[1 + side]
            entry[1 + side] = b if known is None else max(known, b)
    facets = []
    for e, low_p, low_q in directions.values():
        sides = (p, q)
        lows = [low_p, low_q]
        exact = [False, False]
        for side in (0, 1):
            if lows[side] is None:
                lows[side] = _bound_of(sides[side].constraints, e, "min")
                exact[side] = True
        while None not in lows:
            side = 0 if lows[0] <= lows[1] else 1
            if exact[side]:
                facets.append(LinearConstraint(e - lows[side], GE))
                break
            lows[side] = _bound_of(sides[side].constraints, e, "min")
            exact[side] = True
    return facets


def _affine_equalities(p):
    """Explicit and implicit equalities of a nonempty polyhedron."""
    equalities = [c for c in p.constraints if c.relation == EQ]
    for c in p.constraints:
        if c.relation == GE:
            result = solve_lp(p.constraints, c.expression, "max")
            if result.status is SimplexStatus.OPTIMAL and result.value == 0:
                equalities.append(LinearConstraint(c.expression, EQ))
    return equalities


def _common_equalities(p, q, dims):
    """Equalities in the intersection of the row spaces of both affine hulls."""
    eq_p = _affine_equalities(p)
    eq_q = _affine_equalities(q)
    if not eq_p or not eq_q:
        return []

    def row(c):
        return [c.expression.coefficient(d) for d in dims] + [c.expression.constant]

    rows_p = [row(c) for c in eq_p]
    rows_q = [row(c) for c in eq_q]
    # lambda^T R_p = mu^T R_q  <=>  [R_p^T | -R_q^T] (lambda, mu) = 0
    width = len(dims) + 1
    system = [
        [rows_p[i][k] for i in range(len(rows_p))] + [-rows_q[j][k] for j in range(len(rows_q))]
        for k in range(width)
    ]
    common = []
    for vector in nullspace(system):
        lam = vector[: len(rows_p)]
        coefficients = [sum(lam[i] * rows_p[i][k] for i in range(len(rows_p))) for k in range(width)]
        expression = LinearExpression(dict(zip(dims, coefficients[:-1])), coefficients[-1])
        c = LinearConstraint(expression, EQ)
        if not c.is_tautology():
            common.append(c)
    return common


def _unit_directions(dims):
    return [LinearExpression.variable(d) for d in dims]


def _octagon_directions(dims):
    out = []
    for a, b in itertools.combinations(dims, 2):
        out.append(LinearExpression({a: 1, b: 1}))
        out.append(LinearExpression({a: 1, b: -1}))
    return out


def _template_join(p, q, dims, octagon=False):
    directions = _unit_directions(dims)
    if octagon:
        directions += _octagon_directions(dims)
    constraints = _support_facets(p, q)
    constraints += _template_facets(p, q, directions)
    constraints += _common_equalities(p, q, dims)
    return Polyhedron(dims, _remove_redundant(constraints))


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _primitive(v):
    """Positive multiple of v with coprime integer entries."""
    denominator = math.lcm(*(Fraction(a).denominator for a in v))
    numerators = [int(a * denominator) for a in v]
    g = math.gcd(*numerators)
    return tuple(Fraction(n // g) for n in numerators) if g else tuple(Fraction(0) for _ in v)


def _combine(u, a, v, b):
    return _primitive([a * x + b * y for x, y in zip(u, v)])


def cone_generators(rows, width):
    """
    Double description of the cone {v : r.v >= 0 for every row r}.

    Parameters
    ----------
    rows : sequence of sequences of Fraction
    width : int
        Dimension of the ambient space.

    Returns
    -------
    (list, list)
        A basis of the lineality space and the extreme rays modulo it, as
        tuples of Fractions with coprime integer entries.
    """
    lines = [tuple(Fraction(int(i == j)) for j in range(width)) for i in range(width)]
    rays = []  # (ray, indices of the rows tight at it)
    for k, row in enumerate(rows):
        row = tuple(Fraction(a) for a in row)
        index = next((i for i, line in enumerate(lines) if _dot(row, line) != 0), None)
        if index is not None:
            pivot = lines.pop(index)
            h = _dot(row, pivot)
            if h < 0:
                pivot, h = tuple(-a for a in pivot), -h
            lines = [_combine(line, h, pivot, -_dot(row, line)) for line in lines]
            rays = [(_combine(r, h, pivot, -_dot(row, r)), tight | {k}) for r, tight in rays]
            rays.append((_primitive(pivot), frozenset(range(k))))
            continue
        signs = [_dot(row, r) for r, _ in rays]
        updated = [(r, tight) for (r, tight), s in zip(rays, signs) if s > 0]
        updated += [(r, tight | {k}) for (r, tight), s in zip(rays, signs) if s == 0]
        for i, ((rp, tp), sp) in enumerate(zip(rays, signs)):
            if sp <= 0:
                continue
            for j, ((rn, tn), sn) in enumerate(zip(rays, signs)):
                if sn >= 0:
                    continue
                common = tp & tn
                adjacent = not any(
                    common <= tight for m, (_, tight) in enumerate(rays) if m not in (i, j)
                )
                if adjacent:
                    updated.append((_combine(rn, sp, rp, -sn), common | {k}))
        rays = updated
    return lines, [r for r, _ in rays]


def _homogeneous_rows(p, dims):
    rows = []
    for c in p.constraints:
        row = [c.expression.coefficient(d) for d in dims] + [c.expression.constant]
        rows.append(row)
        if c.relation == EQ:
            rows.append([-a for a in row])
    rows.append([Fraction(0)] * len(dims) + [Fraction(1)])
    return rows


def _hull_join(p, q, dims):
    """
    Closed convex hull through generators: the vertices and rays of both sides
    span a cone in (x, t) space whose facets, cut at t = 1, bound the hull.
    """
    width = len(dims) + 1
    generators = []
    for poly in (p, q):
        lines, rays = cone_generators(_homogeneous_rows(poly, dims), width)
        generators += rays
        for line in lines:
            generators += [line, tuple(-a for a in line)]
    facet_lines, facet_rays = cone_generators(generators, width)

    def constraint(h, relation):
        return LinearConstraint(LinearExpression(dict(zip(dims, h[:-1])), h[-1]), relation)

    constraints = [constraint(h, GE) for h in facet_rays]
    constraints += [constraint(h, EQ) for h in facet_lines]
    logger.debug(f"hull of {len(generators)} generators has {len(constraints)} facets")
    return Polyhedron(dims, _remove_redundant(constraints))


@PROFILER.profile("poly_join")
def poly_join(p: Polyhedron, q: Polyhedron, mode="template", d_exact=D_EXACT) -> Polyhedron:
    """
    Convex join of two polyhedra.

    Parameters
    ----------
    p, q : Polyhedron
    mode : str
        "template": for every constraint direction of either argument the
        tightest parallel facet valid on both, the bounding box of the union and
        the affine equalities shared by both.
        "hull": the exact closed convex hull by vertex and ray enumeration up to
        d_exact dimensions, the template join strengthened with octagonal facets above.
    d_exact : int

    Returns
    -------
    Polyhedron
        Always contains p and q.
    """
    if mode not in JOIN_MODES:
        raise ValueError(f"unknown join mode '{mode}', expected one of {JOIN_MODES}")
    dims = _merged_dims(p, q)
    if poly_is_empty(p):
        return Polyhedron(dims, q.constraints)
    if poly_is_empty(q):
        return Polyhedron(dims, p.constraints)
    if mode == "hull":
        if len(dims) <= d_exact:
            return _hull_join(p, q, dims)
        return _template_join(p, q, dims, octagon=True)
    return _template_join(p, q, dims)


def poly_widen(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    """Keep exactly the constraints of p (equalities split) entailed by q."""
    dims = _merged_dims(p, q)
    if poly_is_empty(p):
        return Polyhedron(dims, q.constraints)
    kept = [c for c in _split(p.constraints) if _entails(q.constraints, c)]
    return Polyhedron(dims, _syntactic_reduce(kept))


def alpha_box(b: Box, dims=None) -> Polyhedron:
    dims = tuple(dims) if dims is not None else b.variables
    if b.is_empty():
        return Polyhedron.empty(dims)
    constraints = []
    for name, iv in b.items():
        if iv.lo != -math.inf:
            constraints.append(LinearConstraint.ge(name, iv.lo))
        if iv.hi != math.inf:
            constraints.append(LinearConstraint.le(name, iv.hi))
    return Polyhedron(dims + tuple(n for n in b.variables if n not in dims), constraints)


def gamma_box(p: Polyhedron, dims=None) -> Box:
    """
    Per-dimension [ceil(min), floor(max)] over p; the empty box when p is empty or
    some rounded interval is empty.
    """
    dims = tuple(dims) if dims is not None else p.dims
    if poly_is_empty(p):
        return Box.empty(dims)
    constrained = {name for c in p.constraints for name in c.variables}
    intervals = {}
    for name in dims:
        if name not in constrained:
            intervals[name] = Interval()
            continue
        e = LinearExpression.variable(name)
        low = solve_lp(p.constraints, e, "min")
        high = solve_lp(p.constraints, e, "max")
        if SimplexStatus.INFEASIBLE in (low.status, high.status):
            return Box.empty(dims)
        lo = rat_floor_ceil(low.value)[1] if low.optimal else -math.inf
        hi = rat_floor_ceil(high.value)[0] if high.optimal else math.inf
        if lo > hi:
            return Box.empty(dims)
        intervals[name] = Interval(lo, hi)
    return Box(intervals)


def poly_integer_points(p: Polyhedron, budget=POINT_BUDGET) -> set:
    """Integer tuples of p in dims order, by enumeration of its bounding box."""
    box = gamma_box(p)
    if box.is_empty():
        return set()
    size = box.size()
    if size > budget:
        raise OracleBudgetError(f"bounding box of {size} points exceeds the budget of {budget}")
    return {
        point
        for point in box.points()
        if poly_contains_point(p, dict(zip(p.dims, point)))
    }


def poly_dump(p: Polyhedron) -> str:
    """Sorted constraint lines; `true` for the universe."""
    if not p.constraints:
        return "true"
    return "\n".join(sorted(str(c) for c in p.constraints))


def poly_bounds(p: Polyhedron, name):
    """Exact rational (min, max) of one dimension, None for an unbounded side."""
    e = LinearExpression.variable(name)
    return _bound_of(p.constraints, e, "min"), _bound_of(p.constraints, e, "max")


def as_fraction_point(point) -> dict:
    return {name: Fraction(v) for name, v in point.items()}
