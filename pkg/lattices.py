import itertools
import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import NamedTuple

from constants import TUPLE_CAP
from exceptions import ArityMismatchError, OracleBudgetError

"""
lattices.py holds the concrete lattice of valuation sets and its two abstractions.

Classes:
    Interval   - closed integer interval, bounds may be -inf / +inf
    Box        - immutable variable -> Interval mapping; the bound element and interval box
    ArcElement - immutable variable -> finite set of integers
    TupleSet   - ordered variables plus a finite set of integer tuples

Functions:
    alpha_arc / gamma_arc       - projection / Cartesian product
    alpha_inter / gamma_inter   - interval hull / integer expansion
    alpha_bound / gamma_bound   - the two composed
    lattice_ops                 - leq, join, meet for the concrete, arc and bound lattices
"""

INF = math.inf


def _bound(value):
    if value in (INF, -INF):
        return value
    return int(value)


@dataclass(frozen=True)
class Interval:
    lo: object = -INF
    hi: object = INF

    def __post_init__(self):
        lo, hi = _bound(self.lo), _bound(self.hi)
        if lo > hi:
            lo, hi = INF, -INF
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def empty(cls):
        return cls(INF, -INF)

    @classmethod
    def point(cls, value):
        return cls(value, value)

    def is_empty(self) -> bool:
        return self.lo > self.hi

    def is_finite(self) -> bool:
        return self.is_empty() or (self.lo != -INF and self.hi != INF)

    def is_singleton(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> int:
        if not self.is_singleton():
            raise ValueError(f"interval {self} is not a singleton")
        return self.lo

    def size(self):
        if self.is_empty():
            return 0
        if not self.is_finite():
            return INF
        return self.hi - self.lo + 1

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    __contains__ = contains

    def meet(self, other):
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def join(self, other):
        if self.is_empty():
            return other
        if other.is_empty():
            return self
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def leq(self, other) -> bool:
        return self.is_empty() or (other.lo <= self.lo and self.hi <= other.hi)

    def __iter__(self):
        if not self.is_finite():
            raise OracleBudgetError(f"cannot enumerate the infinite interval {self}")
        return iter(range(self.lo, self.hi + 1)) if not self.is_empty() else iter(())

    def __str__(self):
        if self.is_empty():
            return "empty"
        return f"[{_fmt(self.lo)}, {_fmt(self.hi)}]"


def _fmt(bound):
    if bound == INF:
        return "+inf"
    if bound == -INF:
        return "-inf"
    return str(bound)


def _as_interval(value) -> Interval:
    if isinstance(value, Interval):
        return value
    lo, hi = value
    return Interval(lo, hi)


class Box(Mapping):
    """
    Immutable mapping from variable names to Intervals. A box with one empty
    component is the canonical empty box: all of its components are empty.
    """

    __slots__ = ("_intervals", "_empty")

    def __init__(self, intervals=None):
        intervals = dict(intervals or {})
        converted = {name: _as_interval(iv) for name, iv in intervals.items()}
        self._empty = any(iv.is_empty() for iv in converted.values())
        if self._empty:
            converted = {name: Interval.empty() for name in converted}
        self._intervals = converted

    @classmethod
    def empty(cls, variables):
        return cls({name: Interval.empty() for name in variables})

    @classmethod
    def universe(cls, variables):
        return cls({name: Interval() for name in variables})

    def __getitem__(self, name) -> Interval:
        return self._intervals[name]

    def __iter__(self):
        return iter(self._intervals)

    def __len__(self):
        return len(self._intervals)

    @property
    def variables(self) -> tuple:
        return tuple(self._intervals)

    def is_empty(self) -> bool:
        return self._empty

    def is_finite(self) -> bool:
        return all(iv.is_finite() for iv in self._intervals.values())

    def size(self):
        if self._empty:
            return 0
        total = 1
        for iv in self._intervals.values():
            total *= iv.size()
        return total

    def restrict(self, variables):
        return Box({name: self._intervals[name] for name in variables})

    def with_interval(self, name, interval):
        intervals = dict(self._intervals)
        intervals[name] = _as_interval(interval)
        return Box(intervals)

    def extend(self, other):
        """Components of other override those of self."""
        intervals = dict(self._intervals)
        intervals.update(other.items())
        return Box(intervals)

    def meet(self, other):
        _check_same(self.variables, other.variables, ordered=False)
        return Box({name: iv.meet(other[name]) for name, iv in self._intervals.items()})

    def join(self, other):
        _check_same(self.variables, other.variables, ordered=False)
        if self._empty:
            return other
        if other.is_empty():
            return self
        return Box({name: iv.join(other[name]) for name, iv in self._intervals.items()})

    def leq(self, other) -> bool:
        _check_same(self.variables, other.variables, ordered=False)
        return self._empty or all(iv.leq(other[name]) for name, iv in self._intervals.items())

    def points(self):
        """All integer points, as tuples in variable order."""
        if self._empty:
            return iter(())
        return itertools.product(*(list(iv) for iv in self._intervals.values()))

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self):
        return hash(frozenset(self._intervals.items()))

    def __str__(self):
        return ", ".join(f"{name} in {iv}" for name, iv in self._intervals.items())

    def __repr__(self):
        return f"Box({self})"


# the bound element and the interval box of the polyhedra are the same type
BoundElement = Box
IntervalBox = Box


class ArcElement(Mapping):
    """Immutable mapping from variable names to sorted finite sets of integers."""

    __slots__ = ("_sets",)

    def __init__(self, sets=None):
        self._sets = {name: tuple(sorted(set(values))) for name, values in dict(sets or {}).items()}

    def __getitem__(self, name) -> tuple:
        return self._sets[name]

    def __iter__(self):
        return iter(self._sets)

    def __len__(self):
        return len(self._sets)

    @property
    def variables(self) -> tuple:
        return tuple(self._sets)

    def is_empty(self) -> bool:
        return any(not values for values in self._sets.values())

    def size(self) -> int:
        total = 1
        for values in self._sets.values():
            total *= len(values)
        return total

    def __eq__(self, other):
        if not isinstance(other, ArcElement):
            return NotImplemented
        return self._sets == other._sets

    def __hash__(self):
        return hash(frozenset(self._sets.items()))

    def __str__(self):
        return ", ".join(f"{name} in {{{', '.join(map(str, v))}}}" for name, v in self._sets.items())

    def __repr__(self):
        return f"ArcElement({self})"


class TupleSet:
    """
    Element of the concrete lattice: ordered variables and a finite set of integer tuples.

    Parameters
    ----------
    variables : sequence of str
    tuples : iterable of tuple of int
    """

    __slots__ = ("variables", "tuples")

    def __init__(self, variables, tuples=()):
        self.variables = tuple(variables)
        tuples = frozenset(tuple(t) for t in tuples)
        for t in tuples:
            if len(t) != len(self.variables):
                raise ArityMismatchError(f"tuple {t} does not match variables {self.variables}")
        self.tuples = tuples

    @classmethod
    def from_box(cls, box, cap=TUPLE_CAP):
        check_cap(box.size(), cap)
        return cls(box.variables, box.points())

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(sorted(self.tuples))

    def __contains__(self, t):
        return tuple(t) in self.tuples

    def valuations(self):
        for t in sorted(self.tuples):
            yield dict(zip(self.variables, t))

    def project(self, variables):
        index = [self.variables.index(name) for name in variables]
        return TupleSet(variables, (tuple(t[i] for i in index) for t in self.tuples))

    def __eq__(self, other):
        if not isinstance(other, TupleSet):
            return NotImplemented
        return self.variables == other.variables and self.tuples == other.tuples

    def __hash__(self):
        return hash((self.variables, self.tuples))

    def __repr__(self):
        return f"TupleSet({self.variables}, {sorted(self.tuples)})"


def check_cap(size, cap=TUPLE_CAP):
    if size > cap:
        raise OracleBudgetError(f"{size} tuples exceed the oracle cap of {cap}")


def _check_same(a, b, ordered=True):
    same = tuple(a) == tuple(b) if ordered else set(a) == set(b)
    if not same:
        raise ArityMismatchError(f"operands range over different variables: {a} vs {b}")


def alpha_arc(s: TupleSet) -> ArcElement:
    return ArcElement({name: {t[i] for t in s.tuples} for i, name in enumerate(s.variables)})


def gamma_arc(a: ArcElement, cap=TUPLE_CAP) -> TupleSet:
    check_cap(a.size(), cap)
    return TupleSet(a.variables, itertools.product(*(a[name] for name in a.variables)))


def alpha_inter(a: ArcElement) -> Box:
    return Box(
        {
            name: Interval(min(values), max(values)) if values else Interval.empty()
            for name, values in a.items()
        }
    )


def gamma_inter(b: Box) -> ArcElement:
    return ArcElement({name: list(iv) for name, iv in b.items()})


def alpha_bound(s: TupleSet) -> Box:
    return alpha_inter(alpha_arc(s))


def gamma_bound(b: Box, cap=TUPLE_CAP) -> TupleSet:
    return gamma_arc(gamma_inter(b), cap)


class LatticeOps(NamedTuple):
    leq: object
    join: object
    meet: object


def _concrete_leq(s, t):
    _check_same(s.variables, t.variables)
    return s.tuples <= t.tuples


def _concrete_join(s, t):
    _check_same(s.variables, t.variables)
    return TupleSet(s.variables, s.tuples | t.tuples)


def _concrete_meet(s, t):
    _check_same(s.variables, t.variables)
    return TupleSet(s.variables, s.tuples & t.tuples)


def _arc_leq(a, b):
    _check_same(a.variables, b.variables)
    if a.is_empty():
        return True
    return all(set(a[name]) <= set(b[name]) for name in a.variables)


def _arc_join(a, b):
    _check_same(a.variables, b.variables)
    return ArcElement({name: set(a[name]) | set(b[name]) for name in a.variables})


def _arc_meet(a, b):
    _check_same(a.variables, b.variables)
    return ArcElement({name: set(a[name]) & set(b[name]) for name in a.variables})


_LATTICES = {
    "concrete": LatticeOps(_concrete_leq, _concrete_join, _concrete_meet),
    "arc": LatticeOps(_arc_leq, _arc_join, _arc_meet),
    "bound": LatticeOps(Box.leq, Box.join, Box.meet),
}


def lattice_ops(kind: str) -> LatticeOps:
    if kind not in _LATTICES:
        raise ValueError(f"unknown lattice '{kind}', expected one of {tuple(_LATTICES)}")
    return _LATTICES[kind]
