import math

import pytest

from exceptions import ArityMismatchError, OracleBudgetError
from lattices import (
    ArcElement,
    Box,
    Interval,
    TupleSet,
    alpha_arc,
    alpha_bound,
    alpha_inter,
    gamma_arc,
    gamma_bound,
    gamma_inter,
    lattice_ops,
)


def test_interval_basics():
    assert Interval(3, 1).is_empty()
    assert Interval(3, 1) == Interval.empty()
    assert Interval(0, 4).size() == 5
    assert Interval(0, math.inf).size() == math.inf
    assert Interval(2, 5).meet(Interval(4, 9)) == Interval(4, 5)
    assert Interval(2, 3).join(Interval(7, 8)) == Interval(2, 8)
    assert Interval.empty().join(Interval(1, 1)) == Interval.point(1)
    assert Interval(1, 2).leq(Interval(0, 2))
    assert str(Interval()) == "[-inf, +inf]"
    assert list(Interval(-1, 1)) == [-1, 0, 1]


def test_infinite_interval_is_not_enumerable():
    with pytest.raises(OracleBudgetError):
        list(Interval(0, math.inf))


def test_singleton_value():
    assert Interval.point(7).value == 7
    with pytest.raises(ValueError):
        Interval(0, 1).value


def test_box_empty_is_canonical():
    b = Box({"x": Interval(0, 3), "y": Interval(2, 1)})
    assert b.is_empty()
    assert b["x"].is_empty()
    assert b == Box.empty(["x", "y"])
    assert b.size() == 0


def test_box_lattice_operations():
    a = Box({"x": (0, 3), "y": (0, 0)})
    b = Box({"x": (2, 5), "y": (1, 1)})
    assert a.meet(b).is_empty()
    assert a.join(b) == Box({"x": (0, 5), "y": (0, 1)})
    assert a.leq(a.join(b))
    assert Box.empty(["x", "y"]).leq(a)
    assert a.with_interval("y", (0, 2))["y"] == Interval(0, 2)
    assert a.extend(Box({"y": (5, 5), "z": (1, 2)})) == Box({"x": (0, 3), "y": (5, 5), "z": (1, 2)})
    assert sorted(a.points()) == [(0, 0), (1, 0), (2, 0), (3, 0)]


def test_box_mismatch():
    with pytest.raises(ArityMismatchError):
        Box({"x": (0, 1)}).join(Box({"y": (0, 1)}))


def test_box_hash_ignores_insertion_order():
    a = Box({"x": (0, 1), "y": (2, 3)})
    b = Box({"y": (2, 3), "x": (0, 1)})
    assert a == b
    assert hash(a) == hash(b)


def test_abstractions_of_tuple_set():
    s = TupleSet(("x", "y"), [(0, 1), (2, 5)])
    arc = alpha_arc(s)
    assert arc == ArcElement({"x": [0, 2], "y": [1, 5]})
    assert gamma_arc(arc) == TupleSet(("x", "y"), [(0, 1), (0, 5), (2, 1), (2, 5)])
    assert alpha_inter(arc) == Box({"x": (0, 2), "y": (1, 5)})
    assert alpha_bound(s) == Box({"x": (0, 2), "y": (1, 5)})
    assert gamma_inter(Box({"x": (0, 2)})) == ArcElement({"x": [0, 1, 2]})
    assert len(gamma_bound(alpha_bound(s))) == 3 * 5


def test_galois_extensivity():
    s = TupleSet(("a", "b"), [(1, 1), (3, -2), (0, 4)])
    assert lattice_ops("concrete").leq(s, gamma_arc(alpha_arc(s)))
    assert lattice_ops("concrete").leq(s, gamma_bound(alpha_bound(s)))
    b = Box({"a": (0, 2), "b": (1, 1)})
    assert alpha_bound(gamma_bound(b)) == b


def test_empty_tuple_set_abstracts_to_empty():
    s = TupleSet(("x",), [])
    assert alpha_arc(s).is_empty()
    assert alpha_bound(s).is_empty()


def test_tuple_set_arity_and_cap():
    with pytest.raises(ArityMismatchError):
        TupleSet(("x", "y"), [(1,)])
    with pytest.raises(OracleBudgetError):
        TupleSet.from_box(Box({"x": (0, 99), "y": (0, 99)}), cap=1000)


def test_tuple_set_projection():
    s = TupleSet(("x", "y"), [(0, 1), (0, 2), (3, 1)])
    assert s.project(["x"]) == TupleSet(("x",), [(0,), (3,)])
    assert list(s.valuations())[0] == {"x": 0, "y": 1}


@pytest.mark.parametrize("kind", ["concrete", "arc", "bound"])
def test_lattice_ops_join_is_upper_bound(kind):
    s = TupleSet(("x", "y"), [(0, 0), (1, 2)])
    t = TupleSet(("x", "y"), [(2, 2)])
    lift = {"concrete": lambda u: u, "arc": alpha_arc, "bound": alpha_bound}[kind]
    ops = lattice_ops(kind)
    a, b = lift(s), lift(t)
    joined = ops.join(a, b)
    assert ops.leq(a, joined)
    assert ops.leq(b, joined)
    assert ops.leq(ops.meet(a, b), a)


def test_unknown_lattice():
    with pytest.raises(ValueError):
        lattice_ops("octagon")
