import pytest

from consistency import mixed_fixpoint, poly_filter
from constraints import Var, bound_fixpoint
from lattices import Box, Interval

from conftest import random_system, solutions

x, y, z = Var("x"), Var("y"), Var("z")


def test_poly_filter_trace(nonlinear_system):
    cs, box = nonlinear_system
    first = poly_filter(cs, box)
    assert first["x"] == Interval(-2, 9)
    assert first["y"] == Interval(-2, 9)
    assert first["z"] == Interval(3, 10)
    second = poly_filter(cs, first)
    assert second["x"] == Interval(0, 8)
    assert second["y"] == Interval(0, 8)
    bounded = bound_fixpoint(cs, second)
    assert bounded["x"] == Interval(1, 8)
    assert bounded["y"] == Interval(1, 8)


def test_mixed_fixpoint_reaches_the_solution(nonlinear_system):
    cs, box = nonlinear_system
    result = mixed_fixpoint(cs, box)
    assert result.stable
    assert result.rounds <= 10
    assert result.box == Box({"x": (2, 2), "y": (2, 2), "z": (4, 4)})


def test_mixed_fixpoint_round_cap(nonlinear_system):
    cs, box = nonlinear_system
    result = mixed_fixpoint(cs, box, max_rounds=1)
    assert not result.stable
    assert result.rounds == 1
    assert result.box["x"] == Interval(-2, 9)


def test_drop_strategy_does_not_prune(nonlinear_system):
    cs, box = nonlinear_system
    result = mixed_fixpoint(cs, box, strategy="drop")
    assert result.stable
    assert result.box == box


def test_inconsistent_system():
    box = Box({"x": (0, 10), "y": (0, 10)})
    result = mixed_fixpoint([x.eq(y + 1), y.eq(x + 1)], box)
    assert result.stable
    assert result.box.is_empty()
    assert poly_filter([x.eq(y + 1), y.eq(x + 1)], box).is_empty()


def test_poly_filter_keeps_unrelated_components():
    box = Box({"x": (0, 10), "w": (-3, 3)})
    result = poly_filter([(2 * x).eq(7 - x)], box)
    assert result.is_empty()
    result = poly_filter([(3 * x).le(7)], box)
    assert result == Box({"x": (0, 2), "w": (-3, 3)})


@pytest.mark.parametrize("strategy", ["envelope", "corner"])
@pytest.mark.parametrize("seed", range(40))
def test_mixed_fixpoint_is_sound_and_stronger_than_bounds(seed, strategy):
    cs, box = random_system(seed)
    result = mixed_fixpoint(cs, box, strategy, max_rounds=50)
    for valuation in solutions(cs, box):
        assert all(result.box[n].contains(valuation[n]) for n in valuation), f"{valuation} lost from {result.box}"
    assert result.box.leq(bound_fixpoint(cs, box))


@pytest.mark.parametrize("seed", range(40))
def test_mixed_fixpoint_is_idempotent(seed):
    cs, box = random_system(seed)
    result = mixed_fixpoint(cs, box, max_rounds=50)
    assert result.stable
    again = mixed_fixpoint(cs, result.box, max_rounds=50)
    assert again.box == result.box
    assert again.rounds == 1
