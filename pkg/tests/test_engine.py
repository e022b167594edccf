import numpy as np
import pytest

from consistency import poly_filter
from constants import BUDGET_EXCEEDED, EXHAUSTED, FOUND, MAX_ROUNDS
from constraints import Var
from engine import (
    BoundPropagator,
    DomainPropagator,
    EntailmentStatus,
    GuardedConstraint,
    PolyPropagator,
    SolverConfig,
    SolverStats,
    Store,
    entailment_status,
    label_search,
)
from lattices import Box, Interval
from simplex import counting_calls

from conftest import random_system, solutions


x, y, z = Var("x"), Var("y"), Var("z")


def make_store(bounds, **config):
    s = Store(SolverConfig(**config))
    for name, interval in bounds.items():
        s.declare(name, interval)
    return s


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(consistency="arc")
    with pytest.raises(ValueError):
        SolverConfig(join="octagon")


def test_post_and_propagate():
    s = make_store({"x": (0, 10), "y": (0, 10)})
    s.post(x.eq(y + 3)).post(y.ge(5)).propagate()
    assert s.domain("x") == Interval(8, 10)
    assert s.domain("y") == Interval(5, 7)
    assert not s.is_failed()


def test_contradiction_fails_the_store():
    s = make_store({})
    s.post(x.ge(1)).post(x.le(0)).propagate()
    assert s.is_failed()
    assert s.box.is_empty()


def test_post_declares_unknown_variables():
    s = make_store({"x": (0, 3)})
    s.post(x.le(z)).propagate()
    assert "z" in s
    assert s.domain("z").lo == 0


def test_trail_restores_everything():
    s = make_store({"x": (0, 10), "y": (0, 10)})
    s.post(x.le(y)).propagate()
    mark = s.mark()
    before = s.box
    s.post(y.le(4)).post(x.ge(4)).propagate()
    assert s.box == Box({"x": (4, 4), "y": (4, 4)})
    s.post(x.ge(5)).propagate()
    assert s.is_failed()
    s.undo(mark)
    assert not s.is_failed()
    assert s.box == before
    assert len(s.constraints) == 1
    assert len(s.propagators) == 1


def test_entailment_status():
    s = make_store({"x": (0, 5), "y": (6, 9)})
    assert entailment_status(x.ge(0), s) is EntailmentStatus.ENTAILED
    assert entailment_status(x.lt(y), s) is EntailmentStatus.ENTAILED
    assert entailment_status(x.gt(5), s) is EntailmentStatus.DISENTAILED
    assert entailment_status(x.ge(3), s) is EntailmentStatus.UNKNOWN
    assert entailment_status([x.ge(0), y.le(9)], s) is EntailmentStatus.ENTAILED
    assert entailment_status([x.ge(3), x.le(2)], s) is EntailmentStatus.DISENTAILED


def test_entailment_leaves_the_store_untouched():
    s = make_store({"x": (0, 5)})
    mark = s.mark()
    assert entailment_status(x.le(z), s) is EntailmentStatus.UNKNOWN
    assert "z" not in s
    assert s.mark() == mark


def test_failed_store_entails_everything():
    s = make_store({"x": (0, 5)})
    s.post(x.gt(7)).propagate()
    assert entailment_status(x.eq(100), s) is EntailmentStatus.ENTAILED


def test_consistency_levels_choose_propagators():
    c = z.eq(x * y)
    bound = make_store({"x": (0, 3), "y": (0, 3), "z": (0, 9)}).post(c)
    assert [type(p) for p in bound.propagators] == [BoundPropagator]
    domain = make_store({"x": (0, 3), "y": (0, 3), "z": (0, 9)}, consistency="domain").post(c)
    assert [type(p) for p in domain.propagators] == [BoundPropagator, DomainPropagator]
    poly = make_store({"x": (0, 3), "y": (0, 3), "z": (0, 9)}, consistency="poly").post(x.le(y)).post(c)
    assert sum(isinstance(p, PolyPropagator) for p in poly.propagators) == 1


def test_poly_level_solves_nonlinear_system(nonlinear_system):
    cs, box = nonlinear_system
    s = Store(SolverConfig(consistency="poly"))
    for name, interval in box.items():
        s.declare(name, interval)
    s.post_all(cs).propagate()
    assert s.box == Box({"x": (2, 2), "y": (2, 2), "z": (4, 4)})


def test_bound_level_keeps_nonlinear_box(nonlinear_system):
    cs, box = nonlinear_system
    s = Store()
    for name, interval in box.items():
        s.declare(name, interval)
    s.post_all(cs).propagate()
    assert s.box == box


@pytest.mark.parametrize("seed", range(5))
def test_schedule_order_does_not_change_the_fixpoint(seed, nonlinear_system):
    cs, box = nonlinear_system
    for schedule in range(10):
        s = Store(SolverConfig(consistency="poly"), rng=np.random.default_rng([seed, schedule]))
        for name, interval in box.items():
            s.declare(name, interval)
        s.post_all(cs + [x.le(y)]).propagate()
        assert s.box == Box({"x": (2, 2), "y": (2, 2), "z": (4, 4)})


@pytest.mark.parametrize("consistency", ["bound", "domain"])
@pytest.mark.parametrize("seed", range(30))
def test_random_schedules_reach_the_same_fixpoint(seed, consistency):
    cs, box = random_system(seed, size=4)

    def final_box(rng):
        s = make_store(box, consistency=consistency)
        if rng is not None:
            s.rng = rng
        return s.post_all(cs).propagate().box

    expected = final_box(None)
    for schedule in range(10):
        assert final_box(np.random.default_rng([seed, schedule])) == expected
    for valuation in solutions(cs, box):
        assert all(expected[n].contains(valuation[n]) for n in valuation)


def test_guard_fires_on_entailment_and_undoes():
    s = make_store({"x": (0, 5), "y": (0, 5)})
    g = GuardedConstraint(x.ge(3), [y.eq(1)])
    s.post(g).propagate()
    assert g.status == GuardedConstraint.PENDING
    mark = s.mark()
    s.narrow("x", Interval(4, 5))
    s.propagate()
    assert g.status == GuardedConstraint.FIRED
    assert s.domain("y") == Interval(1, 1)
    s.undo(mark)
    assert g.status == GuardedConstraint.PENDING
    assert g.active
    assert s.domain("y") == Interval(0, 5)


def test_guard_discarded_on_disentailment():
    s = make_store({"x": (0, 5), "y": (0, 5)})
    g = GuardedConstraint(x.ge(3), [y.eq(1)])
    s.post(g)
    s.narrow("x", Interval(0, 2))
    s.propagate()
    assert g.status == GuardedConstraint.DISCARDED
    assert not g.active
    assert s.domain("y") == Interval(0, 5)


def test_label_search_finds_solution():
    s = make_store({"x": (0, 3), "y": (0, 3)})
    s.post_all([(x + y).eq(5), (x * y).eq(6)])
    result = label_search(s, ["x", "y"])
    assert result.status == FOUND
    assert result.valuation == {"x": 2, "y": 3}
    assert result.stats.backtracks == 0


def test_label_search_exhausts():
    s = make_store({"x": (0, 3), "y": (0, 3)})
    s.post_all([(x + y).eq(3), (x * y).eq(3)])
    assert label_search(s, ["x", "y"]).status == EXHAUSTED


def test_label_search_accept_callback():
    s = make_store({"x": (0, 3)})
    seen = []

    def accept(valuation):
        seen.append(valuation["x"])
        return valuation["x"] == 2

    result = label_search(s, ["x"], accept=accept)
    assert result.status == FOUND
    assert result.valuation == {"x": 2}
    assert seen == [0, 1, 2]
    assert result.stats.backtracks == 2


def test_label_search_node_limit():
    s = make_store({"x": (0, 100)})
    result = label_search(s, ["x"], limit=10, accept=lambda v: False)
    assert result.status == BUDGET_EXCEEDED
    assert result.valuation is None


def test_label_search_rejects_infinite_domain():
    s = make_store({"x": Interval(0, float("inf"))})
    with pytest.raises(ValueError):
        label_search(s, ["x"])


def test_stats_as_dict():
    s = make_store({"x": (0, 3)})
    s.post(x.ge(1)).propagate()
    stats = s.stats.as_dict()
    assert stats["propagations"] >= 1
    assert set(stats) >= {"backtracks", "unrollings", "join_invocations", "w_awakenings"}


@pytest.mark.parametrize("seed", range(40))
def test_guard_decisions_agree_with_enumeration(seed):
    cs, box = random_system(seed, size=1)
    guard = cs[0]
    s = make_store(box)
    g = GuardedConstraint(guard, [Var("w").eq(1)])
    s.post(g).propagate()
    holding = solutions([guard], box)
    if g.status == GuardedConstraint.FIRED:
        assert len(holding) == box.size()
        assert s.domain("w") == Interval(1, 1)
    elif g.status == GuardedConstraint.DISCARDED:
        assert not holding
    else:
        assert 0 < len(holding) < box.size()
    assert s.sub_box(box.variables) == box


def test_poly_propagator_honours_max_rounds(nonlinear_system):
    cs, box = nonlinear_system
    for max_rounds, expected in ((1, Interval(-2, 9)), (MAX_ROUNDS, Interval(2, 2))):
        s = Store(SolverConfig(consistency="poly", max_rounds=max_rounds))
        for name, interval in box.items():
            s.declare(name, interval)
        s.post_all(cs)
        poly = next(p for p in s.propagators if isinstance(p, PolyPropagator))
        assert poly.propagate(s)
        assert s.domain("x") == expected


def test_simplex_calls_are_counted_per_store(nonlinear_system):
    cs, box = nonlinear_system
    s = make_store({"x": (0, 10), "y": (0, 10)})
    s.post(x.le(y))
    poly_filter(cs, box)
    s.propagate()
    assert s.stats.simplex_calls == 0

    poly = Store(SolverConfig(consistency="poly"))
    for name, interval in box.items():
        poly.declare(name, interval)
    poly.post_all(cs)
    outer = SolverStats()
    with counting_calls(outer):
        poly_filter(cs, box)
        before = outer.simplex_calls
        poly.propagate()
    assert before > 0
    assert outer.simplex_calls == before
    assert poly.stats.simplex_calls > 0
