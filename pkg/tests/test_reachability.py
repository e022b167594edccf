import itertools

import numpy as np
import pytest

from constants import BUDGET_EXCEEDED, EXHAUSTED, FOUND
from constraints import Var
from engine import GuardedConstraint, SolverConfig
from exceptions import TranslationError
from interpreter import interpret
from language import parse_program
from lattices import Interval
from reachability import build_store, solve_reachability
from ssa import to_ssa_constraints

SQUARES = """
fn squares(x: int in [0, 5]) {
    a: y = x * x;
    b: if (y == 7) { c: skip; } else { d: skip; }
    e: if (y == 16) { g: skip; }
}
"""


def reachable_inputs(program, target):
    ranges = [range(p.lo, p.hi + 1) for p in program.params]
    for values in itertools.product(*ranges):
        inputs = dict(zip(program.param_names, values))
        if interpret(program, inputs).visited(target):
            yield inputs


def test_encoding_of_f(f_program):
    encoding = to_ssa_constraints(f_program, "f")
    assert encoding.inputs == {"i": "i_0"}
    assert encoding.domains == {"i_0": Interval(0, 100000)}
    assert encoding.constraints[0] == Var("j_0").eq(100)
    (w,) = encoding.w_constraints
    assert dict(w.m1) == {"i": "i_0", "j": "j_0"}
    assert dict(w.m3) == {"i": "i_1", "j": "j_1"}
    assert w.program_level
    assert encoding.path_conditions == [Var("j_1").gt(500)]
    assert encoding.state["j"] == "j_1"


def test_encoding_stops_at_target(f_program):
    encoding = to_ssa_constraints(f_program, "a")
    assert encoding.items == []
    assert encoding.state == {"i": "i_0"}


def test_encoding_of_else_branch(branches_program):
    encoding = to_ssa_constraints(branches_program, "k")
    assert [type(i) for i in encoding.items[:2]] == [GuardedConstraint, GuardedConstraint]
    (condition,) = encoding.path_conditions
    assert condition.relation == "!="
    assert condition in encoding.items


def test_encoding_rejects_bad_targets(f_program):
    with pytest.raises(TranslationError):
        to_ssa_constraints(f_program, "c")
    with pytest.raises(TranslationError):
        to_ssa_constraints(f_program, "nowhere")


def test_propagation_alone_bounds_f(f_program):
    store, encoding = build_store(f_program, "f")
    assert not store.is_failed()
    assert store.domain(encoding.inputs["i"]).lo >= 401
    assert store.stats.join_invocations >= 1
    assert store.stats.unrollings >= 400


def test_solve_f(f_program):
    answer = solve_reachability(f_program, "f")
    assert answer.status == FOUND
    assert answer.witness == {"i": 401}
    assert answer.stats.backtracks == 0
    assert interpret(f_program, answer.witness).visited("f")


def test_below_is_refuted_without_search(below_program):
    answer = solve_reachability(below_program, "g")
    assert answer.status == EXHAUSTED
    assert answer.witness is None
    assert answer.stats.nodes == 0


def test_counter(counter_program):
    answer = solve_reachability(counter_program, "c")
    assert answer.status == FOUND
    assert answer.witness == {"x": 0}


def test_nested_loops(nested_program):
    answer = solve_reachability(nested_program, "u")
    assert answer.status == FOUND
    assert answer.witness == {"n": 5}


@pytest.mark.parametrize("target, witness", [("h", {"x": -2, "y": 5}), ("k", {"x": -10, "y": -10})])
def test_branches(branches_program, target, witness):
    answer = solve_reachability(branches_program, target)
    assert answer.status == FOUND
    assert answer.witness == witness


@pytest.mark.parametrize("consistency", ["bound", "domain", "poly"])
def test_branches_at_every_level(branches_program, consistency):
    answer = solve_reachability(branches_program, "h", SolverConfig(consistency=consistency))
    assert answer.status == FOUND
    assert answer.witness in ({"x": -2, "y": 5}, {"x": 5, "y": -2})


@pytest.mark.parametrize("seed", range(3))
def test_queue_order_does_not_change_the_answer(branches_program, seed):
    answer = solve_reachability(branches_program, "h", rng=np.random.default_rng(seed))
    assert answer.witness == {"x": -2, "y": 5}


@pytest.mark.parametrize("target", ["b", "c", "d", "e", "h", "k"])
def test_branches_agree_with_brute_force(branches_program, target):
    answer = solve_reachability(branches_program, target)
    expected = list(reachable_inputs(branches_program, target))
    assert (answer.status == FOUND) == bool(expected)
    assert answer.witness in expected


@pytest.mark.parametrize("target, status", [("c", EXHAUSTED), ("d", FOUND), ("g", FOUND)])
def test_squares_agree_with_brute_force(target, status):
    program = parse_program(SQUARES)
    answer = solve_reachability(program, target)
    assert answer.status == status
    expected = list(reachable_inputs(program, target))
    if status == FOUND:
        assert answer.witness in expected
    else:
        assert expected == []


def test_unroll_cutoff_is_reported(f_program):
    answer = solve_reachability(f_program, "f", SolverConfig(max_unroll=50))
    assert answer.status == BUDGET_EXCEEDED
    assert answer.stats.unroll_cutoffs > 0


def test_answer_as_dict(f_program):
    answer = solve_reachability(f_program, "f")
    plain = answer.as_dict()
    assert set(plain) == {"status", "witness", "stats"}
    assert plain["stats"]["backtracks"] == 0
    full = answer.as_dict(with_invariants=True)
    root = [inv for inv in full["invariants"] if inv["depth"] == 0]
    assert root[0]["loop"] == "b"
    assert root[0]["in"] == {"i": "i_0", "j": "j_0"}
    assert "i_1" in root[0]["Q"]
