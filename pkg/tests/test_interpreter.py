import pytest

from exceptions import InputError
from interpreter import StepBudgetExceeded, execute_block, interpret
from language import parse_program


@pytest.mark.parametrize("i, reached", [(401, True), (400, False), (0, False), (1000, True)])
def test_f_reaches_its_last_label(f_program, i, reached):
    result = interpret(f_program, {"i": i})
    assert result.visited("f") is reached
    assert result.final_state["j"] == 100 + i
    assert result.final_state["i"] == 0
    assert not result.budget_exceeded


def test_loop_labels_are_recorded_per_entry(counter_program):
    result = interpret(counter_program, {"x": 0})
    assert result.reached == ["a", "b", "b", "c"]
    assert interpret(counter_program, {"x": 3}).reached == ["a", "c"]


def test_branches(branches_program):
    assert interpret(branches_program, {"x": -2, "y": 5}).visited("h")
    assert interpret(branches_program, {"x": 5, "y": -2}).visited("h")
    assert interpret(branches_program, {"x": 1, "y": 2}).visited("d")
    assert interpret(branches_program, {"x": 1, "y": 2}).visited("k")


def test_nested_sum(nested_program):
    result = interpret(nested_program, {"n": 5})
    assert result.final_state["s"] == 10
    assert result.visited("u")
    assert interpret(nested_program, {"n": 4}).visited("v")


def test_input_validation(f_program):
    with pytest.raises(InputError):
        interpret(f_program, {})
    with pytest.raises(InputError):
        interpret(f_program, {"i": -1})


def test_step_budget():
    program = parse_program("fn loop(x: int in [0, 1]) { a: while (x >= 0) { x = x + 1; } b: skip; }")
    result = interpret(program, {"x": 0}, step_budget=100)
    assert result.budget_exceeded
    assert not result.visited("b")
    with pytest.raises(StepBudgetExceeded):
        execute_block(program.body, {"x": 0}, step_budget=10)
