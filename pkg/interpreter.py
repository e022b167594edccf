import logging
from dataclasses import dataclass, field

from constants import STEP_BUDGET
from exceptions import InputError
from language import Assign, If, Skip, While

logger = logging.getLogger(__name__)


@dataclass
class ExecutionResult:
    reached: list = field(default_factory=list)
    final_state: dict = field(default_factory=dict)
    budget_exceeded: bool = False

    def visited(self, label) -> bool:
        return label in self.reached


class StepBudgetExceeded(Exception):
    pass


class Machine:
    """Big-step execution of statement lists over an integer environment."""

    def __init__(self, step_budget=STEP_BUDGET):
        self.steps = step_budget
        self.reached = []

    def _tick(self):
        self.steps -= 1
        if self.steps < 0:
            raise StepBudgetExceeded()

    def run(self, stmts, env):
        for stmt in stmts:
            self._tick()
            if stmt.label is not None:
                self.reached.append(stmt.label)
            if isinstance(stmt, Assign):
                env[stmt.target] = stmt.expr.evaluate(env)
            elif isinstance(stmt, If):
                self.run(stmt.then if stmt.cond.evaluate(env) else stmt.orelse, env)
            elif isinstance(stmt, While):
                while stmt.cond.evaluate(env):
                    self._tick()
                    self.run(stmt.body, env)
            else:
                assert isinstance(stmt, Skip)
        return env


def execute_block(stmts, env, step_budget=STEP_BUDGET) -> dict:
    """Run stmts on a copy of env; raises StepBudgetExceeded past the budget."""
    return Machine(step_budget).run(stmts, dict(env))


def interpret(program, inputs, step_budget=STEP_BUDGET) -> ExecutionResult:
    """
    Concrete execution of a program.

    Parameters
    ----------
    program : Program
    inputs : dict of str to int
        One value per parameter, inside its declared range.
    step_budget : int

    Returns
    -------
    ExecutionResult
        Labels in visiting order (a loop label once per entry), the final
        environment and whether the budget cut the run short.
    """
    env = {}
    for param in program.params:
        if param.name not in inputs:
            raise InputError(f"missing input for parameter '{param.name}'")
        value = inputs[param.name]
        if not param.lo <= value <= param.hi:
            raise InputError(f"input {param.name}={value} outside [{param.lo}, {param.hi}]")
        env[param.name] = int(value)
    machine = Machine(step_budget)
    try:
        machine.run(program.body, env)
    except StepBudgetExceeded:
        logger.warning(f"step budget of {step_budget} exceeded on inputs {inputs}")
        return ExecutionResult(machine.reached, env, True)
    return ExecutionResult(machine.reached, env, False)
