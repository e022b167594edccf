from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging

import numpy as np

from linear import EQ, LinearExpression
from utils import PROFILER

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

# stats object whose simplex_calls counts the runs of the current context
_CALL_SINK = ContextVar("simplex_call_sink", default=None)


@contextmanager
def counting_calls(stats):
    """Count every solve_lp run inside the block into stats.simplex_calls."""
    token = _CALL_SINK.set(stats)
    try:
        yield stats
    finally:
        _CALL_SINK.reset(token)


class SimplexStatus(Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SimplexResult:
    status: SimplexStatus
    value: Fraction = None
    point: dict = None

    @property
    def optimal(self) -> bool:
        return self.status is SimplexStatus.OPTIMAL


class _Tableau:
    """
    Dense tableau over numpy object arrays of Fractions. The last row is the
    objective row of a maximization (z - c.x = 0), the last column the right-hand side.
    """

    def __init__(self, table, basis):
        self.table = table
        self.basis = basis

    @property
    def rows(self):
        return self.table.shape[0] - 1

    def pivot(self, r, c):
        t = self.table
        t[r] = t[r] / t[r, c]
        for i in range(t.shape[0]):
            if i != r and t[i, c] != 0:
                t[i] = t[i] - t[i, c] * t[r]
        self.basis[r] = c

    def iterate(self, columns):
        """
        Bland's rule pivoting over the given candidate columns.

        Returns
        -------
        bool
            False when the objective is unbounded.
        """
        t = self.table
        while True:
            entering = next((j for j in columns if t[-1, j] < 0), None)
            if entering is None:
                return True
            best = None
            for i in range(self.rows):
                a = t[i, entering]
                if a > 0:
                    ratio = t[i, -1] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and self.basis[i] < self.basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return False
            self.pivot(best[1], entering)


def _standard_form(constraints, names):
    """
    Rows of A x' = b with b >= 0, where x' holds x+ / x- pairs for each free
    variable followed by one surplus column per inequality.
    """
    inequalities = [c for c in constraints if c.relation != EQ]
    n_struct = 2 * len(names)
    n_cols = n_struct + len(inequalities)
    index = {name: k for k, name in enumerate(names)}
    rows, rhs = [], []
    surplus = n_struct
    for c in constraints:
        row = [ZERO] * n_cols
        for name, a in c.expression.items():
            row[2 * index[name]] += a
            row[2 * index[name] + 1] -= a
        b = -c.expression.constant
        if c.relation != EQ:
            row[surplus] = -ONE
            surplus += 1
        if b < 0:
            row = [-a for a in row]
            b = -b
        rows.append(row)
        rhs.append(b)
    return rows, rhs, n_cols


@PROFILER.profile("simplex")
def solve_lp(constraints, objective: LinearExpression, sense="max") -> SimplexResult:
    """
    Optimize a linear objective over a conjunction of LinearConstraints with
    free rational variables. Two-phase primal simplex, exact Fractions, Bland's rule.

    Parameters
    ----------
    constraints : iterable of LinearConstraint
    objective : LinearExpression
    sense : str
        "max" or "min"

    Returns
    -------
    SimplexResult
    """
    if sense not in ("max", "min"):
        raise ValueError(f"unknown optimization sense '{sense}'")
    sink = _CALL_SINK.get()
    if sink is not None:
        sink.simplex_calls += 1
    constraints = [c for c in constraints if not c.is_tautology()]
    if any(c.is_contradiction() for c in constraints):
        return SimplexResult(SimplexStatus.INFEASIBLE)
    names = sorted(set(objective.variables).union(*(c.variables for c in constraints)))
    rows, rhs, n_cols = _standard_form(constraints, names)
    m = len(rows)
    n_total = n_cols + m

    # phase 1: maximize -sum(artificials)
    table = np.full((m + 1, n_total + 1), ZERO, dtype=object)
    for i in range(m):
        table[i, :n_cols] = rows[i]
        table[i, n_cols + i] = ONE
        table[i, -1] = rhs[i]
    table[-1, n_cols:n_total] = ONE
    for i in range(m):
        table[-1] = table[-1] - table[i]
    tableau = _Tableau(table, [n_cols + i for i in range(m)])
    tableau.iterate(range(n_total))
    if tableau.table[-1, -1] < 0:
        return SimplexResult(SimplexStatus.INFEASIBLE)

    # drive zero-level artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if tableau.basis[i] >= n_cols:
            column = next((j for j in range(n_cols) if tableau.table[i, j] != 0), None)
            if column is None:
                continue
            tableau.pivot(i, column)
        keep.append(i)
    table = np.concatenate(
        [tableau.table[keep][:, :n_cols], tableau.table[keep][:, -1:]], axis=1
    ) if keep else np.full((0, n_cols + 1), ZERO, dtype=object)
    basis = [tableau.basis[i] for i in keep]

    # phase 2
    sign = ONE if sense == "max" else -ONE
    cost = [ZERO] * n_cols
    for k, name in enumerate(names):
        a = objective.coefficient(name) * sign
        cost[2 * k] = a
        cost[2 * k + 1] = -a
    objective_row = np.array([-a for a in cost] + [ZERO], dtype=object)
    for i, j in enumerate(basis):
        if objective_row[j] != 0:
            objective_row = objective_row - objective_row[j] * table[i]
    tableau = _Tableau(np.vstack([table, objective_row]), basis)
    if not tableau.iterate(range(n_cols)):
        return SimplexResult(SimplexStatus.UNBOUNDED)

    values = [ZERO] * n_cols
    for i, j in enumerate(tableau.basis):
        values[j] = tableau.table[i, -1]
    point = {name: values[2 * k] - values[2 * k + 1] for k, name in enumerate(names)}
    value = objective.evaluate(point)
    return SimplexResult(SimplexStatus.OPTIMAL, value, point)
