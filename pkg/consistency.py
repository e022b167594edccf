import logging
from typing import NamedTuple

import relaxations  # noqa: F401  registers the relaxation strategies
from constants import MAX_ROUNDS
from constraints import bound_fixpoint, constraint_variables
from lattices import Box
from polyhedra import gamma_box
from relaxations import relax_system
from utils import PROFILER

logger = logging.getLogger(__name__)


class FixpointResult(NamedTuple):
    box: Box
    stable: bool
    rounds: int


@PROFILER.profile("poly_filter")
def poly_filter(cs, b: Box, strategy="envelope") -> Box:
    """
    Polyhedral filtering: relax cs at the bounds of b, then tighten every
    variable of cs to [ceil(min), floor(max)] over the relaxation.

    Parameters
    ----------
    cs : iterable of Constraint
    b : Box
        Must hold every variable of cs.
    strategy : str or Relaxation

    Returns
    -------
    Box
        Over the variables of b; the empty box signals inconsistency.
    """
    if b.is_empty():
        return b
    cs = list(cs)
    names = constraint_variables(cs)
    if not names:
        return b
    sub = b.restrict(names)
    rounded = gamma_box(relax_system(cs, sub, strategy), names)
    if rounded.is_empty():
        return Box.empty(b.variables)
    result = b.extend(sub.meet(rounded))
    logger.debug(f"poly_filter: {sub} -> {result.restrict(names)}")
    return result


def mixed_fixpoint(cs, b: Box, strategy="envelope", max_rounds=MAX_ROUNDS) -> FixpointResult:
    """Alternate bound-consistency sweeps and poly_filter until the box is stable."""
    cs = list(cs)
    current = b
    for rounds in range(1, max_rounds + 1):
        previous = current
        current = bound_fixpoint(cs, current)
        if not current.is_empty():
            current = poly_filter(cs, current, strategy)
        if current.is_empty() or current == previous:
            logger.debug(f"mixed fixpoint reached after {rounds} rounds: {current}")
            return FixpointResult(current, True, rounds)
    logger.debug(f"mixed fixpoint not stable after {max_rounds} rounds")
    return FixpointResult(current, False, max_rounds)
