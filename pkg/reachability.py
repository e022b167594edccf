import logging
from dataclasses import dataclass, field

from constants import *
from engine import SolverConfig, SolverStats, Store, label_search
from interpreter import interpret
from loops import WConstraint
from polyhedra import poly_dump
from ssa import to_ssa_constraints

logger = logging.getLogger(__name__)


@dataclass
class ReachabilityAnswer:
    status: str
    witness: dict = None
    stats: SolverStats = field(default_factory=SolverStats)
    invariants: list = field(default_factory=list)

    def as_dict(self, with_invariants=False) -> dict:
        stats = self.stats.as_dict()
        result = {
            "status": self.status,
            "witness": self.witness,
            "stats": stats,
        }
        if with_invariants:
            result["invariants"] = self.invariants
        return result


def build_store(program, target, config=None, rng=None):
    """
    Post the encoding of program up to target and propagate once.

    Returns
    -------
    (Store, SsaEncoding)
    """
    config = config or SolverConfig()
    encoding = to_ssa_constraints(program, target)
    store = Store(config, rng)
    for name, interval in encoding.domains.items():
        store.declare(name, interval)
    store.post_all(encoding.items)
    store.propagate()
    logger.debug(f"after propagation: {store.sub_box(encoding.inputs.values())}")
    return store, encoding


def loop_invariants(store) -> list:
    """P and Q of every loop that has joined, in posting order."""
    return [
        {
            "loop": w.label,
            "depth": w.depth,
            "in": dict(w.m1),
            "out": dict(w.m3),
            "P": poly_dump(w.p),
            "Q": poly_dump(w.q),
        }
        for w in store.propagators
        if isinstance(w, WConstraint) and w.q is not None
    ]


def solve_reachability(program, target, config=None, rng=None) -> ReachabilityAnswer:
    """
    Search for inputs whose execution visits the statement labelled target.

    A candidate found by labelling is replayed by the interpreter and rejected
    unless the run visits target, so FOUND answers are always confirmed.

    Parameters
    ----------
    program : Program
    target : str
    config : SolverConfig, optional
    rng : numpy.random.Generator, optional
        Tie-breaking of the propagation queue.

    Returns
    -------
    ReachabilityAnswer
    """
    store, encoding = build_store(program, target, config, rng)
    params = program.param_names

    def inputs_of(valuation):
        return {name: valuation[encoding.inputs[name]] for name in params}

    def accept(valuation):
        return interpret(program, inputs_of(valuation)).visited(target)

    result = label_search(store, [encoding.inputs[name] for name in params], accept=accept)
    status = result.status
    if status == EXHAUSTED and store.stats.unroll_cutoffs:
        logger.info(f"{store.stats.unroll_cutoffs} branches cut at the unrolling limit")
        status = BUDGET_EXCEEDED
    witness = inputs_of(result.valuation) if status == FOUND else None
    logger.info(f"{program.name}, target {target}: {status}" + (f" with {witness}" if witness else ""))
    return ReachabilityAnswer(status, witness, store.stats, loop_invariants(store))
