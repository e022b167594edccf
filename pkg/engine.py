import logging
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from constants import *
from consistency import mixed_fixpoint
from constraints import Constraint, bound_filter, bound_fixpoint, constraint_variables, domain_filter
from lattices import Box, Interval, alpha_inter, gamma_inter
from simplex import counting_calls

"""
engine.py is the constraint store and its search.

Classes:
    SolverConfig      - frozen solver options
    SolverStats       - counters reported with every answer
    Propagator        - base class of everything the store schedules
    BoundPropagator   - bound_filter of one constraint
    DomainPropagator  - domain filtering on small sub-boxes
    PolyPropagator    - mixed_fixpoint over the components holding a nonlinear constraint
    GuardedConstraint - guard -> items, posted on entailment, discarded on disentailment
    Store             - domains, trail, priority queue
    SearchResult      - outcome of label_search

Functions:
    entailment_status - entailed / disentailed / unknown at bound level
    label_search      - depth-first labelling interleaved with propagation
"""

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    consistency: str = "bound"
    relaxation: str = "envelope"
    join: str = "template"
    widen_delay: int = WIDEN_DELAY
    max_unroll: int = MAX_UNROLL
    max_rounds: int = MAX_ROUNDS
    search_limit: int = SEARCH_LIMIT
    d_exact: int = D_EXACT
    seed: int = None

    def __post_init__(self):
        if self.consistency not in CONSISTENCY_LEVELS:
            raise ValueError(f"unknown consistency '{self.consistency}', expected one of {CONSISTENCY_LEVELS}")
        if self.join not in JOIN_MODES:
            raise ValueError(f"unknown join mode '{self.join}', expected one of {JOIN_MODES}")


@dataclass
class SolverStats:
    propagations: int = 0
    simplex_calls: int = 0
    w_awakenings: int = 0
    join_invocations: int = 0
    backtracks: int = 0
    unrollings: int = 0
    unroll_cutoffs: int = 0
    nodes: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


class EntailmentStatus(Enum):
    ENTAILED = "entailed"
    DISENTAILED = "disentailed"
    UNKNOWN = "unknown"


class Propagator:
    def __init__(self, variables=(), priority=PRIORITY_INTERVAL):
        """
        Parameters
        ----------
        variables : iterable of str
            Variables whose changes wake the propagator.
        priority : int
            Queue level, lower runs first.
        """
        self.variables = tuple(variables)
        self.priority = priority
        self.active = True

    def attach(self, store):
        """Called once when the propagator enters the store."""
        pass

    def propagate(self, store) -> bool:
        """Narrow the store. Returns False on inconsistency."""
        return True


class BoundPropagator(Propagator):
    def __init__(self, constraint):
        super(BoundPropagator, self).__init__(constraint.variables, PRIORITY_INTERVAL)
        self.constraint = constraint

    def propagate(self, store):
        box = store.sub_box(self.variables)
        return store.update(bound_filter(self.constraint, box))

    def __str__(self):
        return f"bound({self.constraint})"


class DomainPropagator(Propagator):
    """alpha_inter . domain_filter . gamma_inter on sub-boxes of at most DOMAIN_BUDGET points."""

    def __init__(self, constraint):
        super(DomainPropagator, self).__init__(constraint.variables, PRIORITY_DOMAIN)
        self.constraint = constraint

    def propagate(self, store):
        box = store.sub_box(self.variables)
        if box.is_empty():
            return False
        if not box.is_finite() or box.size() > DOMAIN_BUDGET:
            return store.update(bound_filter(self.constraint, box))
        return store.update(alpha_inter(domain_filter(self.constraint, gamma_inter(box))))

    def __str__(self):
        return f"domain({self.constraint})"


def _components(constraints):
    """Connected components of constraints linked by shared variables."""
    parent = {}

    def find(name):
        while parent[name] != name:
            parent[name] = parent[parent[name]]
            name = parent[name]
        return name

    for c in constraints:
        names = c.variables
        for name in names:
            parent.setdefault(name, name)
        for name in names[1:]:
            parent[find(name)] = find(names[0])
    groups = defaultdict(list)
    for c in constraints:
        if c.variables:
            groups[find(c.variables[0])].append(c)
    return list(groups.values())


class PolyPropagator(Propagator):
    """
    One per store at poly level. Re-relaxes every connected component that holds
    a nonlinear constraint, up to POLY_VAR_LIMIT variables.
    """

    def __init__(self, strategy):
        super(PolyPropagator, self).__init__((), PRIORITY_POLY)
        self.strategy = strategy

    def propagate(self, store):
        for component in _components(store.constraints):
            if all(c.is_linear() for c in component):
                continue
            names = constraint_variables(component)
            if len(names) > POLY_VAR_LIMIT:
                logger.debug(f"skipping a {len(names)}-variable component at poly level")
                continue
            box = store.sub_box(names)
            if box.is_empty():
                return False
            result = mixed_fixpoint(component, box, self.strategy, store.config.max_rounds)
            if not store.update(result.box):
                return False
        return True

    def __str__(self):
        return "poly"


def _status_of(constraints, box: Box) -> EntailmentStatus:
    if bound_fixpoint(constraints, box).is_empty():
        return EntailmentStatus.DISENTAILED
    if all(bound_filter(c.negate(), box).is_empty() for c in constraints):
        return EntailmentStatus.ENTAILED
    return EntailmentStatus.UNKNOWN


def entailment_status(c, s) -> EntailmentStatus:
    """
    Bound-level entailment of a constraint (or a list of constraints, read as
    their conjunction) by the store's current domains.
    """
    constraints = [c] if isinstance(c, Constraint) else list(c)
    if s.is_failed():
        return EntailmentStatus.ENTAILED
    box = Box({n: s.domain(n) if n in s else Interval() for n in constraint_variables(constraints)})
    return _status_of(constraints, box)


class GuardedConstraint(Propagator):
    """
    guard -> items. Items are constraints or propagators, posted together once
    the guard is entailed. Fired and discarded are final.
    """

    PENDING = "pending"
    FIRED = "fired"
    DISCARDED = "discarded"

    def __init__(self, guard, items):
        super(GuardedConstraint, self).__init__(guard.variables, PRIORITY_GUARD)
        self.guard = guard
        self.items = list(items)
        self.status = self.PENDING

    def _settle(self, store, status):
        previous = self.status
        self.status = status
        store.record(lambda: setattr(self, "status", previous))
        store.deactivate(self)

    def propagate(self, store):
        decision = entailment_status(self.guard, store)
        if decision is EntailmentStatus.ENTAILED:
            logger.debug(f"guard {self.guard} entailed, posting {len(self.items)} items")
            self._settle(store, self.FIRED)
            store.post_all(self.items)
        elif decision is EntailmentStatus.DISENTAILED:
            logger.debug(f"guard {self.guard} disentailed")
            self._settle(store, self.DISCARDED)
        return not store.is_failed()

    def __str__(self):
        return f"({self.guard}) -> {len(self.items)} items"


class Store:
    """
    Constraint store over integer variables.

    Domains only shrink between choice points. Every change is logged on the
    trail so that undo(mark) restores the exact state at mark().

    Parameters
    ----------
    config : SolverConfig, optional
    rng : numpy.random.Generator, optional
        Picks randomly among the scheduled propagators of the lowest priority.
    stats : SolverStats, optional
    """

    def __init__(self, config=None, rng=None, stats=None):
        self.config = config or SolverConfig()
        if rng is None and self.config.seed is not None:
            rng = np.random.default_rng(self.config.seed)
        self.rng = rng
        self.stats = stats or SolverStats()
        self.constraints = []
        self.propagators = []
        self.failed = False
        self._domains = {}
        self._watchers = defaultdict(list)
        self._trail = []
        self._queue = [[] for _ in PRIORITIES]
        self._scheduled = set()
        self._poly = None

    # domains

    def declare(self, name, interval=None) -> bool:
        interval = interval if interval is not None else Interval()
        if not isinstance(interval, Interval):
            interval = Interval(*interval)
        if name in self._domains:
            return self.narrow(name, interval)
        self._domains[name] = interval
        self._trail.append(("declare", name))
        if interval.is_empty():
            self.fail()
            return False
        return True

    def __contains__(self, name):
        return name in self._domains

    def domain(self, name) -> Interval:
        return self._domains[name]

    @property
    def variables(self) -> tuple:
        return tuple(self._domains)

    @property
    def box(self) -> Box:
        if self.failed:
            return Box.empty(self._domains)
        return Box(self._domains)

    def sub_box(self, names) -> Box:
        if self.failed:
            return Box.empty(names)
        return Box({name: self._domains[name] for name in names})

    def narrow(self, name, interval) -> bool:
        old = self._domains[name]
        new = old.meet(interval)
        if new == old:
            return True
        self._trail.append(("domain", name, old))
        self._domains[name] = new
        if new.is_empty():
            self.fail()
            return False
        for p in self._watchers[name]:
            self.schedule(p)
        return True

    def update(self, box) -> bool:
        if box.is_empty():
            self.fail()
            return False
        for name, interval in box.items():
            if not self.narrow(name, interval):
                return False
        return True

    def fail(self):
        if not self.failed:
            self.failed = True
            self._trail.append(("failed",))
        self._clear_queue()

    def is_failed(self) -> bool:
        return self.failed

    # propagators

    def schedule(self, p):
        if p.active and id(p) not in self._scheduled:
            self._scheduled.add(id(p))
            self._queue[p.priority].append(p)

    def watch(self, p, names):
        for name in names:
            if name not in self._domains:
                self.declare(name)
            self._watchers[name].append(p)
            self._trail.append(("watch", name))

    def add_propagator(self, p):
        if self.failed:
            return self
        self.propagators.append(p)
        self._trail.append(("propagator",))
        self.watch(p, p.variables)
        p.attach(self)
        self.schedule(p)
        return self

    def deactivate(self, p):
        if p.active:
            p.active = False
            self._trail.append(("active", p))

    def record(self, undo):
        """Log an arbitrary undo action on the trail."""
        self._trail.append(("call", undo))

    def post(self, c):
        """Post a Constraint or a Propagator; failure is recorded on the store."""
        if self.failed:
            return self
        if isinstance(c, Propagator):
            return self.add_propagator(c)
        for name in c.variables:
            if name not in self._domains:
                self.declare(name)
        self.constraints.append(c)
        self._trail.append(("constraint",))
        self.add_propagator(BoundPropagator(c))
        level = self.config.consistency
        if level == "domain":
            self.add_propagator(DomainPropagator(c))
        elif level == "poly":
            self._post_poly(c)
        return self

    def _post_poly(self, c):
        if self._poly is None:
            if c.is_linear():
                return
            self._poly = PolyPropagator(self.config.relaxation)
            self.record(lambda: setattr(self, "_poly", None))
            self.add_propagator(self._poly)
            for posted in self.constraints:
                self.watch(self._poly, posted.variables)
        else:
            self.watch(self._poly, c.variables)
        self.schedule(self._poly)

    def post_all(self, items):
        for item in items:
            self.post(item)
        return self

    def _pop(self):
        for bucket in self._queue:
            if bucket:
                index = int(self.rng.integers(len(bucket))) if self.rng is not None else 0
                p = bucket.pop(index)
                self._scheduled.discard(id(p))
                return p
        return None

    def _clear_queue(self):
        for bucket in self._queue:
            bucket.clear()
        self._scheduled.clear()

    def propagate(self):
        """Run scheduled propagators, lowest priority first, to quiescence."""
        with counting_calls(self.stats):
            while not self.failed:
                p = self._pop()
                if p is None:
                    break
                if not p.active:
                    continue
                self.stats.propagations += 1
                if not p.propagate(self):
                    self.fail()
        return self

    # trail

    def mark(self) -> int:
        return len(self._trail)

    def undo(self, mark):
        while len(self._trail) > mark:
            entry = self._trail.pop()
            kind = entry[0]
            if kind == "domain":
                self._domains[entry[1]] = entry[2]
            elif kind == "declare":
                del self._domains[entry[1]]
            elif kind == "failed":
                self.failed = False
            elif kind == "watch":
                self._watchers[entry[1]].pop()
            elif kind == "propagator":
                self.propagators.pop()
            elif kind == "constraint":
                self.constraints.pop()
            elif kind == "active":
                entry[1].active = True
            elif kind == "call":
                entry[1]()
        self._clear_queue()


@dataclass
class SearchResult:
    status: str
    valuation: dict = None
    stats: SolverStats = field(default_factory=SolverStats)


class _LimitReached(Exception):
    pass


def _consistent_assignment(s) -> bool:
    """Every posted constraint whose variables are all fixed holds."""
    for c in s.constraints:
        names = c.variables
        if all(s.domain(n).is_singleton() for n in names):
            if not c.evaluate({n: s.domain(n).value for n in names}):
                return False
    return True


def label_search(s, targets, limit=None, accept=None) -> SearchResult:
    """
    Depth-first labelling of the target variables.

    Parameters
    ----------
    s : Store
    targets : sequence of str
        Variables to label, each with a finite domain once propagated.
    limit : int, optional
        Search nodes allowed, the store's search_limit by default.
    accept : callable, optional
        Called with each candidate valuation; a False return rejects it and
        the search continues.

    Returns
    -------
    SearchResult
        FOUND with the valuation, EXHAUSTED, or BUDGET_EXCEEDED once the node
        limit is hit.
    """
    targets = list(targets)
    limit = limit if limit is not None else s.config.search_limit
    stats = s.stats
    order = {name: k for k, name in enumerate(targets)}
    s.propagate()

    def dfs():
        if s.is_failed():
            return None
        open_targets = [v for v in targets if not s.domain(v).is_singleton()]
        if not open_targets:
            if not _consistent_assignment(s):
                return None
            valuation = {v: s.domain(v).value for v in targets}
            if accept is not None and not accept(valuation):
                logger.debug(f"candidate {valuation} rejected")
                return None
            return valuation
        var = min(open_targets, key=lambda v: (s.domain(v).size(), order[v]))
        interval = s.domain(var)
        if not interval.is_finite():
            raise ValueError(f"cannot label '{var}' over the infinite domain {interval}")
        for value in range(interval.lo, interval.hi + 1):
            stats.nodes += 1
            if stats.nodes > limit:
                raise _LimitReached()
            mark = s.mark()
            logger.debug(f"label {var} = {value}")
            s.narrow(var, Interval.point(value))
            s.propagate()
            result = dfs()
            if result is not None:
                return result
            s.undo(mark)
            stats.backtracks += 1
        return None

    try:
        valuation = dfs()
    except _LimitReached:
        logger.info(f"search limit of {limit} nodes reached")
        return SearchResult(BUDGET_EXCEEDED, None, stats)
    if valuation is None:
        return SearchResult(EXHAUSTED, None, stats)
    return SearchResult(FOUND, valuation, stats)
