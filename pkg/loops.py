import logging
from collections import defaultdict
from collections.abc import Mapping

from constants import *
from constraints import Constraint, Var, bound_fixpoint, constraint_variables
from engine import EntailmentStatus, GuardedConstraint, Propagator, entailment_status
from exceptions import OracleBudgetError, UnboundVariableError
from interpreter import StepBudgetExceeded, execute_block
from language import Assign, If, Skip, While, assigned_variables, used_variables
from lattices import Box, Interval, TupleSet
from linear import LinearConstraint
from polyhedra import (
    Polyhedron,
    alpha_box,
    gamma_box,
    poly_includes,
    poly_intersect,
    poly_is_empty,
    poly_join,
    poly_project,
    poly_rename,
    poly_widen,
)
from relaxations import relax
from relaxations.relaxation import FreshVariables
from utils import PROFILER

"""
loops.py holds the w constraint of while loops and everything it needs.

Classes:
    MemoryState      - program variable -> solver variable
    VersionAllocator - fresh SSA versions x_0, x_1, ...
    BlockTranslator  - statements to constraints, guarded constraints and w constraints
    WConstraint      - w(M1, M2, M3, Dec, Body) as a propagator

Functions:
    substitute         - rename a condition, or translate a statement list, between states
    w_awake            - run the rules of a w constraint once
    concrete_fixpoint  - (T, Z_w) by enumeration, the exact oracle
    abstract_iterates  - polyhedral iterates with join then widening
    abstract_fixpoint  - last abstract iterate
    project_solutions  - restrict an abstract fixpoint to exit states
"""

logger = logging.getLogger(__name__)

SCRATCH_FORMAT = "{var}'{k}"


class MemoryState(Mapping):
    """Immutable, injective mapping from program variables to solver variables."""

    __slots__ = ("_map",)

    def __init__(self, mapping=None):
        mapping = dict(sorted(dict(mapping or {}).items()))
        if len(set(mapping.values())) != len(mapping):
            raise ValueError(f"memory state {mapping} maps two program variables to one solver variable")
        self._map = mapping

    def __getitem__(self, name):
        return self._map[name]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    @property
    def program_variables(self) -> tuple:
        return tuple(self._map)

    @property
    def solver_variables(self) -> tuple:
        return tuple(self._map.values())

    def assign(self, name, solver_name):
        mapping = dict(self._map)
        mapping[name] = solver_name
        return MemoryState(mapping)

    def restrict(self, names):
        return MemoryState({name: self._map[name] for name in names})

    def __str__(self):
        return "{" + ", ".join(f"{k}: {v}" for k, v in self._map.items()) + "}"

    def __repr__(self):
        return f"MemoryState({self})"


class VersionAllocator:
    def __init__(self, reserved=(), fmt="{var}_{k}"):
        self.fmt = fmt
        self.counters = defaultdict(int)
        self.used = set(reserved)

    def reserve(self, names):
        self.used.update(names)

    def fresh(self, var) -> str:
        while True:
            name = self.fmt.format(var=var, k=self.counters[var])
            self.counters[var] += 1
            if name not in self.used:
                self.used.add(name)
                return name


def _rename_checked(template, state):
    names = template.variables if isinstance(template, Constraint) else template.variables()
    missing = sorted(set(names) - set(state))
    if missing:
        raise UnboundVariableError(missing[0], "memory state")
    return template.rename(dict(state))


class BlockTranslator:
    """
    SSA translation of statement lists. Assignments become equalities over
    fresh versions, if/else becomes two guarded constraints joined by merge
    versions, while becomes a WConstraint.
    """

    def __init__(self, allocator, program_level=False):
        self.allocator = allocator
        self.program_level = program_level

    def _version(self, var, names):
        return names.get(var) or self.allocator.fresh(var)

    def block(self, stmts, state, to_state=None):
        """
        Returns
        -------
        (list, MemoryState)
            The items and the state after stmts; with to_state, every variable of
            to_state ends in to_state's solver variable.
        """
        stmts = tuple(stmts)
        last = {}
        for index, stmt in enumerate(stmts):
            for var in assigned_variables([stmt]):
                last[var] = index
        items = []
        for index, stmt in enumerate(stmts):
            names = {v: s for v, s in (to_state or {}).items() if last.get(v) == index}
            new_items, state = self.statement(stmt, state, names)
            items.extend(new_items)
        for var, target in (to_state or {}).items():
            if var not in state:
                raise UnboundVariableError(var, "memory state")
            if state[var] != target:
                items.append(Var(target).eq(Var(state[var])))
                state = state.assign(var, target)
        return items, state

    def statement(self, stmt, state, names):
        if isinstance(stmt, Assign):
            rhs = _rename_checked(stmt.expr, state)
            version = self._version(stmt.target, names)
            return [Var(version).eq(rhs)], state.assign(stmt.target, version)
        if isinstance(stmt, Skip):
            return [], state
        if isinstance(stmt, If):
            return self._conditional(stmt, state, names)
        assert isinstance(stmt, While)
        loop_vars = sorted(used_variables([stmt]) & set(state))
        m1 = state.restrict(loop_vars)
        m3 = MemoryState({v: self._version(v, names) for v in loop_vars})
        w = WConstraint(m1, m3, stmt.cond, stmt.body, self.allocator, program_level=self.program_level, label=stmt.label)
        for v in loop_vars:
            state = state.assign(v, m3[v])
        return [w], state

    def _conditional(self, stmt, state, names):
        cond = _rename_checked(stmt.cond, state)
        then_items, then_state = self.block(stmt.then, state)
        else_items, else_state = self.block(stmt.orelse, state)
        merged = state
        for var in sorted(set(then_state) & set(else_state)):
            a, b = then_state[var], else_state[var]
            if a == b:
                merged = merged.assign(var, a)
                continue
            version = self._version(var, names)
            then_items.append(Var(version).eq(Var(a)))
            else_items.append(Var(version).eq(Var(b)))
            merged = merged.assign(var, version)
        items = []
        if then_items:
            items.append(GuardedConstraint(cond, then_items))
        if else_items:
            items.append(GuardedConstraint(cond.negate(), else_items))
        return items, merged


def substitute(template, from_state, to_state=None, allocator=None):
    """
    Rename a condition (Constraint or expression) through from_state, or
    translate a statement list starting in from_state.

    Returns
    -------
    Constraint, expression, or (list, MemoryState)
    """
    if not isinstance(template, (list, tuple)):
        return _rename_checked(template, from_state)
    if allocator is None:
        reserved = list(from_state.values()) + list((to_state or {}).values())
        allocator = VersionAllocator(reserved)
    return BlockTranslator(allocator).block(template, from_state, to_state)


def _query_box(store, names) -> Box:
    return Box({n: store.domain(n) if n in store else Interval() for n in names})


class _WJoin(Propagator):
    """Runs the join of its w constraint at the lowest priority."""

    def __init__(self, w):
        super(_WJoin, self).__init__((), PRIORITY_JOIN)
        self.w = w

    def propagate(self, store):
        if not self.w.active:
            return True
        return self.w.join(store)


class WConstraint(Propagator):
    """
    w(M1, M2, M3, Dec, Body) for one while loop.

    Parameters
    ----------
    m1, m3 : MemoryState
        States before and after the loop, over the same program variables.
    dec : Constraint
        Loop condition over program variables.
    body : tuple of statements
    allocator : VersionAllocator, optional
        Shared with the translation that created the loop.
    depth : int
        Unrollings that led to this constraint.
    program_level : bool
        Created by program translation rather than by unrolling; such loops join
        once as soon as they are first woken.
    label : str, optional
    """

    def __init__(self, m1, m3, dec, body, allocator=None, depth=0, program_level=False, label=None):
        if set(m1) != set(m3):
            raise ValueError(f"states {m1} and {m3} range over different program variables")
        super(WConstraint, self).__init__(m1.solver_variables + m3.solver_variables, PRIORITY_GUARD)
        self.m1 = m1
        self.m3 = m3
        self.dec = dec
        self.body = tuple(body)
        self.allocator = allocator or VersionAllocator(self.variables)
        self.depth = depth
        self.program_level = program_level
        self.label = label
        self.joined = False
        self.p = None
        self.q = None
        self.q_box = None
        self.joiner = _WJoin(self)
        self._scratch = None

    @property
    def state_variables(self) -> tuple:
        return self.m1.program_variables

    @property
    def dims(self) -> tuple:
        return self.variables

    def dec_at(self, state) -> Constraint:
        return substitute(self.dec, state)

    def _assign(self, store, **attributes):
        previous = {k: getattr(self, k) for k in attributes}
        for k, v in attributes.items():
            setattr(self, k, v)

        def restore():
            for k, v in previous.items():
                setattr(self, k, v)

        store.record(restore)

    def _body_scratch(self):
        """Body constraints from m1 over throwaway versions, for disentailment tests."""
        if self._scratch is None:
            scratch = VersionAllocator(fmt=SCRATCH_FORMAT)
            items, _ = BlockTranslator(scratch).block(self.body, self.m1)
            self._scratch = [i for i in items if isinstance(i, Constraint)]
        return self._scratch

    def _exit_equalities(self):
        return [Var(self.m3[v]).eq(Var(self.m1[v])) for v in self.state_variables]

    def _disentailed(self, store, constraints) -> bool:
        box = _query_box(store, constraint_variables(constraints))
        return bound_fixpoint(constraints, box).is_empty()

    def _q_excludes(self, store, constraints) -> bool:
        """Q, the current bounds and the constraints have no rational point in common."""
        if self.q is None:
            return False
        region = poly_intersect(self.q, alpha_box(store.sub_box(self.dims)))
        for c in constraints:
            box = _query_box(store, c.variables)
            region = poly_intersect(region, Polyhedron(c.variables, relax(c, box, store.config.relaxation)))
        return poly_is_empty(region)

    def propagate(self, store):
        store.stats.w_awakenings += 1
        if self.program_level and not self.joined:
            self._assign(store, joined=True)
            if not self.join(store):
                return False
        dec1 = self.dec_at(self.m1)
        status = entailment_status(dec1, store)
        if status is EntailmentStatus.ENTAILED:
            logger.debug(f"{self}: loop condition entailed, unrolling")
            return self._unroll(store, [])
        if status is EntailmentStatus.DISENTAILED:
            logger.debug(f"{self}: loop condition disentailed, exiting")
            return self._exit(store, [])
        if self._disentailed(store, [dec1] + self._body_scratch()) or self._q_excludes(store, [dec1]):
            logger.debug(f"{self}: condition and body inconsistent, exiting")
            return self._exit(store, [dec1.negate()])
        exit_now = [dec1.negate()] + self._exit_equalities()
        if self._disentailed(store, exit_now) or self._q_excludes(store, exit_now):
            logger.debug(f"{self}: exit inconsistent, unrolling")
            return self._unroll(store, [dec1])
        store.schedule(self.joiner)
        return True

    def _exit(self, store, extra):
        store.deactivate(self)
        store.post_all(extra + self._exit_equalities())
        return not store.is_failed()

    def _unroll(self, store, extra):
        config = store.config
        if self.depth + 1 > config.max_unroll:
            store.stats.unroll_cutoffs += 1
            logger.debug(f"{self}: unroll cutoff at depth {self.depth}")
            return False
        store.stats.unrollings += 1
        m2 = MemoryState({v: self.allocator.fresh(v) for v in self.state_variables})
        items, _ = BlockTranslator(self.allocator).block(self.body, self.m1, m2)
        following = WConstraint(m2, self.m3, self.dec, self.body, self.allocator, self.depth + 1, False, self.label)
        store.deactivate(self)
        store.post_all(extra + items + [following])
        return not store.is_failed()

    def join(self, store) -> bool:
        """
        Abstract fixpoint from the current bounds of m1 (cached while they do not
        change), restricted to exit states and the current bounds of m1 and m3,
        then rounded onto the domains.
        """
        box1 = store.sub_box(self.m1.solver_variables)
        if box1.is_empty():
            return False
        if self.q is None or self.q_box != box1:
            config = store.config
            store.stats.join_invocations += 1
            p = abstract_fixpoint(
                self,
                initial_polyhedron(self, box1),
                config.widen_delay,
                mode=config.join,
                d_exact=config.d_exact,
                strategy=config.relaxation,
            )
            q = project_solutions(self, p, config.relaxation)
            logger.debug(f"{self}: join over {box1} gives\n{q}")
            self._assign(store, p=p, q=q, q_box=box1)
        region = poly_intersect(self.q, alpha_box(store.sub_box(self.dims)))
        return store.update(gamma_box(region, self.dims))

    def __str__(self):
        name = f"w[{self.label}]" if self.label else "w"
        return f"{name}({self.m1} -> {self.m3}, depth {self.depth})"


def w_awake(w: WConstraint, s):
    """Apply the rules of w once to the store s."""
    if w.active and not s.is_failed():
        if not w.propagate(s):
            s.fail()
    return s


def concrete_fixpoint(w: WConstraint, init: TupleSet, cap=FIXPOINT_CAP, step_budget=STEP_BUDGET):
    """
    Least fixpoint of one-step body application from the diagonal of init.

    Parameters
    ----------
    w : WConstraint
    init : TupleSet
        Over the solver variables of m1.
    cap : int
        Maximum number of (in, out) pairs.

    Returns
    -------
    (TupleSet, TupleSet)
        T and its exit pairs Z_w, both over m1 then m3 solver variables.
    """
    names = w.state_variables
    in_names = [w.m1[v] for v in names]
    out_names = [w.m3[v] for v in names]
    index = [init.variables.index(n) for n in in_names]
    starts = {tuple(t[i] for i in index) for t in init.tuples}
    pairs = {(s, s) for s in starts}
    frontier = set(pairs)
    while frontier:
        discovered = set()
        for s, t in frontier:
            env = dict(zip(names, t))
            if not w.dec.evaluate(env):
                continue
            try:
                out = execute_block(w.body, env, step_budget)
            except StepBudgetExceeded:
                raise OracleBudgetError(f"loop body exceeded {step_budget} steps from {env}")
            pair = (s, tuple(out[v] for v in names))
            if pair not in pairs:
                discovered.add(pair)
        pairs |= discovered
        frontier = discovered
        if len(pairs) > cap:
            raise OracleBudgetError(f"concrete fixpoint exceeds {cap} pairs")
    variables = in_names + out_names
    t_set = TupleSet(variables, (s + t for s, t in pairs))
    z_set = TupleSet(
        variables,
        (s + t for s, t in pairs if not w.dec.evaluate(dict(zip(names, t)))),
    )
    return t_set, z_set


def initial_polyhedron(w: WConstraint, box1: Box) -> Polyhedron:
    """The bounds of m1 and the diagonal m3 = m1."""
    diagonal = [LinearConstraint.eq(w.m3[v], w.m1[v]) for v in w.state_variables]
    return Polyhedron(w.dims, list(alpha_box(box1).constraints) + diagonal)


def post_image(w: WConstraint, p: Polyhedron, strategy="envelope") -> Polyhedron:
    """One more iteration from the out-states of p that satisfy the loop condition."""
    names = w.state_variables
    mid = MemoryState({v: f"{w.m3[v]}'" for v in names})
    p_mid = poly_rename(p, {w.m3[v]: mid[v] for v in names})
    items, _ = BlockTranslator(VersionAllocator(fmt=SCRATCH_FORMAT)).block(w.body, mid, w.m3)
    cs = [w.dec_at(mid)] + [i for i in items if isinstance(i, Constraint)]
    variables = constraint_variables(cs)
    bounds = Box.universe(variables)
    if not all(c.is_linear() for c in cs):
        mid_box = gamma_box(p_mid, mid.solver_variables)
        if mid_box.is_empty():
            return Polyhedron.empty(w.dims)
        bounds = bounds.extend(mid_box)
    fresh = FreshVariables()
    linear = [lc for c in cs for lc in relax(c, bounds, strategy, fresh)]
    region = poly_intersect(p_mid, Polyhedron(variables, linear))
    return poly_project(region, w.dims)


def abstract_iterates(
    w: WConstraint,
    init: Polyhedron,
    widen_delay=WIDEN_DELAY,
    mode="template",
    d_exact=D_EXACT,
    strategy="envelope",
):
    """
    Yield P^0 = init, P^1, ... where P^{k+1} = P^k join image(P^k) for k below
    widen_delay and P^k widen (P^k join image(P^k)) afterwards. Stops once an
    iterate adds nothing.
    """
    p = init
    yield p
    k = 0
    while True:
        joined = poly_join(p, post_image(w, p, strategy), mode, d_exact)
        following = joined if k < widen_delay else poly_widen(p, joined)
        k += 1
        if poly_includes(p, following):
            logger.debug(f"abstract fixpoint of {w} after {k} steps")
            return
        p = following
        yield p


@PROFILER.profile("abstract_fixpoint")
def abstract_fixpoint(w: WConstraint, init: Polyhedron, widen_delay=WIDEN_DELAY, **kwargs) -> Polyhedron:
    p = init
    for p in abstract_iterates(w, init, widen_delay, **kwargs):
        pass
    return p


def project_solutions(w: WConstraint, p: Polyhedron, strategy="envelope") -> Polyhedron:
    """p restricted to out-states where the loop condition fails."""
    exit_condition = w.dec_at(w.m3).negate()
    names = exit_condition.variables
    linear = relax(exit_condition, Box.universe(names), strategy)
    return poly_intersect(p, Polyhedron(names, linear))
