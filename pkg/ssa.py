import logging
from dataclasses import dataclass, field

from constraints import Constraint
from exceptions import TranslationError
from language import If, While, walk
from lattices import Interval
from loops import BlockTranslator, MemoryState, VersionAllocator, WConstraint, substitute

logger = logging.getLogger(__name__)


@dataclass
class SsaEncoding:
    """
    Constraint system of the executions of a program that reach one label.

    items holds everything to post, in order: constraints, guarded constraints
    and w constraints. inputs maps each parameter to its solver variable and
    domains gives the declared range of those solver variables.
    """

    items: list = field(default_factory=list)
    state: MemoryState = None
    path_conditions: list = field(default_factory=list)
    inputs: dict = field(default_factory=dict)
    domains: dict = field(default_factory=dict)

    @property
    def constraints(self) -> list:
        return [i for i in self.items if isinstance(i, Constraint)]

    @property
    def w_constraints(self) -> list:
        return [i for i in self.items if isinstance(i, WConstraint)]


def _contains(stmts, target) -> bool:
    return any(s.label == target for s in walk(stmts))


def _translate_path(translator, stmts, state, target, encoding):
    for stmt in stmts:
        if stmt.label == target:
            return state
        if not _contains([stmt], target):
            items, state = translator.statement(stmt, state, {})
            encoding.items.extend(items)
            continue
        if isinstance(stmt, While):
            raise TranslationError(f"target '{target}' lies inside the loop at line {stmt.line}")
        assert isinstance(stmt, If)
        cond = substitute(stmt.cond, state)
        if _contains(stmt.then, target):
            branch = stmt.then
        else:
            branch, cond = stmt.orelse, cond.negate()
        encoding.path_conditions.append(cond)
        encoding.items.append(cond)
        return _translate_path(translator, branch, state, target, encoding)
    return state


def to_ssa_constraints(program, target) -> SsaEncoding:
    """
    SSA encoding of the statements executed before target.

    Statements preceding target on its path are translated in full, each
    enclosing if contributes the condition of the branch holding target, and
    statements after target are ignored.

    Parameters
    ----------
    program : Program
    target : str
        Label of a statement outside every loop body.

    Returns
    -------
    SsaEncoding
    """
    if program.find(target) is None:
        raise TranslationError(f"unknown target label '{target}'")
    allocator = VersionAllocator()
    encoding = SsaEncoding()
    state = MemoryState()
    for param in program.params:
        name = allocator.fresh(param.name)
        state = state.assign(param.name, name)
        encoding.inputs[param.name] = name
        encoding.domains[name] = Interval(param.lo, param.hi)
    translator = BlockTranslator(allocator, program_level=True)
    encoding.state = _translate_path(translator, program.body, state, target, encoding)
    logger.debug(
        f"{program.name} up to {target}: {len(encoding.constraints)} constraints, "
        f"{len(encoding.w_constraints)} loops, {len(encoding.path_conditions)} path conditions"
    )
    return encoding
