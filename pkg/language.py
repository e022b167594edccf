import re
from dataclasses import dataclass, field

from constraints import BinOp, Const, Constraint, Neg, Var
from exceptions import LexError, ParseError, ScopeError

"""
language.py parses the input language of the solver.

    fn f(i: int in [0, 100000]) {
        a: j = 100;
        b: while (i > 0) { c: j = j + 1; d: i = i - 1; }
        e: if (j > 500) { f: skip; }
    }

Classes:
    Param, Assign, If, While, Skip - AST nodes, each with an optional label
    Program                        - name, params, body

Functions:
    parse_program    - text to a scope-checked Program
    parse_constraint - text of one condition to a Constraint
    parse_expression - text of one expression to an Expr
    assigned_variables / used_variables - variable sets of statement lists
"""

KEYWORDS = {"fn", "int", "in", "if", "else", "while", "skip"}

TOKEN_SPEC = [
    ("COMMENT", r"(//|#)[^\n]*"),
    ("NUMBER", r"\d+"),
    ("IDENT", r"[A-Za-z_][A-Za-z_0-9]*"),
    ("RELOP", r"<=|>=|==|!=|<|>"),
    ("ASSIGN", r"="),
    ("OP", r"[+\-*]"),
    ("PUNCT", r"[(){}\[\],:;]"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+"),
    ("MISMATCH", r"."),
]
TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int


def tokenize(text):
    line, line_start = 1, 0
    for match in TOKEN_RE.finditer(text):
        kind, value = match.lastgroup, match.group()
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind in ("SKIP", "COMMENT"):
            continue
        if kind == "MISMATCH":
            raise LexError(f"unexpected character {value!r}", line, column)
        if kind == "IDENT" and value in KEYWORDS:
            kind = value
        yield Token(kind, value, line, column)
    yield Token("EOF", "", line, len(text) - line_start + 1)


@dataclass(frozen=True)
class Param:
    name: str
    lo: int
    hi: int


@dataclass(frozen=True)
class Assign:
    target: str
    expr: object
    label: str = None
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class If:
    cond: Constraint
    then: tuple
    orelse: tuple = ()
    label: str = None
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class While:
    cond: Constraint
    body: tuple
    label: str = None
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Skip:
    label: str = None
    line: int = 0
    column: int = 0


def children(stmt) -> tuple:
    if isinstance(stmt, If):
        return stmt.then + stmt.orelse
    if isinstance(stmt, While):
        return stmt.body
    return ()


def walk(stmts):
    """Every statement, nested ones included, in source order."""
    for stmt in stmts:
        yield stmt
        yield from walk(children(stmt))


def assigned_variables(stmts) -> set:
    return {s.target for s in walk(stmts) if isinstance(s, Assign)}


def used_variables(stmts) -> set:
    """Variables read or written anywhere in stmts."""
    names = set()
    for s in walk(stmts):
        if isinstance(s, Assign):
            names.add(s.target)
            names |= s.expr.variables()
        elif isinstance(s, (If, While)):
            names |= set(s.cond.variables)
    return names


@dataclass(frozen=True)
class Program:
    name: str
    params: tuple
    body: tuple
    source: str = field(default="", compare=False, repr=False)

    @property
    def param_names(self) -> tuple:
        return tuple(p.name for p in self.params)

    def param(self, name) -> Param:
        return next(p for p in self.params if p.name == name)

    def labels(self) -> list:
        return [s.label for s in walk(self.body) if s.label is not None]

    def statement_count(self) -> int:
        return sum(1 for _ in walk(self.body))

    def find(self, label):
        return next((s for s in walk(self.body) if s.label == label), None)


class _Parser:
    def __init__(self, text):
        self.tokens = list(tokenize(text))
        self.pos = 0
        self.labels = set()

    @property
    def token(self) -> Token:
        return self.tokens[self.pos]

    def _error(self, message, token=None):
        token = token or self.token
        return ParseError(message, token.line, token.column)

    def peek(self, offset=1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def accept(self, kind, value=None):
        token = self.token
        if token.kind == kind and (value is None or token.value == value):
            self.pos += 1
            return token
        return None

    def expect(self, kind, value=None) -> Token:
        token = self.accept(kind, value)
        if token is None:
            wanted = value or kind
            found = self.token.value or self.token.kind
            raise self._error(f"expected '{wanted}' but found '{found}'")
        return token

    def integer(self) -> int:
        sign = -1 if self.accept("OP", "-") else 1
        return sign * int(self.expect("NUMBER").value)

    def program(self) -> Program:
        self.expect("fn")
        name = self.expect("IDENT").value
        self.expect("PUNCT", "(")
        params = []
        if not self.accept("PUNCT", ")"):
            params.append(self.param())
            while self.accept("PUNCT", ","):
                params.append(self.param())
            self.expect("PUNCT", ")")
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise self._error(f"duplicate parameter in {names}")
        body = self.block()
        self.expect("EOF")
        return Program(name, tuple(params), body)

    def param(self) -> Param:
        token = self.expect("IDENT")
        self.expect("PUNCT", ":")
        self.expect("int")
        self.expect("in")
        self.expect("PUNCT", "[")
        lo = self.integer()
        self.expect("PUNCT", ",")
        hi = self.integer()
        self.expect("PUNCT", "]")
        if lo > hi:
            raise self._error(f"empty range [{lo}, {hi}] for '{token.value}'", token)
        return Param(token.value, lo, hi)

    def block(self) -> tuple:
        self.expect("PUNCT", "{")
        stmts = []
        while not self.accept("PUNCT", "}"):
            if self.token.kind == "EOF":
                raise self._error("unterminated block")
            stmts.append(self.statement())
        return tuple(stmts)

    def statement(self):
        label = None
        if self.token.kind == "IDENT" and self.peek().kind == "PUNCT" and self.peek().value == ":":
            token = self.expect("IDENT")
            self.expect("PUNCT", ":")
            if token.value in self.labels:
                raise self._error(f"duplicate label '{token.value}'", token)
            self.labels.add(token.value)
            label = token.value
        start = self.token
        where = {"label": label, "line": start.line, "column": start.column}
        if self.accept("if"):
            cond = self.condition()
            then = self.block()
            orelse = self.block() if self.accept("else") else ()
            return If(cond, then, orelse, **where)
        if self.accept("while"):
            return While(self.condition(), self.block(), **where)
        if self.accept("skip"):
            self.expect("PUNCT", ";")
            return Skip(**where)
        target = self.expect("IDENT").value
        self.expect("ASSIGN")
        expr = self.expression()
        self.expect("PUNCT", ";")
        return Assign(target, expr, **where)

    def condition(self) -> Constraint:
        self.expect("PUNCT", "(")
        cond = self.relation()
        self.expect("PUNCT", ")")
        return cond

    def relation(self) -> Constraint:
        left = self.expression()
        relop = self.expect("RELOP").value
        return Constraint(left, relop, self.expression())

    def expression(self):
        e = self.term()
        while self.token.kind == "OP" and self.token.value in "+-":
            op = self.expect("OP").value
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.accept("OP", "*"):
            e = BinOp("*", e, self.unary())
        return e

    def unary(self):
        if self.accept("OP", "-"):
            operand = self.unary()
            if isinstance(operand, Const):
                return Const(-operand.value)
            return Neg(operand)
        token = self.accept("NUMBER")
        if token:
            return Const(int(token.value))
        token = self.accept("IDENT")
        if token:
            return Var(token.value)
        if self.accept("PUNCT", "("):
            e = self.expression()
            self.expect("PUNCT", ")")
            return e
        found = self.token.value or self.token.kind
        raise self._error(f"expected an expression but found '{found}'")


def _check_reads(names, scope, stmt):
    missing = sorted(set(names) - scope)
    if missing:
        raise ScopeError(f"variable '{missing[0]}' may be read before assignment", stmt.line, stmt.column)


def check_scopes(stmts, scope) -> set:
    """
    Definite assignment: returns the variables assigned on every path through
    stmts, starting from scope. Raises ScopeError on a possibly unassigned read.
    """
    scope = set(scope)
    for stmt in stmts:
        if isinstance(stmt, Assign):
            _check_reads(stmt.expr.variables(), scope, stmt)
            scope.add(stmt.target)
        elif isinstance(stmt, If):
            _check_reads(stmt.cond.variables, scope, stmt)
            scope = check_scopes(stmt.then, scope) & check_scopes(stmt.orelse, scope)
        elif isinstance(stmt, While):
            _check_reads(stmt.cond.variables, scope, stmt)
            check_scopes(stmt.body, scope)
    return scope


def parse_program(text) -> Program:
    program = _Parser(text).program()
    check_scopes(program.body, set(program.param_names))
    return Program(program.name, program.params, program.body, text)


def parse_constraint(text) -> Constraint:
    parser = _Parser(text)
    cond = parser.relation()
    parser.expect("EOF")
    return cond


def parse_expression(text):
    parser = _Parser(text)
    e = parser.expression()
    parser.expect("EOF")
    return e
