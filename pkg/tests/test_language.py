import pytest

from constraints import BinOp, Const, Neg, Var
from exceptions import LexError, ParseError, ScopeError
from language import (
    Assign,
    If,
    Skip,
    While,
    assigned_variables,
    parse_constraint,
    parse_expression,
    parse_program,
    tokenize,
    used_variables,
)


def test_parse_f(f_program):
    assert f_program.name == "f"
    assert f_program.param_names == ("i",)
    assert (f_program.param("i").lo, f_program.param("i").hi) == (0, 100000)
    assert f_program.labels() == ["a", "b", "c", "d", "e", "f"]
    loop = f_program.find("b")
    assert isinstance(loop, While)
    assert loop.cond == Var("i").gt(0)
    assert loop.body[0] == Assign("j", Var("j") + 1, label="c", line=loop.body[0].line, column=loop.body[0].column)
    assert isinstance(f_program.find("f"), Skip)
    assert f_program.find("zz") is None
    assert f_program.statement_count() == 6


def test_parse_if_else(branches_program):
    first = branches_program.find("a")
    assert isinstance(first, If)
    assert first.cond == Var("x").gt(Var("y"))
    assert [s.label for s in first.then] == ["b"]
    assert [s.label for s in first.orelse] == ["c"]


def test_expression_precedence():
    assert parse_expression("1 + 2 * x") == BinOp("+", Const(1), BinOp("*", Const(2), Var("x")))
    assert parse_expression("a - b - c") == BinOp("-", BinOp("-", Var("a"), Var("b")), Var("c"))
    assert parse_expression("-3") == Const(-3)
    assert parse_expression("-(x)") == Neg(Var("x"))
    assert parse_constraint("x * x == 49") == (Var("x") * Var("x")).eq(49)


def test_comments_and_labels_are_optional():
    program = parse_program(
        """
        // a comment
        fn g(x: int in [-3, 3]) {
            y = x;  # another
            if (y != 0) { skip; }
        }
        """
    )
    assert program.labels() == []
    assert program.param("x").lo == -3
    assert assigned_variables(program.body) == {"y"}
    assert used_variables(program.body) == {"x", "y"}


def test_lex_error_position():
    with pytest.raises(LexError) as info:
        list(tokenize("x = 1;\ny = $;"))
    assert (info.value.line, info.value.column) == (2, 5)


@pytest.mark.parametrize(
    "text",
    [
        "fn g(x: int in [0, 1]) { a: skip; a: skip; }",
        "fn g(x: int in [0, 1], x: int in [0, 1]) { skip; }",
        "fn g(x: int in [3, 1]) { skip; }",
        "fn g(x: int in [0, 1]) { y = ; }",
        "fn g(x: int in [0, 1]) { skip; ",
        "fn g(x: int in [0, 1]) { if x > 0 { skip; } }",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_program(text)


def test_read_before_assignment():
    with pytest.raises(ScopeError):
        parse_program("fn g(x: int in [0, 1]) { if (x > 0) { y = 1; } z = y; }")
    with pytest.raises(ScopeError):
        parse_program("fn g(x: int in [0, 1]) { while (x > 0) { y = 1; x = x - 1; } z = y; }")
    program = parse_program("fn g(x: int in [0, 1]) { if (x > 0) { y = 1; } else { y = 2; } z = y; }")
    assert assigned_variables(program.body) == {"y", "z"}
