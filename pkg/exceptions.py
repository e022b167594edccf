"""
Error types raised by the solver. Store failure and search exhaustion are values,
not exceptions; everything here signals misuse or an exceeded oracle budget.
"""


class SolverError(Exception):
    pass


class RationalDivisionError(SolverError, ZeroDivisionError):
    pass


class UnboundVariableError(SolverError, KeyError):
    def __init__(self, name, where=""):
        self.name = name
        suffix = f" in {where}" if where else ""
        super().__init__(f"variable '{name}' is not bound{suffix}")

    def __str__(self):
        return self.args[0]


class ArityMismatchError(SolverError, ValueError):
    pass


class OracleBudgetError(SolverError):
    pass


class ProgramError(SolverError):
    """
    Error located in program text.

    Parameters
    ----------
    message : str
    line : int
    column : int
    """

    def __init__(self, message, line=0, column=0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class LexError(ProgramError):
    pass


class ParseError(ProgramError):
    pass


class ScopeError(ProgramError):
    pass


class TranslationError(SolverError):
    pass


class InputError(SolverError, ValueError):
    pass
