"""Exact symbolic scalar expressions."""
from .core import (
    FUNCTIONS,
    ONE,
    ZERO,
    DomainError,
    FuncAtom,
    ScalarExpr,
    as_expr,
    const,
    cos,
    exp,
    func,
    ln,
    sin,
    sqrt,
    sym,
    symbols,
)
from .parser import ParseError, UnknownIdentifierError, parse
from .vartable import VarInfo, VarTable
from .zerotest import (
    NONZERO,
    PROBABLE,
    PROVEN,
    EvaluationDomainError,
    PointStream,
    ZeroVerdict,
    all_zero,
    combine,
    is_zero,
    random_rational,
)


def diff(e, v: str, deps=None) -> ScalarExpr:
    """Partial derivative of ``e`` with respect to indeterminate ``v``."""
    return as_expr(e).diff(v, deps)


def to_string(e) -> str:
    return str(as_expr(e))


__all__ = [
    "FUNCTIONS", "ONE", "ZERO", "DomainError", "FuncAtom", "ScalarExpr", "as_expr", "const",
    "cos", "exp", "func", "ln", "sin", "sqrt", "sym", "symbols", "ParseError",
    "UnknownIdentifierError", "parse", "VarInfo", "VarTable", "NONZERO", "PROBABLE", "PROVEN",
    "EvaluationDomainError", "PointStream", "ZeroVerdict", "all_zero", "combine", "is_zero",
    "random_rational", "diff", "to_string",
]
