from .analyze import StaticError, analyze
from .api import BUILTINS, PRIMITIVES, ApiRegistry, Param, Signature, StoredSkill, render_api_docs
from .ast import (
    BinOp,
    CallExpr,
    CallStmt,
    Expr,
    Function,
    If,
    Let,
    Lit,
    Program,
    ProgramSource,
    Repeat,
    Say,
    Stmt,
    Unary,
    Var,
)
from .interpreter import DEFAULT_BUDGET, ExecError, ExecutionOutcome, execute, static_call_bound
from .parser import ParseError, parse, print_expr, print_program, program_source

__all__ = [
    "StaticError",
    "analyze",
    "BUILTINS",
    "PRIMITIVES",
    "ApiRegistry",
    "Param",
    "Signature",
    "StoredSkill",
    "render_api_docs",
    "BinOp",
    "CallExpr",
    "CallStmt",
    "Expr",
    "Function",
    "If",
    "Let",
    "Lit",
    "Program",
    "ProgramSource",
    "Repeat",
    "Say",
    "Stmt",
    "Unary",
    "Var",
    "DEFAULT_BUDGET",
    "ExecError",
    "ExecutionOutcome",
    "execute",
    "static_call_bound",
    "ParseError",
    "parse",
    "print_expr",
    "print_program",
    "program_source",
]
