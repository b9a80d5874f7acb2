"""AST node types for the skill-programming language.

Source positions are carried for error reporting but excluded from
equality so printed-and-reparsed trees compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Value = Union[int, str, bool]


@dataclass(eq=True)
class Lit:
    value: Value
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(eq=True)
class Var:
    name: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(eq=True)
class Unary:
    op: str  # "-" | "not"
    operand: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(eq=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(eq=True)
class CallExpr:
    """Builtin query call usable inside expressions, e.g. inventory_count."""

    name: str
    args: list["Expr"]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


Expr = Union[Lit, Var, Unary, BinOp, CallExpr]


@dataclass(eq=True)
class Let:
    name: str
    value: Expr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(eq=True)
class If:
    cond: Expr
    then: list["Stmt"]
    orelse: list["Stmt"]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(eq=True)
class Repeat:
    count: int  # literal, compile-time-known bound
    body: list["Stmt"]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(eq=True)
class Say:
    value: Expr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(eq=True)
class CallStmt:
    """Primitive or library-skill invocation."""

    name: str
    args: list[Expr]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


Stmt = Union[Let, If, Repeat, Say, CallStmt]


@dataclass(eq=True)
class Function:
    name: str
    params: list[str]
    body: list[Stmt]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(eq=True)
class Program:
    function: Function


@dataclass(frozen=True)
class ProgramSource:
    """Raw text plus the name of its single top-level function."""

    text: str
    entry_name: str
