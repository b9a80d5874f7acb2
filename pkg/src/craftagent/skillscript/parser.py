"""Lexer, recursive-descent parser, and canonical printer for skill programs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

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

KEYWORDS = {"fn", "let", "if", "else", "repeat", "say", "true", "false", "and", "or", "not"}
SYMBOLS = ["==", "!=", "<=", ">=", "{", "}", "(", ")", ",", "=", "<", ">", "+", "-", "*", "/"]


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected: Optional[set[str]] = None):
        self.line = line
        self.col = col
        self.expected = set(expected or ())
        detail = f"{message} at line {line}, column {col}"
        if self.expected:
            detail += " (expected " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


@dataclass(frozen=True)
class Token:
    kind: str  # ident | keyword | int | string | symbol | eof
    text: str
    value: object
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            value: object = word
            if word == "true":
                value = True
            elif word == "false":
                value = False
            tokens.append(Token(kind, word, value, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], int(source[i:j]), start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            buf = []
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    raise ParseError("unterminated string", start_line, start_col)
                if source[j] == "\\" and j + 1 < n and source[j + 1] in '"\\':
                    buf.append(source[j + 1])
                    j += 2
                    continue
                buf.append(source[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated string", start_line, start_col)
            tokens.append(Token("string", source[i:j + 1], "".join(buf), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        matched = None
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                matched = sym
                break
        if matched is None:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        tokens.append(Token("symbol", matched, matched, start_line, start_col))
        i += len(matched)
        col += len(matched)
    tokens.append(Token("eof", "", None, line, col))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.current
        if token.kind != "eof":
            self.pos += 1
        return token

    def check(self, kind: str, text: Optional[str] = None) -> bool:
        token = self.current
        return token.kind == kind and (text is None or token.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.check(kind, text):
            want = text if text is not None else f"<{kind}>"
            raise ParseError(
                f"unexpected {self.current.text or 'end of input'!r}",
                self.current.line, self.current.col, expected={want})
        return self.advance()

    # ----- grammar -----

    def parse_program(self) -> Program:
        functions = []
        while not self.check("eof"):
            functions.append(self.parse_function())
        if not functions:
            raise ParseError("expected a function definition", 1, 1, expected={"fn"})
        if len(functions) > 1:
            extra = functions[1]
            raise ParseError(
                f"multiple top-level functions (second is {extra.name!r})",
                extra.line, extra.col)
        return Program(functions[0])

    def parse_function(self) -> Function:
        start = self.expect("keyword", "fn")
        name = self.expect("ident").text
        self.expect("symbol", "(")
        params = []
        if not self.check("symbol", ")"):
            params.append(self.expect("ident").text)
            while self.check("symbol", ","):
                self.advance()
                params.append(self.expect("ident").text)
        self.expect("symbol", ")")
        body = self.parse_block()
        return Function(name, params, body, line=start.line, col=start.col)

    def parse_block(self) -> list[Stmt]:
        self.expect("symbol", "{")
        statements: list[Stmt] = []
        while not self.check("symbol", "}"):
            if self.check("eof"):
                raise ParseError("unbalanced brace: block is never closed",
                                 self.current.line, self.current.col, expected={"}"})
            statements.append(self.parse_statement())
        self.expect("symbol", "}")
        return statements

    def parse_statement(self) -> Stmt:
        token = self.current
        if self.check("keyword", "let"):
            self.advance()
            name = self.expect("ident").text
            self.expect("symbol", "=")
            value = self.parse_expr()
            return Let(name, value, line=token.line, col=token.col)
        if self.check("keyword", "if"):
            return self.parse_if()
        if self.check("keyword", "repeat"):
            self.advance()
            count = self.expect("int")
            body = self.parse_block()
            return Repeat(int(count.value), body, line=token.line, col=token.col)
        if self.check("keyword", "say"):
            self.advance()
            return Say(self.parse_expr(), line=token.line, col=token.col)
        if self.check("ident"):
            name = self.advance()
            self.expect("symbol", "(")
            args = self.parse_args()
            return CallStmt(name.text, args, line=name.line, col=name.col)
        raise ParseError(f"unexpected {token.text!r}", token.line, token.col,
                         expected={"let", "if", "repeat", "say", "<call>"})

    def parse_if(self) -> If:
        token = self.expect("keyword", "if")
        cond = self.parse_expr()
        then = self.parse_block()
        orelse: list[Stmt] = []
        if self.check("keyword", "else"):
            self.advance()
            if self.check("keyword", "if"):
                orelse = [self.parse_if()]
            else:
                orelse = self.parse_block()
        return If(cond, then, orelse, line=token.line, col=token.col)

    def parse_args(self) -> list[Expr]:
        args: list[Expr] = []
        if not self.check("symbol", ")"):
            args.append(self.parse_expr())
            while self.check("symbol", ","):
                self.advance()
                args.append(self.parse_expr())
        self.expect("symbol", ")")
        return args

    # expressions, loosest binding first
    def parse_expr(self) -> Expr:
        return self.parse_or()

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.check("keyword", "or"):
            op = self.advance()
            left = BinOp("or", left, self.parse_and(), line=op.line, col=op.col)
        return left

    def parse_and(self) -> Expr:
        left = self.parse_not()
        while self.check("keyword", "and"):
            op = self.advance()
            left = BinOp("and", left, self.parse_not(), line=op.line, col=op.col)
        return left

    def parse_not(self) -> Expr:
        if self.check("keyword", "not"):
            op = self.advance()
            return Unary("not", self.parse_not(), line=op.line, col=op.col)
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_sum()
        if self.current.kind == "symbol" and self.current.text in ("==", "!=", "<", "<=", ">", ">="):
            op = self.advance()
            return BinOp(op.text, left, self.parse_sum(), line=op.line, col=op.col)
        return left

    def parse_sum(self) -> Expr:
        left = self.parse_term()
        while self.current.kind == "symbol" and self.current.text in ("+", "-"):
            op = self.advance()
            left = BinOp(op.text, left, self.parse_term(), line=op.line, col=op.col)
        return left

    def parse_term(self) -> Expr:
        left = self.parse_unary()
        while self.current.kind == "symbol" and self.current.text in ("*", "/"):
            op = self.advance()
            left = BinOp(op.text, left, self.parse_unary(), line=op.line, col=op.col)
        return left

    def parse_unary(self) -> Expr:
        if self.check("symbol", "-"):
            op = self.advance()
            return Unary("-", self.parse_unary(), line=op.line, col=op.col)
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        token = self.current
        if token.kind == "int" or token.kind == "string":
            self.advance()
            return Lit(token.value, line=token.line, col=token.col)
        if token.kind == "keyword" and token.text in ("true", "false"):
            self.advance()
            return Lit(token.value, line=token.line, col=token.col)
        if self.check("symbol", "("):
            self.advance()
            inner = self.parse_expr()
            self.expect("symbol", ")")
            return inner
        if token.kind == "ident":
            self.advance()
            if self.check("symbol", "("):
                self.advance()
                args = self.parse_args()
                return CallExpr(token.text, args, line=token.line, col=token.col)
            return Var(token.text, line=token.line, col=token.col)
        raise ParseError(f"unexpected {token.text or 'end of input'!r}", token.line, token.col,
                         expected={"<expression>"})


def parse(source: str) -> Program:
    """Parse one top-level function; raises ParseError with line/column."""
    return Parser(source).parse_program()


def program_source(text: str) -> ProgramSource:
    program = parse(text)
    return ProgramSource(text=text, entry_name=program.function.name)


# ----- canonical printer ---------------------------------------------------

_PREC = {"or": 1, "and": 2, "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6}


def print_expr(expr: Expr, parent_prec: int = 0) -> str:
    if isinstance(expr, Lit):
        if isinstance(expr.value, bool):
            return "true" if expr.value else "false"
        if isinstance(expr.value, str):
            escaped = expr.value.replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        return str(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, CallExpr):
        return f"{expr.name}({', '.join(print_expr(a) for a in expr.args)})"
    if isinstance(expr, Unary):
        prec = 3 if expr.op == "not" else 7
        inner = print_expr(expr.operand, prec)
        text = f"not {inner}" if expr.op == "not" else f"-{inner}"
        return f"({text})" if prec < parent_prec else text
    if isinstance(expr, BinOp):
        prec = _PREC[expr.op]
        left = print_expr(expr.left, prec)
        right = print_expr(expr.right, prec + 1)
        text = f"{left} {expr.op} {right}"
        return f"({text})" if prec < parent_prec else text
    raise TypeError(f"unknown expression node: {expr!r}")


def _print_block(statements: list[Stmt], indent: int) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    for stmt in statements:
        if isinstance(stmt, Let):
            lines.append(f"{pad}let {stmt.name} = {print_expr(stmt.value)}")
        elif isinstance(stmt, Say):
            lines.append(f"{pad}say {print_expr(stmt.value)}")
        elif isinstance(stmt, CallStmt):
            lines.append(f"{pad}{stmt.name}({', '.join(print_expr(a) for a in stmt.args)})")
        elif isinstance(stmt, Repeat):
            lines.append(f"{pad}repeat {stmt.count} {{")
            lines.extend(_print_block(stmt.body, indent + 1))
            lines.append(f"{pad}}}")
        elif isinstance(stmt, If):
            lines.append(f"{pad}if {print_expr(stmt.cond)} {{")
            lines.extend(_print_block(stmt.then, indent + 1))
            if stmt.orelse:
                lines.append(f"{pad}}} else {{")
                lines.extend(_print_block(stmt.orelse, indent + 1))
            lines.append(f"{pad}}}")
        else:
            raise TypeError(f"unknown statement node: {stmt!r}")
    return lines


def print_program(program: Program) -> str:
    fn = program.function
    lines = [f"fn {fn.name}({', '.join(fn.params)}) {{"]
    lines.extend(_print_block(fn.body, 1))
    lines.append("}")
    return "\n".join(lines) + "\n"
