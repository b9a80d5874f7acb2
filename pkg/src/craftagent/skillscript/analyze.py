"""Static checks: name resolution, arity, variable scoping, recursion cycles."""

from __future__ import annotations

from dataclasses import dataclass

from .api import BUILTIN_NAMES, ApiRegistry
from .ast import BinOp, CallExpr, CallStmt, Expr, Function, If, Let, Lit, Program, Repeat, Say, Stmt, Unary, Var


@dataclass(frozen=True)
class StaticError:
    kind: str  # unknown_callable | arity | unknown_variable | cycle | bad_bound | misuse
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.message} (line {self.line}, column {self.col})"


def _walk_expr(expr: Expr, scope: set[str], registry: ApiRegistry, errors: list[StaticError]) -> None:
    if isinstance(expr, Lit):
        return
    if isinstance(expr, Var):
        if expr.name not in scope:
            errors.append(StaticError("unknown_variable", f"unknown variable: {expr.name}",
                                      expr.line, expr.col))
        return
    if isinstance(expr, Unary):
        _walk_expr(expr.operand, scope, registry, errors)
        return
    if isinstance(expr, BinOp):
        _walk_expr(expr.left, scope, registry, errors)
        _walk_expr(expr.right, scope, registry, errors)
        return
    if isinstance(expr, CallExpr):
        sig = registry.builtins.get(expr.name)
        if sig is None:
            kind = "misuse" if registry.resolve(expr.name) else "unknown_callable"
            what = "an action, not usable in an expression" if kind == "misuse" else "unknown"
            errors.append(StaticError(kind, f"{expr.name} is {what}", expr.line, expr.col))
        elif not (sig.min_args <= len(expr.args) <= sig.max_args):
            errors.append(StaticError(
                "arity", f"{expr.name} takes {sig.min_args}..{sig.max_args} arguments, got {len(expr.args)}",
                expr.line, expr.col))
        for arg in expr.args:
            _walk_expr(arg, scope, registry, errors)


def _walk_block(body: list[Stmt], scope: set[str], registry: ApiRegistry,
                errors: list[StaticError], calls: set[str]) -> None:
    scope = set(scope)  # lets are visible to the end of their enclosing block
    for stmt in body:
        if isinstance(stmt, Let):
            _walk_expr(stmt.value, scope, registry, errors)
            scope.add(stmt.name)
        elif isinstance(stmt, Say):
            _walk_expr(stmt.value, scope, registry, errors)
        elif isinstance(stmt, If):
            _walk_expr(stmt.cond, scope, registry, errors)
            _walk_block(stmt.then, scope, registry, errors, calls)
            _walk_block(stmt.orelse, scope, registry, errors, calls)
        elif isinstance(stmt, Repeat):
            if stmt.count < 1:
                errors.append(StaticError("bad_bound", f"repeat bound must be >= 1, got {stmt.count}",
                                          stmt.line, stmt.col))
            _walk_block(stmt.body, scope, registry, errors, calls)
        elif isinstance(stmt, CallStmt):
            if stmt.name in BUILTIN_NAMES:
                errors.append(StaticError(
                    "misuse", f"{stmt.name} is a query, not an action", stmt.line, stmt.col))
            else:
                sig = registry.resolve(stmt.name)
                if sig is None:
                    errors.append(StaticError(
                        "unknown_callable", f"unknown callable: {stmt.name}", stmt.line, stmt.col))
                else:
                    if sig.kind == "skill":
                        calls.add(stmt.name)
                    if not (sig.min_args <= len(stmt.args) <= sig.max_args):
                        errors.append(StaticError(
                            "arity",
                            f"{stmt.name} takes {sig.min_args}..{sig.max_args} arguments, got {len(stmt.args)}",
                            stmt.line, stmt.col))
            for arg in stmt.args:
                _walk_expr(arg, scope, registry, errors)


def _skill_calls(function: Function, registry: ApiRegistry) -> set[str]:
    """Names of every non-primitive call, resolved or not, for cycle checks."""
    from .api import PRIMITIVE_NAMES

    calls: set[str] = set()

    def walk(stmts: list[Stmt]) -> None:
        for stmt in stmts:
            if isinstance(stmt, CallStmt) and stmt.name not in PRIMITIVE_NAMES \
                    and stmt.name not in BUILTIN_NAMES:
                calls.add(stmt.name)
            elif isinstance(stmt, If):
                walk(stmt.then)
                walk(stmt.orelse)
            elif isinstance(stmt, Repeat):
                walk(stmt.body)

    walk(function.body)
    return calls


def _find_cycle(function: Function, registry: ApiRegistry) -> list[str] | None:
    """DFS over the skill-call graph rooted at `function`."""
    graph: dict[str, set[str]] = {function.name: _skill_calls(function, registry)}

    def edges(name: str) -> set[str]:
        if name not in graph:
            if name in registry.skills:
                graph[name] = _skill_calls(registry.skill_function(name), registry)
            else:
                graph[name] = set()
        return graph[name]

    path: list[str] = []
    on_path: set[str] = set()
    done: set[str] = set()

    def dfs(name: str) -> list[str] | None:
        path.append(name)
        on_path.add(name)
        for callee in sorted(edges(name)):
            if callee in on_path:
                return path[path.index(callee):] + [callee]
            if callee not in done:
                cycle = dfs(callee)
                if cycle:
                    return cycle
        path.pop()
        on_path.discard(name)
        done.add(name)
        return None

    return dfs(function.name)


def analyze(program: Program | Function, registry: ApiRegistry) -> list[StaticError]:
    """Empty list iff every call resolves with valid arity and no cycle exists."""
    function = program.function if isinstance(program, Program) else program
    errors: list[StaticError] = []
    calls: set[str] = set()
    _walk_block(function.body, set(function.params), registry, errors, calls)
    cycle = _find_cycle(function, registry)
    if cycle:
        errors.append(StaticError(
            "cycle", "recursive skill calls: " + " -> ".join(cycle),
            function.line, function.col))
    return errors
