"""Sandboxed tree-walking interpreter: skill programs act only on a World."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..craftworld.world import DIRECTIONS, ActionError, AgentState, World
from .api import ApiRegistry
from .ast import BinOp, CallExpr, CallStmt, Expr, Function, If, Let, Lit, Program, Repeat, Say, Stmt, Unary, Var

DEFAULT_BUDGET = 2000
MAX_CALL_DEPTH = 64


@dataclass
class ExecError:
    kind: str  # budget_exceeded | type | unknown_block | precondition | ...
    message: str
    line: int = 0
    col: int = 0
    trace: list[str] = field(default_factory=list)

    def render(self) -> str:
        where = f" at line {self.line}, column {self.col}" if self.line else ""
        text = f"ExecutionError[{self.kind}]{where}: {self.message}"
        if self.trace:
            text += "\n  call trace: " + " -> ".join(self.trace)
        return text


@dataclass
class ExecutionOutcome:
    feedback: list[str]
    error: Optional[ExecError]
    primitive_trace: list[tuple[str, dict, dict]]
    end_state: AgentState
    steps_used: int

    @property
    def ok(self) -> bool:
        return self.error is None


class _Halt(Exception):
    def __init__(self, error: ExecError):
        self.error = error


class _Env:
    """Lexical block scopes within one function frame."""

    def __init__(self, base: dict):
        self.scopes = [dict(base)]

    def push(self) -> None:
        self.scopes.append({})

    def pop(self) -> None:
        self.scopes.pop()

    def define(self, name: str, value) -> None:
        self.scopes[-1][name] = value

    def lookup(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise KeyError(name)


class Interpreter:
    def __init__(self, world: World, registry: ApiRegistry, budget: int = DEFAULT_BUDGET):
        self.world = world
        self.registry = registry
        self.budget = budget
        self.steps = 0
        self.feedback: list[str] = []
        self.trace: list[tuple[str, dict, dict]] = []
        self.call_stack: list[str] = []

    # ----- expression evaluation -----

    def _fail(self, kind: str, message: str, node) -> None:
        raise _Halt(ExecError(kind, message, getattr(node, "line", 0), getattr(node, "col", 0),
                              list(self.call_stack)))

    def eval(self, expr: Expr, env: _Env):
        if isinstance(expr, Lit):
            return expr.value
        if isinstance(expr, Var):
            try:
                return env.lookup(expr.name)
            except KeyError:
                self._fail("unknown_variable", f"unknown variable: {expr.name}", expr)
        if isinstance(expr, Unary):
            value = self.eval(expr.operand, env)
            if expr.op == "-":
                if not isinstance(value, int) or isinstance(value, bool):
                    self._fail("type", "unary - needs a number", expr)
                return -value
            if not isinstance(value, bool):
                self._fail("type", "not needs a boolean", expr)
            return not value
        if isinstance(expr, BinOp):
            return self._eval_binop(expr, env)
        if isinstance(expr, CallExpr):
            return self._eval_builtin(expr, env)
        raise TypeError(f"unknown expression node: {expr!r}")

    def _eval_binop(self, expr: BinOp, env: _Env):
        op = expr.op
        if op in ("and", "or"):
            left = self.eval(expr.left, env)
            if not isinstance(left, bool):
                self._fail("type", f"{op} needs boolean operands", expr)
            if op == "and" and not left:
                return False
            if op == "or" and left:
                return True
            right = self.eval(expr.right, env)
            if not isinstance(right, bool):
                self._fail("type", f"{op} needs boolean operands", expr)
            return right
        left = self.eval(expr.left, env)
        right = self.eval(expr.right, env)
        if op in ("==", "!="):
            result = left == right
            return result if op == "==" else not result
        if op == "+" and isinstance(left, str) and isinstance(right, str):
            return left + right
        for side in (left, right):
            if not isinstance(side, int) or isinstance(side, bool):
                self._fail("type", f"operator {op} needs numbers, got {side!r}", expr)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0:
                self._fail("division_by_zero", "division by zero", expr)
            return left // right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        raise TypeError(f"unknown operator {op}")

    def _eval_builtin(self, expr: CallExpr, env: _Env):
        args = [self.eval(a, env) for a in expr.args]
        name = expr.name
        world = self.world
        if name == "inventory_count":
            return world.inventory_count(self._want_str(args[0], expr))
        if name == "block_nearby":
            world._sense()
            return world.block_nearby(self._want_str(args[0], expr))
        if name == "entity_nearby":
            world._sense()
            return world.entity_nearby(self._want_str(args[0], expr))
        if name == "position_x":
            return world.position[0]
        if name == "position_y":
            return world.position[1]
        if name == "position_z":
            return world.position[2]
        if name == "health":
            return world.health
        if name == "hunger":
            return world.hunger
        self._fail("unknown_callable", f"unknown builtin: {name}", expr)

    def _want_str(self, value, node) -> str:
        if not isinstance(value, str):
            self._fail("type", f"expected a name string, got {value!r}", node)
        return value

    def _want_int(self, value, node) -> int:
        if not isinstance(value, int) or isinstance(value, bool):
            self._fail("type", f"expected an integer, got {value!r}", node)
        return value

    # ----- statement execution -----

    def exec_block(self, body: list[Stmt], env: _Env) -> None:
        env.push()
        try:
            for stmt in body:
                self.exec_stmt(stmt, env)
        finally:
            env.pop()

    def exec_stmt(self, stmt: Stmt, env: _Env) -> None:
        if isinstance(stmt, Let):
            env.define(stmt.name, self.eval(stmt.value, env))
        elif isinstance(stmt, Say):
            value = self.eval(stmt.value, env)
            if isinstance(value, bool):
                value = "true" if value else "false"
            self.feedback.append(str(value))
        elif isinstance(stmt, If):
            cond = self.eval(stmt.cond, env)
            if not isinstance(cond, bool):
                self._fail("type", "if condition must be boolean", stmt)
            self.exec_block(stmt.then if cond else stmt.orelse, env)
        elif isinstance(stmt, Repeat):
            for _ in range(stmt.count):
                self.exec_block(stmt.body, env)
        elif isinstance(stmt, CallStmt):
            self.exec_call(stmt, env)
        else:
            raise TypeError(f"unknown statement node: {stmt!r}")

    def exec_call(self, stmt: CallStmt, env: _Env) -> None:
        name = stmt.name
        if name in self.registry.primitives:
            self._exec_primitive(stmt, env)
            return
        if name in self.registry.skills:
            function = self.registry.skill_function(name)
            if len(self.call_stack) >= MAX_CALL_DEPTH:
                self._fail("call_depth", "skill call depth exceeded", stmt)
            args = [self.eval(a, env) for a in stmt.args]
            if len(args) != len(function.params):
                self._fail("arity", f"{name} takes {len(function.params)} arguments, got {len(args)}", stmt)
            frame = _Env(dict(zip(function.params, args)))
            self.call_stack.append(name)
            try:
                for inner in function.body:
                    self.exec_stmt(inner, frame)
            finally:
                self.call_stack.pop()
            return
        self._fail("unknown_callable", f"unknown callable: {name}", stmt)

    def _bind(self, stmt: CallStmt, env: _Env, lazy_names: tuple[str, ...] = ()) -> dict:
        signature = self.registry.primitives[stmt.name]
        if not (signature.min_args <= len(stmt.args) <= signature.max_args):
            self._fail("arity",
                       f"{stmt.name} takes {signature.min_args}..{signature.max_args} arguments, "
                       f"got {len(stmt.args)}", stmt)
        bound: dict = {}
        for i, param in enumerate(signature.params):
            if i < len(stmt.args):
                node = stmt.args[i]
                bound[param.name] = node if param.name in lazy_names else self.eval(node, env)
            else:
                bound[param.name] = None if param.name in lazy_names else param.default
        return bound

    def _charge(self, stmt: CallStmt) -> None:
        if self.steps >= self.budget:
            raise _Halt(ExecError("budget_exceeded",
                                  f"primitive budget of {self.budget} calls exhausted",
                                  stmt.line, stmt.col, list(self.call_stack)))
        self.steps += 1

    def _exec_primitive(self, stmt: CallStmt, env: _Env) -> None:
        name = stmt.name
        lazy = ("until",) if name == "explore_until" else ()
        bound = self._bind(stmt, env, lazy_names=lazy)
        self._charge(stmt)
        world = self.world
        try:
            if name == "mine_block":
                result = world.mine_block(self._want_str(bound["name"], stmt),
                                          self._want_int(bound["count"], stmt))
            elif name == "craft_item":
                result = world.craft_item(self._want_str(bound["name"], stmt),
                                          self._want_int(bound["count"], stmt))
            elif name == "smelt_item":
                result = world.smelt_item(self._want_str(bound["name"], stmt),
                                          self._want_str(bound["fuel"], stmt),
                                          self._want_int(bound["count"], stmt))
            elif name == "place_item":
                dx = self._want_int(bound["dx"], stmt)
                dz = self._want_int(bound["dz"], stmt)
                if (dx, dz) == (0, 0):
                    position = world.find_free_spot_near()
                else:
                    x, y, z = world.position
                    position = (x + dx, y, z + dz)
                result = world.place_item(self._want_str(bound["name"], stmt), position)
            elif name == "kill_mob":
                result = world.kill_mob(self._want_str(bound["name"], stmt),
                                        self._want_int(bound["timeout"], stmt))
            elif name == "explore_until":
                direction = self._want_str(bound["direction"], stmt)
                if direction not in DIRECTIONS:
                    self._fail("bad_direction",
                               f"unknown direction {direction!r}; use one of " + ", ".join(sorted(DIRECTIONS)),
                               stmt)
                until = bound["until"]
                predicate = None
                if until is not None and until is not False:
                    def predicate(_world, _expr=until, _env=env):
                        value = self.eval(_expr, _env) if not isinstance(_expr, bool) else _expr
                        if not isinstance(value, bool):
                            self._fail("type", "explore_until condition must be boolean", stmt)
                        return value
                result = world.explore_until(DIRECTIONS[direction],
                                             self._want_int(bound["max_ticks"], stmt), predicate)
            elif name == "goto":
                result = world.goto(self._want_int(bound["x"], stmt),
                                    self._want_int(bound["y"], stmt),
                                    self._want_int(bound["z"], stmt),
                                    self._want_int(bound["range"], stmt))
            elif name in ("get_from_chest", "deposit_to_chest"):
                position = (self._want_int(bound["x"], stmt),
                            self._want_int(bound["y"], stmt),
                            self._want_int(bound["z"], stmt))
                items = {self._want_str(bound["name"], stmt): self._want_int(bound["count"], stmt)}
                direction = "get" if name == "get_from_chest" else "deposit"
                result = world.chest_transfer(position, items, direction)
            elif name == "eat_item":
                result = world.eat_item(self._want_str(bound["name"], stmt))
            elif name == "equip_item":
                result = world.equip_item(self._want_str(bound["name"], stmt))
            else:
                self._fail("unknown_callable", f"unhandled primitive {name}", stmt)
        except ActionError as err:
            raise _Halt(ExecError(err.kind, err.message, stmt.line, stmt.col, list(self.call_stack)))
        self.feedback.extend(result.messages)
        safe_args = {k: (v if isinstance(v, (int, str, bool, type(None))) else repr(v))
                     for k, v in bound.items()}
        self.trace.append((name, safe_args, dict(result.data)))


def execute(program: Program | Function, world: World, registry: ApiRegistry,
            budget: int = DEFAULT_BUDGET, args: Optional[list] = None) -> ExecutionOutcome:
    """Run a parsed program against the world; always recycles stations at the end."""
    function = program.function if isinstance(program, Program) else program
    interp = Interpreter(world, registry, budget)
    world.begin_program()
    error: Optional[ExecError] = None
    frame = _Env(dict(zip(function.params, args or [])))
    if len(function.params) != len(args or []):
        error = ExecError("arity", f"{function.name} takes {len(function.params)} arguments", 0, 0, [])
    else:
        try:
            for stmt in function.body:
                interp.exec_stmt(stmt, frame)
        except _Halt as halt:
            error = halt.error
    recycled = world.recycle_stations()
    interp.feedback.extend(recycled.messages)
    return ExecutionOutcome(
        feedback=interp.feedback,
        error=error,
        primitive_trace=interp.trace,
        end_state=world.observe(),
        steps_used=interp.steps,
    )


def static_call_bound(function: Function | Program, registry: ApiRegistry) -> int:
    """Worst-case primitive-call count; finite because loops are bounded and
    the skill-call graph is acyclic."""
    if isinstance(function, Program):
        function = function.function

    def block(stmts: list[Stmt]) -> int:
        total = 0
        for stmt in stmts:
            if isinstance(stmt, CallStmt):
                if stmt.name in registry.primitives:
                    total += 1
                elif stmt.name in registry.skills:
                    total += static_call_bound(registry.skill_function(stmt.name), registry)
            elif isinstance(stmt, If):
                total += max(block(stmt.then), block(stmt.orelse))
            elif isinstance(stmt, Repeat):
                total += stmt.count * block(stmt.body)
        return total

    return block(function.body)
