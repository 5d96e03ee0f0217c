"""Tree-walking evaluator for expressions and operation bodies.

Runtime semantics deliberately mirror the generated client runtime:
JavaScript-style truthiness and string concatenation, so the same rule
evaluated here and on a device agrees.  Evaluation is total; anything
ill-formed yields None rather than an exception.
"""

from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Any, Callable, Optional

from . import nodes as N


@dataclass
class EntityValue:
    entity: str
    fields: dict[str, Any] = field(default_factory=dict)


@dataclass
class Effect:
    kind: str  # "navigate", "push", "history", "add"
    detail: Any = None


class _Return(Exception):
    def __init__(self, value: Any):
        self.value = value


def truthy(value: Any) -> bool:
    if value is None:
        return False
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value != 0
    if isinstance(value, str):
        return len(value) > 0
    return True


def normalized_date(year: int, month: int, day: int) -> date:
    """Build a date, letting out-of-range months and days roll over."""
    year += (month - 1) // 12
    month = (month - 1) % 12 + 1
    return date(year, month, 1) + timedelta(days=day - 1)


def to_text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, EntityValue):
        return value.entity
    return str(value)


class Env:
    def __init__(self, parent: "Env | None" = None):
        self.vars: dict[str, Any] = {}
        self.parent = parent

    def get(self, name: str) -> tuple[bool, Any]:
        env: Env | None = self
        while env is not None:
            if name in env.vars:
                return True, env.vars[name]
            env = env.parent
        return False, None

    def set(self, name: str, value: Any) -> None:
        env: Env | None = self
        while env is not None:
            if name in env.vars:
                env.vars[name] = value
                return
            env = env.parent
        self.vars[name] = value

    def declare(self, name: str, value: Any) -> None:
        self.vars[name] = value


ServiceFn = Callable[[str], Any]


class Interpreter:
    """Evaluates against a module, a context-variable mapping and an
    optional service callback for outbound HTTP."""

    def __init__(
        self,
        module: Optional[N.Module] = None,
        context: Optional[dict[str, Any]] = None,
        service: Optional[ServiceFn] = None,
    ):
        self.module = module or N.Module()
        self.context = context or {}
        self.service = service
        # Optional hook: resolve Entity.fromX(args) against live data
        # before falling back to a defaults-initialized instance.
        self.entity_lookup: Optional[Callable[[str, list], Optional[EntityValue]]] = None
        self.effects: list[Effect] = []
        self.collected: list[Any] = []
        self.errors: list[str] = []

    # --- entities ---------------------------------------------------------

    def instantiate(self, entity_name: str) -> EntityValue:
        value = EntityValue(entity=entity_name)
        decl = self.module.entity(entity_name)
        if decl is None:
            return value
        for prop in decl.properties:
            if prop.tags:
                value.fields[prop.name] = list(prop.tags)
            elif prop.default is not None:
                value.fields[prop.name] = self.coerce_default(prop)
            else:
                value.fields[prop.name] = None
        return value

    def coerce_default(self, prop: N.PropertyDecl) -> Any:
        expr = prop.default
        raw: Any = None
        if isinstance(expr, N.StringLit):
            raw = expr.value
        elif isinstance(expr, N.IntLit):
            raw = expr.value
        elif isinstance(expr, N.BoolLit):
            raw = expr.value
        if (
            prop.declared is not None
            and prop.declared.name == "DateTime"
            and isinstance(raw, str)
        ):
            try:
                return date.fromisoformat(raw)
            except ValueError:
                return raw
        return raw

    # --- operations -------------------------------------------------------

    def call_operation(self, name: str, args: list[Any]) -> Any:
        op = self.module.operation(name)
        if op is None:
            self.errors.append(f"unknown operation {name!r}")
            return None
        env = Env()
        self.bind_module_vars(env)
        for param, value in zip(op.params, args):
            env.declare(param.name, value)
        for param in op.params[len(args):]:
            env.declare(param.name, None)
        try:
            self.exec_stmts(op.body, Env(env))
        except _Return as ret:
            return ret.value
        return None

    def bind_module_vars(self, env: Env) -> None:
        for mv in self.module.module_vars:
            if mv.decl is not None:
                env.declare(mv.decl.name, self.eval(mv.decl.init, env))

    # --- statements -------------------------------------------------------

    def exec_stmts(self, stmts: list, env: Env) -> None:
        for stmt in stmts:
            self.exec_stmt(stmt, env)

    def exec_stmt(self, stmt, env: Env) -> None:
        if isinstance(stmt, N.VarDecl):
            env.declare(stmt.name, self.eval(stmt.init, env))
        elif isinstance(stmt, N.Assign):
            self.assign(stmt.target, self.eval(stmt.value, env), env)
        elif isinstance(stmt, N.Foreach):
            items = self.eval(stmt.iterable, env)
            if not isinstance(items, list):
                items = [] if items is None else [items]
            for item in items:
                inner = Env(env)
                inner.declare(stmt.var, item)
                for sub in stmt.body:
                    if isinstance(sub, N.Stmt):
                        self.exec_stmt(sub, inner)
        elif isinstance(stmt, N.IfStmt):
            for cond, body in stmt.branches:
                if truthy(self.eval(cond, env)):
                    self.exec_stmts(body, Env(env))
                    return
            if stmt.else_body is not None:
                self.exec_stmts(stmt.else_body, Env(env))
        elif isinstance(stmt, N.ReturnStmt):
            raise _Return(self.eval(stmt.value, env) if stmt.value else None)
        elif isinstance(stmt, N.ExprStmt):
            self.eval(stmt.expr, env)

    def assign(self, target, value: Any, env: Env) -> None:
        if isinstance(target, N.Name):
            env.set(target.ident, value)
            return
        if isinstance(target, N.Member):
            obj = self.eval(target.obj, env)
            if isinstance(obj, EntityValue):
                obj.fields[target.name] = value
            elif isinstance(obj, dict):
                obj[target.name] = value
            else:
                self.errors.append(f"cannot assign member {target.name!r}")
            return
        self.errors.append("invalid assignment target")

    # --- expressions ------------------------------------------------------

    def eval(self, expr, env: Env) -> Any:
        if expr is None:
            return None
        try:
            return self._eval(expr, env)
        except _Return:
            raise
        except Exception as exc:  # defensive: evaluation is total
            self.errors.append(f"evaluation error: {exc}")
            return None

    def _eval(self, expr, env: Env) -> Any:
        if isinstance(expr, N.StringLit):
            return expr.value
        if isinstance(expr, N.IntLit):
            return expr.value
        if isinstance(expr, N.BoolLit):
            return expr.value
        if isinstance(expr, N.Name):
            return self.eval_name(expr.ident, env)
        if isinstance(expr, N.Member):
            return self.eval_member(expr, env)
        if isinstance(expr, N.Call):
            return self.eval_call(expr, env)
        if isinstance(expr, N.Unary):
            value = self.eval(expr.operand, env)
            if expr.op == "!":
                return not truthy(value)
            if isinstance(value, int) and not isinstance(value, bool):
                return -value
            return None
        if isinstance(expr, N.Binary):
            return self.eval_binary(expr, env)
        if isinstance(expr, N.NewExpr):
            call = expr.call
            name = call.callee.ident if isinstance(call.callee, N.Name) else "?"
            args = [self.eval(a.value, env) for a in call.args]
            self.effects.append(Effect("push", {"screen": name, "args": args}))
            return None
        if isinstance(expr, N.BlockExpr):
            self.exec_stmts(expr.stmts, Env(env))
            return None
        return None

    def eval_name(self, ident: str, env: Env) -> Any:
        found, value = env.get(ident)
        if found:
            return value
        if ident in self.context:
            return self.context[ident]
        return None

    def eval_member(self, expr: N.Member, env: Env) -> Any:
        path = self.flatten(expr)
        if path is not None:
            head = path.split(".", 1)[0]
            bound, _ = env.get(head)
            if not bound and path in self.context:
                return self.context[path]
        obj = self.eval(expr.obj, env)
        if isinstance(obj, EntityValue):
            return obj.fields.get(expr.name)
        if isinstance(obj, dict):
            return obj.get(expr.name)
        if isinstance(obj, date):
            return None  # date members are methods, handled at call sites
        return None

    @staticmethod
    def flatten(expr) -> str | None:
        parts: list[str] = []
        while isinstance(expr, N.Member):
            parts.append(expr.name)
            expr = expr.obj
        if isinstance(expr, N.Name):
            parts.append(expr.ident)
            return ".".join(reversed(parts))
        return None

    def eval_call(self, call: N.Call, env: Env) -> Any:
        callee = call.callee
        args = [self.eval(a.value, env) for a in call.args]

        if isinstance(callee, N.Name):
            name = callee.ident
            bound, _ = env.get(name)
            if not bound:
                if name == "exist":
                    return args[0] is not None if args else False
                if name == "add":
                    if args:
                        self.collected.append(args[0])
                        self.effects.append(Effect("add", args[0]))
                    return None
                if name == "select":
                    return args[0] if args else None
                if name == "navigate":
                    target = None
                    if call.args and isinstance(call.args[0].value, N.Name):
                        target = call.args[0].value.ident
                    self.effects.append(Effect("navigate", target))
                    return None
                if name == "httpRequest":
                    if self.service is not None:
                        return self.service(to_text(args[0]) if args else "")
                    return None
                if self.module.operation(name) is not None:
                    return self.call_operation(name, args)
            return None

        if isinstance(callee, N.Member):
            path = self.flatten(callee)
            if path in ("history.go", "history.back"):
                delta = args[0] if args else -1
                self.effects.append(Effect("history", delta))
                return None
            if path == "DateTime.create" and len(args) == 3:
                try:
                    return normalized_date(int(args[0]), int(args[1]), int(args[2]))
                except (TypeError, ValueError):
                    return None
            receiver = self.eval(callee.obj, env)
            if isinstance(receiver, date):
                if callee.name == "getYear":
                    return receiver.year
                if callee.name == "getMonth":
                    return receiver.month
                if callee.name == "getDate":
                    return receiver.day
            if isinstance(receiver, str) and callee.name in (
                "getYear",
                "getMonth",
                "getDate",
            ):
                try:
                    parsed = date.fromisoformat(receiver)
                except ValueError:
                    return None
                return {
                    "getYear": parsed.year,
                    "getMonth": parsed.month,
                    "getDate": parsed.day,
                }[callee.name]
            # Entity factory: Entity.fromX(args) makes a fresh instance.
            if (
                isinstance(callee.obj, N.Name)
                and self.module.entity(callee.obj.ident) is not None
                and callee.name.startswith("from")
            ):
                if self.entity_lookup is not None:
                    found = self.entity_lookup(callee.obj.ident, args)
                    if found is not None:
                        return found
                return self.instantiate(callee.obj.ident)
            return None
        return None

    def eval_binary(self, expr: N.Binary, env: Env) -> Any:
        op = expr.op
        if op == "&&":
            left = self.eval(expr.left, env)
            if not truthy(left):
                return False
            return truthy(self.eval(expr.right, env))
        if op == "||":
            left = self.eval(expr.left, env)
            if truthy(left):
                return True
            return truthy(self.eval(expr.right, env))

        left = self.eval(expr.left, env)
        right = self.eval(expr.right, env)
        if op == "==":
            return self.equals(left, right)
        if op == "!=":
            return not self.equals(left, right)
        if op in ("<", ">", "<=", ">="):
            return self.ordered(op, left, right)
        if op == "in":
            if isinstance(right, list):
                return any(self.equals(left, item) for item in right)
            if isinstance(right, str):
                return to_text(left) in right
            return False
        if op == "+":
            if isinstance(left, str) or isinstance(right, str):
                return to_text(left) + to_text(right)
            if self._both_ints(left, right):
                return left + right
            return None
        if op == "-" and self._both_ints(left, right):
            return left - right
        if op == "*" and self._both_ints(left, right):
            return left * right
        if op == "%" and self._both_ints(left, right) and right != 0:
            return left % right
        return None

    @staticmethod
    def _both_ints(left: Any, right: Any) -> bool:
        return (
            isinstance(left, int)
            and isinstance(right, int)
            and not isinstance(left, bool)
            and not isinstance(right, bool)
        )

    def equals(self, left: Any, right: Any) -> bool:
        if isinstance(left, date) or isinstance(right, date):
            return to_text(left) == to_text(right)
        if type(left) is bool or type(right) is bool:
            return left is right if (type(left) is bool and type(right) is bool) else False
        if left is None or right is None:
            return left is None and right is None
        if isinstance(left, EntityValue) and isinstance(right, EntityValue):
            return left is right
        if type(left) is not type(right):
            return False
        return left == right

    def ordered(self, op: str, left: Any, right: Any) -> bool:
        if isinstance(left, date) and isinstance(right, date):
            pass
        elif self._both_ints(left, right):
            pass
        else:
            return False
        if op == "<":
            return left < right
        if op == ">":
            return left > right
        if op == "<=":
            return left <= right
        return left >= right


def evaluate_condition(expr, context: dict[str, Any]) -> bool:
    """Evaluate a rule condition against a context-variable mapping."""
    interp = Interpreter(context=context)
    return truthy(interp.eval(expr, Env()))
