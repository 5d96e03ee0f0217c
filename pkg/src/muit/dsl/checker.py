"""Semantic analysis: name resolution, type checking and lint warnings.

The checker walks a parsed module and records a type for every
expression node (keyed by object identity).  It never raises on bad
input; problems become diagnostics.
"""

from dataclasses import dataclass, field
from datetime import date

from . import builtins as B
from . import nodes as N
from . import types as T
from .diagnostics import DiagnosticSink

_ETYPE = "etype"       # an entity name used as a namespace (Task.fromX)
_NAMESPACE = "namespace"
_SCREENREF = "screenref"
_WIDGETREF = "widgetref"
_TOUCHREF = "touchref"
_OPREF = "opref"

_ISO_DATE_OK = True


def _is_iso_date(text: str) -> bool:
    try:
        date.fromisoformat(text)
        return True
    except ValueError:
        return False


@dataclass
class CheckResult:
    module: N.Module
    sink: DiagnosticSink
    expr_types: dict[int, T.Type] = field(default_factory=dict)
    entity_props: dict[str, dict[str, T.Type]] = field(default_factory=dict)
    entity_defaults: dict[str, dict[str, object]] = field(default_factory=dict)
    entity_tags: dict[str, dict[str, list[str]]] = field(default_factory=dict)
    widget_members: dict[str, dict[str, T.Type]] = field(default_factory=dict)
    module_var_types: dict[str, T.Type] = field(default_factory=dict)
    remote_operations: set[str] = field(default_factory=set)
    used_widgets: set[str] = field(default_factory=set)

    @property
    def ok(self) -> bool:
        return not self.sink.has_errors()

    def type_of(self, node: N.Expr) -> T.Type:
        return self.expr_types.get(id(node), T.ANY)


class _Scope:
    def __init__(self, parent: "_Scope | None" = None):
        self.vars: dict[str, T.Type] = {}
        self.parent = parent

    def lookup(self, name: str) -> T.Type | None:
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.vars:
                return scope.vars[name]
            scope = scope.parent
        return None

    def declare(self, name: str, typ: T.Type) -> None:
        self.vars[name] = typ

    def assign_site(self, name: str) -> "_Scope | None":
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.vars:
                return scope
            scope = scope.parent
        return None


class Checker:
    def __init__(self, module: N.Module, sink: DiagnosticSink):
        self.module = module
        self.sink = sink
        self.result = CheckResult(module=module, sink=sink)
        self.entity_names: set[str] = set()
        self.screen_names: set[str] = set()
        self.widget_names: set[str] = set()
        self.touch_names: set[str] = set()
        self.operation_index: dict[str, N.OperationDecl] = {}

    # --- entry point ------------------------------------------------------

    def run(self) -> CheckResult:
        self.collect_declarations()
        self.check_entities()
        self.module_scope = _Scope()
        self.check_module_vars()
        for op in self.module.operations:
            self.check_operation(op)
        self.mark_remote_operations()
        for widget in self.module.widgets:
            self.check_widget(widget)
        for touch in self.module.touches:
            self.check_touch(touch)
        for screen in self.module.screens:
            self.check_screen(screen)
        self.lint_module()
        return self.result

    def collect_declarations(self) -> None:
        seen: dict[str, N.Decl] = {}
        for decl in self.module.decls:
            name = getattr(decl, "name", None)
            if isinstance(decl, N.ModuleVar):
                name = decl.decl.name if decl.decl else None
            if name is None:
                continue
            if name in seen and not isinstance(decl, N.ModuleVar):
                self.sink.error(
                    "E2001",
                    f"duplicate declaration of {name!r}",
                    decl.line,
                    decl.column,
                    len(name),
                )
                continue
            seen[name] = decl
            if isinstance(decl, N.EntityDecl):
                self.entity_names.add(name)
            elif isinstance(decl, N.OperationDecl):
                self.operation_index[name] = decl
            elif isinstance(decl, N.ScreenDecl):
                self.screen_names.add(name)
            elif isinstance(decl, N.WidgetDecl):
                self.widget_names.add(name)
            elif isinstance(decl, N.TouchDecl):
                self.touch_names.add(name)

    # --- types ------------------------------------------------------------

    def resolve_type_ref(self, ref: N.TypeRef | None) -> T.Type:
        if ref is None:
            return T.ANY
        if ref.name == "list":
            if ref.arg is None:
                self.sink.error("E2002", "list type requires an element type", ref.line, ref.column)
                return T.list_type(T.ANY)
            return T.list_type(self.resolve_type_ref(ref.arg))
        if ref.name in T.PRIMITIVES:
            return T.PRIMITIVES[ref.name]
        if ref.name in self.entity_names:
            return T.entity_type(ref.name)
        self.sink.error(
            "E2002", f"unknown type {ref.name!r}", ref.line, ref.column, len(ref.name)
        )
        return T.ANY

    # --- entities ---------------------------------------------------------

    def check_entities(self) -> None:
        for entity in self.module.entities:
            props: dict[str, T.Type] = {}
            defaults: dict[str, object] = {}
            tags: dict[str, list[str]] = {}
            for prop in entity.properties:
                if prop.name in props:
                    self.sink.error(
                        "E2004",
                        f"duplicate property {prop.name!r} in entity {entity.name!r}",
                        prop.line,
                        prop.column,
                        len(prop.name),
                    )
                    continue
                if prop.tags:
                    props[prop.name] = T.list_type(T.STRING)
                    tags[prop.name] = list(prop.tags)
                    continue
                ptype = self.resolve_type_ref(prop.declared)
                props[prop.name] = ptype
                if prop.default is not None:
                    value = self.check_default(entity, prop, ptype)
                    if value is not None:
                        defaults[prop.name] = value
            self.result.entity_props[entity.name] = props
            self.result.entity_defaults[entity.name] = defaults
            self.result.entity_tags[entity.name] = tags

    def check_default(self, entity: N.EntityDecl, prop: N.PropertyDecl, ptype: T.Type):
        expr = prop.default
        if isinstance(expr, N.StringLit):
            if ptype == T.STRING:
                return expr.value
            if ptype == T.DATETIME:
                if _is_iso_date(expr.value):
                    return expr.value
                self.sink.error(
                    "E2006",
                    f"default for {prop.name!r} is not a calendar date",
                    expr.line,
                    expr.column,
                    len(expr.value),
                )
                return None
        if isinstance(expr, N.IntLit) and ptype == T.INT:
            return expr.value
        if isinstance(expr, N.BoolLit) and ptype == T.BOOL:
            return expr.value
        self.sink.error(
            "E2007",
            f"default for {prop.name!r} does not match its type {ptype}",
            expr.line if expr else prop.line,
            expr.column if expr else prop.column,
        )
        return None

    # --- module vars ------------------------------------------------------

    def check_module_vars(self) -> None:
        for mv in self.module.module_vars:
            decl = mv.decl
            if decl is None:
                continue
            typ = self.check_expr(decl.init, self.module_scope) if decl.init else T.ANY
            self.module_scope.declare(decl.name, typ)
            self.result.module_var_types[decl.name] = typ

    # --- operations -------------------------------------------------------

    def declare_params(self, params: list[N.Param], scope: _Scope) -> None:
        seen: set[str] = set()
        for param in params:
            if param.name in seen:
                self.sink.error(
                    "E2005",
                    f"duplicate parameter {param.name!r}",
                    param.line,
                    param.column,
                    len(param.name),
                )
            seen.add(param.name)
            scope.declare(param.name, self.resolve_type_ref(param.type_ref))

    def check_operation(self, op: N.OperationDecl) -> None:
        scope = _Scope(self.module_scope)
        self.declare_params(op.params, scope)
        self.check_statements(op.body, scope)

    def mark_remote_operations(self) -> None:
        """An operation is remote if its body (transitively) performs an
        HTTP request.  Used to decide whether an import stub is needed."""
        direct: set[str] = set()
        calls: dict[str, set[str]] = {}
        for op in self.module.operations:
            called: set[str] = set()
            self.scan_calls(op.body, called)
            calls[op.name] = called
            if "httpRequest" in called:
                direct.add(op.name)
        remote = set(direct)
        changed = True
        while changed:
            changed = False
            for name, called in calls.items():
                if name not in remote and called & remote:
                    remote.add(name)
                    changed = True
        self.result.remote_operations = remote

    def scan_calls(self, node, found: set[str]) -> None:
        if isinstance(node, list):
            for item in node:
                self.scan_calls(item, found)
            return
        if isinstance(node, N.Call):
            callee = node.callee
            if isinstance(callee, N.Name):
                found.add(callee.ident)
            self.scan_calls(callee, found)
            for arg in node.args:
                self.scan_calls(arg.value, found)
            return
        if isinstance(node, N.Node):
            for value in vars(node).values():
                if isinstance(value, (N.Node, list)):
                    self.scan_calls(value, found)
                elif isinstance(value, tuple):
                    self.scan_calls(list(value), found)

    # --- widgets and gestures --------------------------------------------

    def check_widget(self, widget: N.WidgetDecl) -> None:
        if widget.kind not in B.WIDGET_KINDS:
            self.sink.error(
                "E2108",
                f"unknown widget kind {widget.kind!r}",
                widget.line,
                widget.column,
                len(widget.kind),
            )
        scope = _Scope(self.module_scope)
        self.declare_params(widget.params, scope)
        members: dict[str, T.Type] = {}
        for param in widget.params:
            members[param.name] = self.resolve_type_ref(param.type_ref)
        self.check_screen_items(widget.items, scope, screen=None)
        self.collect_widget_members(widget.items, scope, members)
        self.result.widget_members[widget.name] = members

    def collect_widget_members(self, items, scope: _Scope, members: dict[str, T.Type]) -> None:
        for item in items:
            if isinstance(item, N.Assign) and isinstance(item.target, N.Name):
                typ = scope.lookup(item.target.ident)
                members[item.target.ident] = typ if typ is not None else T.ANY
            elif isinstance(item, N.VarDecl):
                typ = scope.lookup(item.name)
                members[item.name] = typ if typ is not None else T.ANY
            elif isinstance(item, N.MarkupItem):
                self.collect_markup_members(item, scope, members)
            elif isinstance(item, (N.HeaderItem, N.RuleClause)):
                self.collect_widget_members(item.items, scope, members)
            elif isinstance(item, N.RuleItem):
                for clause in item.clauses:
                    self.collect_widget_members(clause.items, scope, members)
                if item.else_items:
                    self.collect_widget_members(item.else_items, scope, members)

    def collect_markup_members(self, item: N.MarkupItem, scope: _Scope, members) -> None:
        for attr in item.attrs:
            if isinstance(attr.value, N.Name):
                typ = scope.lookup(attr.value.ident)
                if typ is not None:
                    members[attr.value.ident] = typ
        for child in item.children:
            self.collect_markup_members(child, scope, members)

    def check_touch(self, touch: N.TouchDecl) -> None:
        if touch.kind not in B.TOUCH_KINDS:
            self.sink.error(
                "E2109",
                f"unknown gesture kind {touch.kind!r}",
                touch.line,
                touch.column,
                len(touch.kind),
            )
        scope = _Scope(self.module_scope)
        self.declare_params(touch.params, scope)
        self.check_statements(touch.body, scope)

    # --- screens ----------------------------------------------------------

    def check_screen(self, screen: N.ScreenDecl) -> None:
        scope = _Scope(self.module_scope)
        self.declare_params(screen.params, scope)
        self.check_screen_items(screen.items, scope, screen)

    def check_screen_items(self, items, scope: _Scope, screen) -> None:
        for item in items:
            self.check_screen_item(item, scope, screen)

    def check_screen_item(self, item, scope: _Scope, screen) -> None:
        if isinstance(item, N.HeaderItem):
            if item.title is not None:
                self.check_expr(item.title, scope)
            self.check_screen_items(item.items, scope, screen)
        elif isinstance(item, N.ImportItem):
            for arg in item.args:
                if isinstance(arg, N.Name) and arg.ident in self.widget_names:
                    self.result.used_widgets.add(arg.ident)
                elif isinstance(arg, N.Name) and arg.ident in self.touch_names:
                    pass
                else:
                    self.sink.error(
                        "E2113",
                        "import() takes declared widget or gesture names",
                        arg.line,
                        arg.column,
                    )
        elif isinstance(item, N.HandlerItem):
            for element in item.items:
                self.check_element(element, scope)
        elif isinstance(item, N.RuleItem):
            for clause in item.clauses:
                cond_type = self.check_expr(clause.cond, scope)
                if cond_type not in (T.BOOL, T.ANY):
                    self.sink.error(
                        "E2107",
                        f"rule condition must be boolean, got {cond_type}",
                        clause.line,
                        clause.column,
                    )
                self.check_screen_items(clause.items, scope, screen)
            if item.else_items is not None:
                self.check_screen_items(item.else_items, scope, screen)
        elif isinstance(item, N.ElementItem):
            self.check_element(item, scope)
        elif isinstance(item, N.MarkupItem):
            self.check_markup(item, scope)
        elif isinstance(item, N.Stmt):
            self.check_statement(item, scope)

    def check_element(self, element: N.ElementItem, scope: _Scope) -> None:
        callee = element.callee
        if isinstance(callee, N.Name):
            ident = callee.ident
            known = (
                ident in B.ELEMENT_NAMES
                or ident in self.widget_names
                or scope.lookup(ident) is not None
            )
            if ident in self.widget_names:
                self.result.used_widgets.add(ident)
            if not known:
                self.sink.error(
                    "E2114",
                    f"unknown element {ident!r}",
                    callee.line,
                    callee.column,
                    len(ident),
                )
        elif callee is not None:
            self.check_expr(callee, scope)
        for arg in element.args:
            self.check_element_arg(arg, scope)

    def check_element_arg(self, arg: N.Arg, scope: _Scope) -> None:
        value = arg.value
        if arg.name in B.EVENT_ATTRS:
            if isinstance(value, N.BlockExpr):
                self.check_statements(value.stmts, _Scope(scope))
            else:
                self.sink.error(
                    "E2112",
                    f"event attribute {arg.name!r} requires a braced action",
                    arg.line,
                    arg.column,
                )
                if value is not None:
                    self.check_expr(value, scope)
        elif isinstance(value, N.BlockExpr):
            self.check_statements(value.stmts, _Scope(scope))
        elif value is not None:
            self.check_expr(value, scope)

    def check_markup(self, item: N.MarkupItem, scope: _Scope) -> None:
        for attr in item.attrs:
            if attr.value is not None and not isinstance(attr.value, N.StringLit):
                self.check_expr(attr.value, scope)
        for child in item.children:
            self.check_markup(child, scope)

    # --- statements -------------------------------------------------------

    def check_statements(self, stmts: list[N.Stmt], scope: _Scope) -> None:
        for stmt in stmts:
            self.check_statement(stmt, scope)

    def check_statement(self, stmt: N.Stmt, scope: _Scope) -> None:
        if isinstance(stmt, N.VarDecl):
            typ = self.check_expr(stmt.init, scope) if stmt.init else T.ANY
            scope.declare(stmt.name, typ)
        elif isinstance(stmt, N.Assign):
            self.check_assign(stmt, scope)
        elif isinstance(stmt, N.Foreach):
            iter_type = self.check_expr(stmt.iterable, scope)
            if iter_type.kind == "list":
                elem = iter_type.elem or T.ANY
            elif iter_type == T.ANY:
                elem = T.ANY
            else:
                self.sink.error(
                    "E2106",
                    f"foreach requires a list, got {iter_type}",
                    stmt.line,
                    stmt.column,
                )
                elem = T.ANY
            inner = _Scope(scope)
            inner.declare(stmt.var, elem)
            for item in stmt.body:
                if isinstance(item, N.Stmt):
                    self.check_statement(item, inner)
                else:
                    self.check_screen_item(item, inner, None)
        elif isinstance(stmt, N.IfStmt):
            for cond, body in stmt.branches:
                cond_type = self.check_expr(cond, scope)
                if cond_type not in (T.BOOL, T.ANY):
                    self.sink.error(
                        "E2107",
                        f"condition must be boolean, got {cond_type}",
                        cond.line,
                        cond.column,
                    )
                self.check_statements(body, _Scope(scope))
            if stmt.else_body is not None:
                self.check_statements(stmt.else_body, _Scope(scope))
        elif isinstance(stmt, N.ReturnStmt):
            if stmt.value is not None:
                self.check_expr(stmt.value, scope)
        elif isinstance(stmt, N.ExprStmt):
            if stmt.expr is not None:
                self.check_expr(stmt.expr, scope)

    def check_assign(self, stmt: N.Assign, scope: _Scope) -> None:
        value_type = self.check_expr(stmt.value, scope) if stmt.value else T.ANY
        target = stmt.target
        if isinstance(target, N.Name):
            existing = scope.lookup(target.ident)
            if existing is None:
                # Implicit declaration in the nearest scope.
                scope.declare(target.ident, value_type)
                return
            if not T.assignable(value_type, existing):
                self.sink.error(
                    "E2103",
                    f"cannot assign {value_type} to {target.ident!r} of type {existing}",
                    stmt.line,
                    stmt.column,
                )
            return
        if isinstance(target, N.Member):
            head = self.path_head(target)
            if head is not None and head in B.BUILTIN_OBJECTS:
                self.sink.error(
                    "E2105",
                    "context variables are read-only",
                    target.line,
                    target.column,
                )
                return
            target_type = self.check_expr(target, scope)
            if not T.assignable(value_type, target_type):
                self.sink.error(
                    "E2103",
                    f"cannot assign {value_type} to a slot of type {target_type}",
                    stmt.line,
                    stmt.column,
                )

    @staticmethod
    def path_head(expr: N.Expr) -> str | None:
        while isinstance(expr, N.Member):
            expr = expr.obj
        if isinstance(expr, N.Name):
            return expr.ident
        return None

    @staticmethod
    def flatten_path(expr: N.Expr) -> str | None:
        parts: list[str] = []
        while isinstance(expr, N.Member):
            parts.append(expr.name)
            expr = expr.obj
        if isinstance(expr, N.Name):
            parts.append(expr.ident)
            return ".".join(reversed(parts))
        return None

    # --- expressions ------------------------------------------------------

    def remember(self, node: N.Expr, typ: T.Type) -> T.Type:
        self.result.expr_types[id(node)] = typ
        return typ

    def check_expr(self, expr: N.Expr | None, scope: _Scope) -> T.Type:
        if expr is None:
            return T.ANY
        if isinstance(expr, N.StringLit):
            return self.remember(expr, T.STRING)
        if isinstance(expr, N.IntLit):
            return self.remember(expr, T.INT)
        if isinstance(expr, N.BoolLit):
            return self.remember(expr, T.BOOL)
        if isinstance(expr, N.Name):
            return self.remember(expr, self.resolve_name(expr, scope))
        if isinstance(expr, N.Member):
            return self.remember(expr, self.resolve_member(expr, scope))
        if isinstance(expr, N.Call):
            return self.remember(expr, self.check_call(expr, scope))
        if isinstance(expr, N.Unary):
            return self.remember(expr, self.check_unary(expr, scope))
        if isinstance(expr, N.Binary):
            return self.remember(expr, self.check_binary(expr, scope))
        if isinstance(expr, N.NewExpr):
            return self.remember(expr, self.check_new(expr, scope))
        if isinstance(expr, N.BlockExpr):
            self.check_statements(expr.stmts, _Scope(scope))
            return self.remember(expr, T.VOID)
        return T.ANY

    def resolve_name(self, expr: N.Name, scope: _Scope) -> T.Type:
        ident = expr.ident
        found = scope.lookup(ident)
        if found is not None:
            return found
        if ident in B.BUILTIN_OBJECTS:
            return T.Type(_NAMESPACE, name=ident)
        if ident in self.entity_names:
            return T.Type(_ETYPE, name=ident)
        if ident in self.screen_names:
            return T.Type(_SCREENREF, name=ident)
        if ident in self.widget_names:
            self.result.used_widgets.add(ident)
            return T.Type(_WIDGETREF, name=ident)
        if ident in self.touch_names:
            return T.Type(_TOUCHREF, name=ident)
        if ident in self.operation_index:
            return T.Type(_OPREF, name=ident)
        if ident in B.FUNCTIONS:
            return T.Type(_OPREF, name=ident)
        self.sink.error(
            "E2104", f"unknown name {ident!r}", expr.line, expr.column, len(ident)
        )
        return T.ANY

    def resolve_member(self, expr: N.Member, scope: _Scope) -> T.Type:
        path = self.flatten_path(expr)
        head = self.path_head(expr)
        if path is not None and head in B.BUILTIN_OBJECTS and scope.lookup(head) is None:
            if path in B.CONTEXT_VARS:
                return B.CONTEXT_VARS[path]
            if path in B.NAMESPACE_MEMBERS:
                return B.NAMESPACE_MEMBERS[path]
            if path in B.NAMESPACE_FUNCTIONS:
                return T.Type(_OPREF, name=path)
            prefix = path + "."
            if any(key.startswith(prefix) for key in (*B.CONTEXT_VARS, *B.NAMESPACE_FUNCTIONS)):
                return T.Type(_NAMESPACE, name=path)
            self.sink.error(
                "E2102",
                f"unknown context variable {path!r}",
                expr.line,
                expr.column,
                len(expr.name),
            )
            return T.ANY
        obj_type = self.check_expr(expr.obj, scope)
        return self.member_type(obj_type, expr)

    def member_type(self, obj_type: T.Type, expr: N.Member) -> T.Type:
        name = expr.name
        if obj_type == T.ANY:
            return T.ANY
        if obj_type.kind == "entity":
            props = self.result.entity_props.get(obj_type.name, {})
            if name in props:
                return props[name]
            self.sink.error(
                "E2102",
                f"entity {obj_type.name!r} has no property {name!r}",
                expr.line,
                expr.column,
                len(name),
            )
            return T.ANY
        if obj_type.kind == _WIDGETREF:
            members = self.result.widget_members.get(obj_type.name, {})
            if name in members:
                return members[name]
            self.sink.error(
                "E2102",
                f"widget {obj_type.name!r} has no member {name!r}",
                expr.line,
                expr.column,
                len(name),
            )
            return T.ANY
        if obj_type == T.DATETIME:
            if name in B.METHODS["DateTime"]:
                return T.Type(_OPREF, name=f"DateTime#{name}")
            self.sink.error(
                "E2102",
                f"DateTime has no member {name!r}",
                expr.line,
                expr.column,
                len(name),
            )
            return T.ANY
        if obj_type.kind == _ETYPE and name.startswith("from"):
            return T.Type(_OPREF, name=f"{obj_type.name}#{name}")
        if obj_type.kind == "list":
            self.sink.error(
                "E2102",
                f"lists have no member {name!r}",
                expr.line,
                expr.column,
                len(name),
            )
            return T.ANY
        self.sink.error(
            "E2102",
            f"type {obj_type} has no member {name!r}",
            expr.line,
            expr.column,
            len(name),
        )
        return T.ANY

    def check_call(self, call: N.Call, scope: _Scope) -> T.Type:
        callee = call.callee
        arg_types = [
            self.check_arg(arg, scope) for arg in call.args
        ]
        if isinstance(callee, N.Name):
            ident = callee.ident
            if scope.lookup(ident) is None:
                if ident in B.FUNCTIONS:
                    return self.check_signature(ident, B.FUNCTIONS[ident], call, arg_types)
                if ident in self.operation_index:
                    return self.check_operation_call(
                        self.operation_index[ident], call, arg_types
                    )
                if ident in self.screen_names:
                    self.sink.error(
                        "E2110",
                        f"screen {ident!r} is opened with 'new' or navigate()",
                        call.line,
                        call.column,
                    )
                    return T.VOID
            target = self.check_expr(callee, scope)
            if target == T.ANY:
                return T.ANY
            if target.kind not in (_OPREF,):
                self.sink.error(
                    "E2003",
                    f"{ident!r} is not callable",
                    call.line,
                    call.column,
                    len(ident),
                )
            return T.ANY
        if isinstance(callee, N.Member):
            path = self.flatten_path(callee)
            head = self.path_head(callee)
            if (
                path in B.NAMESPACE_FUNCTIONS
                and head in B.BUILTIN_OBJECTS
                and scope.lookup(head) is None
            ):
                return self.check_signature(path, B.NAMESPACE_FUNCTIONS[path], call, arg_types)
            obj_type = self.check_expr(callee.obj, scope)
            if obj_type == T.ANY:
                return T.ANY
            if obj_type == T.DATETIME:
                sig = B.METHODS["DateTime"].get(callee.name)
                if sig is None:
                    self.sink.error(
                        "E2111",
                        f"DateTime has no method {callee.name!r}",
                        callee.line,
                        callee.column,
                        len(callee.name),
                    )
                    return T.ANY
                return self.check_signature(f"DateTime.{callee.name}", sig, call, arg_types)
            if obj_type.kind == _ETYPE and callee.name.startswith("from"):
                return T.entity_type(obj_type.name)
            self.sink.error(
                "E2111",
                f"type {obj_type} has no method {callee.name!r}",
                callee.line,
                callee.column,
                len(callee.name),
            )
            return T.ANY
        self.check_expr(callee, scope)
        return T.ANY

    def check_arg(self, arg: N.Arg, scope: _Scope) -> T.Type:
        if isinstance(arg.value, N.BlockExpr):
            self.check_statements(arg.value.stmts, _Scope(scope))
            return T.VOID
        return self.check_expr(arg.value, scope)

    def check_signature(
        self, name: str, sig: B.Signature, call: N.Call, arg_types: list[T.Type]
    ) -> T.Type:
        if len(arg_types) != len(sig.params):
            self.sink.error(
                "E2115",
                f"{name} expects {len(sig.params)} argument(s), got {len(arg_types)}",
                call.line,
                call.column,
            )
            return sig.result
        for i, (got, want) in enumerate(zip(arg_types, sig.params)):
            if not T.assignable(got, want):
                node = call.args[i].value
                self.sink.error(
                    "E2116",
                    f"argument {i + 1} of {name} expects {want}, got {got}",
                    node.line if node else call.line,
                    node.column if node else call.column,
                )
        return sig.result

    def check_operation_call(
        self, op: N.OperationDecl, call: N.Call, arg_types: list[T.Type]
    ) -> T.Type:
        if len(arg_types) != len(op.params):
            self.sink.error(
                "E2115",
                f"{op.name} expects {len(op.params)} argument(s), got {len(arg_types)}",
                call.line,
                call.column,
            )
            return T.ANY
        for i, (got, param) in enumerate(zip(arg_types, op.params)):
            want = self.resolve_type_ref(param.type_ref)
            if not T.assignable(got, want):
                node = call.args[i].value
                self.sink.error(
                    "E2116",
                    f"argument {i + 1} of {op.name} expects {want}, got {got}",
                    node.line if node else call.line,
                    node.column if node else call.column,
                )
        return T.ANY

    def check_unary(self, expr: N.Unary, scope: _Scope) -> T.Type:
        operand = self.check_expr(expr.operand, scope)
        if expr.op == "!":
            if operand not in (T.BOOL, T.ANY):
                self.sink.error(
                    "E2117", f"'!' requires boolean, got {operand}", expr.line, expr.column
                )
            return T.BOOL
        if operand not in (T.INT, T.ANY):
            self.sink.error(
                "E2117", f"unary '-' requires int, got {operand}", expr.line, expr.column
            )
        return T.INT

    def check_new(self, expr: N.NewExpr, scope: _Scope) -> T.Type:
        call = expr.call
        if call is None or not isinstance(call.callee, N.Name):
            self.sink.error("E2118", "'new' requires a screen name", expr.line, expr.column)
            return T.VOID
        name = call.callee.ident
        screen = self.module.screen(name)
        if screen is None:
            self.sink.error(
                "E2118",
                f"unknown screen {name!r}",
                call.callee.line,
                call.callee.column,
                len(name),
            )
            for arg in call.args:
                self.check_arg(arg, scope)
            return T.VOID
        arg_types = [self.check_arg(arg, scope) for arg in call.args]
        if len(arg_types) != len(screen.params):
            self.sink.error(
                "E2115",
                f"screen {name} expects {len(screen.params)} argument(s), got {len(arg_types)}",
                call.line,
                call.column,
            )
            return T.screen_type(name)
        for i, (got, param) in enumerate(zip(arg_types, screen.params)):
            want = self.resolve_type_ref(param.type_ref)
            if not T.assignable(got, want):
                node = call.args[i].value
                self.sink.error(
                    "E2116",
                    f"argument {i + 1} of screen {name} expects {want}, got {got}",
                    node.line if node else call.line,
                    node.column if node else call.column,
                )
        return T.screen_type(name)

    _ORDERED = (T.INT, T.DATETIME)

    def check_binary(self, expr: N.Binary, scope: _Scope) -> T.Type:
        left = self.check_expr(expr.left, scope)
        right = self.check_expr(expr.right, scope)
        op = expr.op
        if op in ("&&", "||"):
            for side, typ in (("left", left), ("right", right)):
                if typ not in (T.BOOL, T.ANY):
                    self.sink.error(
                        "E2101",
                        f"{op} requires boolean operands, got {typ}",
                        expr.line,
                        expr.column,
                    )
            return T.BOOL
        if op in ("==", "!="):
            if not (T.assignable(left, right) or T.assignable(right, left)):
                self.sink.error(
                    "E2101",
                    f"cannot compare {left} with {right}",
                    expr.line,
                    expr.column,
                )
            return T.BOOL
        if op in ("<", ">", "<=", ">="):
            ok = (
                left == T.ANY
                or right == T.ANY
                or (left == right and left in self._ORDERED)
            )
            if not ok:
                self.sink.error(
                    "E2101",
                    f"cannot order {left} against {right}",
                    expr.line,
                    expr.column,
                )
            return T.BOOL
        if op == "in":
            ok = (
                right == T.ANY
                or (right.kind == "list" and T.assignable(left, right.elem or T.ANY))
                or (left == T.STRING and right == T.STRING)
                or left == T.ANY
            )
            if not ok:
                self.sink.error(
                    "E2101",
                    f"'in' requires a list or string on the right, got {right}",
                    expr.line,
                    expr.column,
                )
            return T.BOOL
        if op == "+":
            if left == T.STRING or right == T.STRING:
                if all(t in (T.STRING, T.ANY) for t in (left, right)):
                    return T.STRING
                self.sink.error(
                    "E2101",
                    f"cannot concatenate {left} with {right}",
                    expr.line,
                    expr.column,
                )
                return T.STRING
            for typ in (left, right):
                if typ not in (T.INT, T.ANY):
                    self.sink.error(
                        "E2101", f"'+' requires int operands, got {typ}", expr.line, expr.column
                    )
            return T.INT
        # -, *, %
        for typ in (left, right):
            if typ not in (T.INT, T.ANY):
                self.sink.error(
                    "E2101",
                    f"{op!r} requires int operands, got {typ}",
                    expr.line,
                    expr.column,
                )
        return T.INT

    # --- lint -------------------------------------------------------------

    def lint_module(self) -> None:
        for widget in self.module.widgets:
            if widget.name not in self.result.used_widgets:
                self.sink.warning(
                    "W0001",
                    f"widget {widget.name!r} is declared but never used",
                    widget.line,
                    widget.column,
                    len(widget.name),
                )
        if self.module.screens and self.needs_import_stub():
            self.sink.warning(
                "W0002",
                "screens call remote operations but no 'import' operation is declared",
                self.module.screens[0].line,
                self.module.screens[0].column,
            )
        import_ops = [o for o in self.module.operations if o.name == "import"]
        if len(import_ops) > 1:
            self.sink.error(
                "E2119",
                "at most one operation may be named 'import'",
                import_ops[1].line,
                import_ops[1].column,
            )

    def needs_import_stub(self) -> bool:
        if "import" in self.operation_index:
            return False
        remote = self.result.remote_operations
        if not remote:
            return False
        referenced: set[str] = set()
        for screen in self.module.screens:
            self.scan_calls(screen.items, referenced)
        return bool(referenced & remote)


def check(module: N.Module, sink: DiagnosticSink | None = None) -> CheckResult:
    sink = sink if sink is not None else DiagnosticSink()
    return Checker(module, sink).run()


def analyze(source: str) -> CheckResult:
    """Parse and check in one step, sharing a single diagnostic sink."""
    from .parser import parse

    sink = DiagnosticSink()
    module, _ = parse(source, sink)
    return check(module, sink)
