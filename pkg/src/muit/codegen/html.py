"""Screen lowering: one HTML document per screen plus the descriptor
tables (bindings, rules, list templates) the client script consumes.

Element ids are `{screen}__{path}` where path is the dash-joined item
index chain from the screen body down, so ids are stable across
recompiles and unique within a document.
"""

from __future__ import annotations

import html as html_escape
from dataclasses import dataclass, field

from muit.dsl import nodes as N
from muit.dsl.builtins import ELEMENT_NAMES, EVENT_ATTRS, WIDGET_KINDS

from .descriptors import block_descriptor, expr_descriptor, stmt_descriptor


class CompileError(Exception):
    pass


_EVENT_NAME = {
    "onClick": "click",
    "onChange": "change",
    "onSubmit": "submit",
    "onSelect": "select",
}

# HTML tags that never take a closing tag.
_VOID_TAGS = {"input", "img", "br", "hr", "meta", "link"}

# Context variable paths whose presence in a rule condition marks its
# branches as screen-estate adaptation: a `new` inside opens a
# cascading pane instead of pushing a full screen.
_ESTATE_PATHS = {
    "screen.window.innerWidth",
    "screen.window.innerHeight",
    "screen.device.orientation",
}

_WIDGET_FIELD_TAGS = {
    "calendar": ('input', {"type": "date"}),
    "textInput": ('input', {"type": "text"}),
    "button": ('button', {}),
    "list": ('ul', {}),
    "map": ('div', {"class": "placeholder"}),
    "weather": ('div', {"class": "placeholder"}),
}


def esc(text: str) -> str:
    return html_escape.escape(str(text), quote=True)


def member_path(expr: N.Expr) -> str | None:
    """Dotted path for a name or member chain; None for anything else."""
    if isinstance(expr, N.Name):
        return expr.ident
    if isinstance(expr, N.Member) and expr.obj is not None:
        base = member_path(expr.obj)
        return None if base is None else f"{base}.{expr.name}"
    return None


def _collect_paths(expr: N.Expr, roots: set[str], out: list[str]) -> None:
    path = member_path(expr)
    if path is not None:
        if path.split(".", 1)[0] in roots and path not in out:
            out.append(path)
        return
    for child in _expr_children(expr):
        _collect_paths(child, roots, out)


def _expr_children(expr: N.Expr) -> list[N.Expr]:
    if isinstance(expr, N.Member):
        return [expr.obj] if expr.obj is not None else []
    if isinstance(expr, N.Call):
        kids: list[N.Expr] = [expr.callee] if expr.callee is not None else []
        kids.extend(a.value for a in expr.args if a.value is not None)
        return kids
    if isinstance(expr, N.Unary):
        return [expr.operand] if expr.operand is not None else []
    if isinstance(expr, N.Binary):
        return [e for e in (expr.left, expr.right) if e is not None]
    if isinstance(expr, N.NewExpr):
        return [expr.call] if expr.call is not None else []
    if isinstance(expr, N.BlockExpr):
        return []
    return []


def references_estate_context(expr: N.Expr) -> bool:
    path = member_path(expr)
    if path in _ESTATE_PATHS:
        return True
    return any(references_estate_context(c) for c in _expr_children(expr))


@dataclass
class NavEdge:
    source: str
    target: str | None  # None = back along the stack
    kind: str  # push | cascade | back
    via: str  # element id or touch:{name}

    def as_json(self) -> dict:
        return {"from": self.source, "to": self.target, "kind": self.kind, "via": self.via}


@dataclass
class ScreenLowering:
    html: str = ""
    setup: list[dict] = field(default_factory=list)
    exprs: dict[str, dict] = field(default_factory=dict)
    rules: list[dict] = field(default_factory=list)
    bindings: list[dict] = field(default_factory=list)
    foreach: dict[str, dict] = field(default_factory=dict)
    widgets: list[str] = field(default_factory=list)
    touches: list[str] = field(default_factory=list)
    edges: list[NavEdge] = field(default_factory=list)


class Lowerer:
    """Lowers one screen; collects ids, descriptors and navigation edges."""

    def __init__(self, module: N.Module, screen: N.ScreenDecl):
        self.module = module
        self.screen = screen
        self.out = ScreenLowering()
        self.lines: list[str] = []
        self.depth = 0
        self.expr_counter = 0
        self.widget_by_name = {w.name: w for w in module.widgets}
        self.touch_by_name = {t.name: t for t in module.touches}
        self.screen_names = {s.name for s in module.screens}
        self.operation_names = {o.name for o in module.operations}
        # Model roots visible to this screen's expressions.
        self.roots: set[str] = {mv.decl.name for mv in module.module_vars if mv.decl}
        self.roots.update(p.name for p in screen.params)
        self.estate_depth = 0  # >0 while inside a screen-estate rule branch
        self.in_list_depth = 0  # >0 while inside a foreach template

    # -- output helpers ---------------------------------------------------

    def emit(self, line: str) -> None:
        self.lines.append("  " * self.depth + line)

    def new_expr_id(self, expr: N.Expr) -> str:
        eid = f"e{self.expr_counter}"
        self.expr_counter += 1
        self.out.exprs[eid] = expr_descriptor(expr)
        return eid

    def content_html(self, expr: N.Expr) -> str:
        if isinstance(expr, N.StringLit):
            return esc(expr.value)
        if isinstance(expr, N.IntLit):
            return esc(str(expr.value))
        eid = self.new_expr_id(expr)
        return f'<span class="dyn" data-expr="{eid}"></span>'

    def element_id(self, path: tuple[int, ...]) -> str:
        return f"{self.screen.name}__" + "-".join(str(i) for i in path)

    # -- navigation scanning ----------------------------------------------

    def scan_action_for_edges(self, stmts: list[N.Stmt], via: str) -> None:
        for stmt in stmts:
            for expr in _stmt_exprs(stmt):
                self._scan_expr_for_edges(expr, via)

    def _scan_expr_for_edges(self, expr: N.Expr, via: str) -> None:
        if isinstance(expr, N.NewExpr) and expr.call is not None:
            target = expr.call.callee
            if isinstance(target, N.Name):
                if target.ident not in self.screen_names:
                    raise CompileError(
                        f"screen {self.screen.name}: navigation to undeclared screen {target.ident!r}"
                    )
                kind = "cascade" if self.estate_depth > 0 else "push"
                self.out.edges.append(NavEdge(self.screen.name, target.ident, kind, via))
        if isinstance(expr, N.Call):
            path = member_path(expr.callee) if expr.callee is not None else None
            if path in ("history.go", "history.back"):
                self.out.edges.append(NavEdge(self.screen.name, None, "back", via))
            if path == "navigate" and expr.args:
                arg = expr.args[0].value
                if isinstance(arg, N.Name) and arg.ident in self.screen_names:
                    self.out.edges.append(
                        NavEdge(self.screen.name, arg.ident, "push", via)
                    )
        for child in _expr_children(expr):
            self._scan_expr_for_edges(child, via)

    def action_targets(self, stmts: list[N.Stmt]) -> list[str]:
        targets: list[str] = []

        def visit_expr(expr: N.Expr) -> None:
            if isinstance(expr, N.NewExpr) and expr.call is not None:
                callee = expr.call.callee
                if isinstance(callee, N.Name) and callee.ident not in targets:
                    targets.append(callee.ident)
            if isinstance(expr, N.Call) and expr.callee is not None:
                path = member_path(expr.callee)
                name = None
                if path in ("history.go", "history.back", "navigate"):
                    name = path
                elif path is not None and path.split(".")[-1] in self.operation_names:
                    name = path.split(".")[-1]
                if name is not None and name not in targets:
                    targets.append(name)
            for child in _expr_children(expr):
                visit_expr(child)

        for stmt in stmts:
            for expr in _stmt_exprs(stmt):
                visit_expr(expr)
        return targets

    # -- lowering ---------------------------------------------------------

    def lower(self) -> ScreenLowering:
        name = self.screen.name
        self.emit("<!DOCTYPE html>")
        self.emit('<html lang="en">')
        self.emit("<head>")
        self.depth += 1
        self.emit('<meta charset="utf-8">')
        self.emit('<meta name="viewport" content="width=device-width, initial-scale=1">')
        self.emit(f"<title>{esc(name)}</title>")
        self.emit('<link rel="stylesheet" href="../styles/base.css">')
        self.emit('<link rel="stylesheet" href="../styles/ios.css" media="not all" data-platform="iOS">')
        self.emit('<link rel="stylesheet" href="../styles/android.css" media="not all" data-platform="Android">')
        self.emit('<script defer src="../app.js"></script>')
        self.depth -= 1
        self.emit("</head>")
        touch_names = self.imported_touches()
        for touch_name in touch_names:
            touch = self.touch_by_name[touch_name]
            self.scan_action_for_edges(touch.body, f"touch:{touch_name}")
        touch_attr = f' data-touch="{esc(" ".join(touch_names))}"' if touch_names else ""
        self.emit(f'<body data-screen="{esc(name)}">')
        self.emit(f'<main class="screen" id="screen-{esc(name)}"{touch_attr}>')
        self.depth += 1
        for index, item in enumerate(self.screen.items):
            self.lower_item(item, (index,))
        self.depth -= 1
        self.emit("</main>")
        self.emit("</body>")
        self.emit("</html>")
        self.out.html = "\n".join(self.lines) + "\n"
        self.out.touches = touch_names
        return self.out

    def imported_touches(self) -> list[str]:
        names = []
        for item in self.screen.items:
            if isinstance(item, N.ImportItem):
                for arg in item.args:
                    if isinstance(arg, N.Name) and arg.ident in self.touch_by_name:
                        names.append(arg.ident)
        return names

    def lower_item(self, item, path: tuple[int, ...]) -> None:
        if isinstance(item, N.HeaderItem):
            self.lower_header(item, path)
        elif isinstance(item, N.ImportItem):
            self.lower_import(item, path)
        elif isinstance(item, N.ElementItem):
            self.lower_element(item, path)
        elif isinstance(item, N.HandlerItem):
            self.lower_handler(item, path)
        elif isinstance(item, N.RuleItem):
            self.lower_rule(item, path)
        elif isinstance(item, N.MarkupItem):
            self.lower_markup(item, path)
        elif isinstance(item, N.Foreach):
            self.lower_foreach(item, path)
        elif isinstance(item, N.Stmt):
            self.out.setup.append(stmt_descriptor(item))
        else:
            raise CompileError(f"unsupported screen item {type(item).__name__}")

    def lower_header(self, item: N.HeaderItem, path: tuple[int, ...]) -> None:
        eid = self.element_id(path)
        self.emit('<header class="screen-header">')
        self.depth += 1
        title = self.content_html(item.title) if item.title is not None else ""
        self.emit(f'<h1 id="{eid}">{title}</h1>')
        for index, child in enumerate(item.items):
            self.lower_item(child, path + (index,))
        self.depth -= 1
        self.emit("</header>")
        if item.title is not None:
            self.watch_binding(eid, item.title)

    def watch_binding(self, element_id: str, *exprs: N.Expr) -> None:
        """Record which model paths an element renders, so mutations
        re-render exactly the affected elements."""
        watch: list[str] = []
        for expr in exprs:
            _collect_paths(expr, self.roots, watch)
        if watch:
            self.out.bindings.append(
                {
                    "element": element_id,
                    "event": None,
                    "action": [],
                    "targets": [],
                    "watch": watch,
                }
            )

    def lower_import(self, item: N.ImportItem, path: tuple[int, ...]) -> None:
        for arg in item.args:
            if not isinstance(arg, N.Name):
                continue
            if arg.ident in self.touch_by_name:
                continue  # surfaced as data-touch on the screen root
            widget = self.widget_by_name.get(arg.ident)
            if widget is None:
                raise CompileError(
                    f"screen {self.screen.name}: import of unknown fragment {arg.ident!r}"
                )
            if widget.kind not in WIDGET_KINDS:
                raise CompileError(f"unknown widget kind {widget.kind!r}")
            self.out.widgets.append(widget.name)
            self.roots.add(widget.name)
            wid = self.element_id(path)
            self.emit(
                f'<div class="widget widget-{esc(widget.kind)}" id="{wid}" data-widget="{esc(widget.name)}">'
            )
            self.depth += 1
            markup = [i for i in widget.items if isinstance(i, N.MarkupItem)]
            if markup:
                for index, child in enumerate(markup):
                    self.lower_markup(child, path + (index,))
            else:
                tag, attrs = _WIDGET_FIELD_TAGS[widget.kind]
                extra = "".join(f' {k}="{esc(v)}"' for k, v in attrs.items())
                fid = f"{wid}-f"
                field_attrs = f'{extra} id="{fid}" data-widget-field="{esc(widget.name)}"'
                if tag in _VOID_TAGS:
                    self.emit(f"<{tag}{field_attrs}>")
                else:
                    self.emit(f"<{tag}{field_attrs}></{tag}>")
            self.depth -= 1
            self.emit("</div>")

    def lower_element(self, item: N.ElementItem, path: tuple[int, ...]) -> None:
        eid = self.element_id(path)
        callee = item.callee.ident if isinstance(item.callee, N.Name) else None
        content_exprs: list[N.Expr] = []
        action: list[N.Stmt] | None = None
        event = None
        attrs: list[tuple[str, str]] = []
        for arg in item.args:
            if arg.value is None:
                continue
            if arg.name is None:
                if isinstance(arg.value, N.BlockExpr):
                    action = arg.value.stmts
                    event = event or "click"
                else:
                    content_exprs.append(arg.value)
            elif arg.name in EVENT_ATTRS:
                if isinstance(arg.value, N.BlockExpr):
                    action = arg.value.stmts
                    event = _EVENT_NAME.get(arg.name, "click")
            elif isinstance(arg.value, (N.StringLit, N.IntLit)):
                value = arg.value.value
                attrs.append((arg.name, str(value)))

        content = "".join(self.content_html(e) for e in content_exprs)
        extra = "".join(f' {esc(k)}="{esc(v)}"' for k, v in attrs)

        if callee == "button":
            label_class = ""
            if content_exprs and isinstance(content_exprs[0], N.StringLit):
                slug = _slug(content_exprs[0].value)
                if slug:
                    label_class = f' class="{slug}"'
            self.emit(f'<button type="button"{label_class} id="{eid}"{extra}>{content}</button>')
        elif callee == "label":
            self.emit(f'<span class="label" id="{eid}"{extra}>{content}</span>')
        elif callee == "text":
            self.emit(f'<p class="text" id="{eid}"{extra}>{content}</p>')
        elif callee == "image":
            src = ""
            if content_exprs and isinstance(content_exprs[0], N.StringLit):
                src = f' src="{esc(content_exprs[0].value)}"'
            self.emit(f'<img class="image" id="{eid}" alt=""{src}{extra}>')
        elif callee == "link":
            self.emit(f'<a class="link" href="#" id="{eid}"{extra}>{content}</a>')
        elif callee == "form":
            self.emit(f'<form class="form" id="{eid}"{extra}>{content}</form>')
        elif callee == "listview":
            self.emit(f'<ul class="list" id="{eid}"{extra}>{content}</ul>')
        else:
            # A data-bound row: the callee names the value being rendered
            # (typically the loop variable inside a list template).
            tag = "li" if self.in_list_depth > 0 else "div"
            if item.callee is not None and not content_exprs:
                content = self.content_html(item.callee)
            self.emit(f'<{tag} class="item" id="{eid}"{extra}>{content}</{tag}>')

        self.watch_binding(eid, *(content_exprs or ([item.callee] if item.callee else [])))
        if action is not None:
            self.scan_action_for_edges(action, eid)
            self.out.bindings.append(
                {
                    "element": eid,
                    "event": event or "click",
                    "action": block_descriptor(action),
                    "targets": self.action_targets(action),
                    "watch": [],
                }
            )

    def lower_handler(self, item: N.HandlerItem, path: tuple[int, ...]) -> None:
        self.emit(f'<div class="handler" id="{self.element_id(path)}">')
        self.depth += 1
        for index, child in enumerate(item.items):
            self.lower_element(child, path + (index,))
        self.depth -= 1
        self.emit("</div>")

    def lower_rule(self, item: N.RuleItem, path: tuple[int, ...]) -> None:
        rid = self.element_id(path)
        self.emit(f'<div class="rule" id="{rid}">')
        self.depth += 1
        clauses_json = []
        for index, clause in enumerate(item.clauses):
            branch_id = f"{rid}-{index}"
            estate = clause.cond is not None and references_estate_context(clause.cond)
            self.emit(f'<div class="rule-branch" id="{branch_id}" hidden>')
            self.depth += 1
            if estate:
                self.estate_depth += 1
            for child_index, child in enumerate(clause.items):
                self.lower_item(child, path + (index, child_index))
            if estate:
                self.estate_depth -= 1
            self.depth -= 1
            self.emit("</div>")
            clauses_json.append(
                {
                    "trigger": clause.kind,
                    "cond": expr_descriptor(clause.cond) if clause.cond is not None else None,
                    "branch": branch_id,
                }
            )
        else_id = None
        if item.else_items is not None:
            index = len(item.clauses)
            else_id = f"{rid}-{index}"
            self.emit(f'<div class="rule-branch" id="{else_id}" hidden>')
            self.depth += 1
            for child_index, child in enumerate(item.else_items):
                self.lower_item(child, path + (index, child_index))
            self.depth -= 1
            self.emit("</div>")
        self.depth -= 1
        self.emit("</div>")
        self.out.rules.append({"id": rid, "clauses": clauses_json, "else": else_id})

    def lower_markup(self, item: N.MarkupItem, path: tuple[int, ...]) -> None:
        eid = self.element_id(path)
        parts = [f'<{item.tag} id="{eid}"']
        model_path = None
        for attr in item.attrs:
            if isinstance(attr.value, N.BoolLit):
                parts.append(f' {esc(attr.name)}="{"true" if attr.value.value else "false"}"')
            elif isinstance(attr.value, (N.StringLit, N.IntLit)):
                parts.append(f' {esc(attr.name)}="{esc(attr.value.value)}"')
            elif attr.value is not None:
                bound = member_path(attr.value)
                if bound is not None:
                    model_path = bound
                    parts.append(f' data-model="{esc(bound)}"')
        open_tag = "".join(parts) + ">"
        if item.tag in _VOID_TAGS or (item.self_closing and not item.children):
            self.emit(open_tag if item.tag in _VOID_TAGS else open_tag[:-1] + f"></{item.tag}>")
        else:
            self.emit(open_tag)
            self.depth += 1
            for index, child in enumerate(item.children):
                self.lower_markup(child, path + (index,))
            self.depth -= 1
            self.emit(f"</{item.tag}>")
        if model_path is not None:
            event = "change" if item.tag == "select" else "input"
            self.out.bindings.append(
                {
                    "element": eid,
                    "event": event,
                    "action": [],
                    "targets": [],
                    "watch": [model_path],
                    "model": model_path,
                }
            )

    def lower_foreach(self, item: N.Foreach, path: tuple[int, ...]) -> None:
        if all(isinstance(child, N.Stmt) for child in item.body):
            self.out.setup.append(stmt_descriptor(item))
            return
        fid = self.element_id(path)
        iter_eid = self.new_expr_id(item.iterable) if item.iterable is not None else None
        self.emit(f'<ul class="list" id="{fid}" data-foreach="{fid}">')
        self.depth += 1
        self.emit("<template>")
        self.depth += 1
        self.roots.add(item.var)
        self.in_list_depth += 1
        for index, child in enumerate(item.body):
            self.lower_item(child, path + (index,))
        self.in_list_depth -= 1
        self.roots.discard(item.var)
        self.depth -= 1
        self.emit("</template>")
        self.depth -= 1
        self.emit("</ul>")
        self.out.foreach[fid] = {"var": item.var, "iter": iter_eid}


def _stmt_exprs(stmt: N.Stmt) -> list[N.Expr]:
    """Every expression directly reachable from a statement, block
    bodies included."""
    exprs: list[N.Expr] = []
    if isinstance(stmt, N.VarDecl) and stmt.init is not None:
        exprs.append(stmt.init)
    elif isinstance(stmt, N.Assign):
        exprs.extend(e for e in (stmt.target, stmt.value) if e is not None)
    elif isinstance(stmt, N.ExprStmt) and stmt.expr is not None:
        exprs.append(stmt.expr)
    elif isinstance(stmt, N.ReturnStmt) and stmt.value is not None:
        exprs.append(stmt.value)
    elif isinstance(stmt, N.IfStmt):
        for cond, body in stmt.branches:
            exprs.append(cond)
            for s in body:
                exprs.extend(_stmt_exprs(s))
        if stmt.else_body:
            for s in stmt.else_body:
                exprs.extend(_stmt_exprs(s))
    elif isinstance(stmt, N.Foreach):
        if stmt.iterable is not None:
            exprs.append(stmt.iterable)
        for s in stmt.body:
            if isinstance(s, N.Stmt):
                exprs.extend(_stmt_exprs(s))
    return exprs


def _slug(text: str) -> str:
    out = "".join(c if c.isalnum() else "-" for c in text.lower()).strip("-")
    return out[:24]


def lower_screen(module: N.Module, screen: N.ScreenDecl) -> ScreenLowering:
    return Lowerer(module, screen).lower()
