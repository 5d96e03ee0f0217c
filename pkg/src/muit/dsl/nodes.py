"""AST node classes.

Position fields are excluded from equality so structurally identical
trees compare equal regardless of formatting.
"""

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass
class Node:
    line: int = field(default=0, compare=False, kw_only=True)
    column: int = field(default=0, compare=False, kw_only=True)


# --- expressions ---------------------------------------------------------


@dataclass
class Expr(Node):
    pass


@dataclass
class StringLit(Expr):
    value: str = ""


@dataclass
class IntLit(Expr):
    value: int = 0


@dataclass
class BoolLit(Expr):
    value: bool = False


@dataclass
class Name(Expr):
    ident: str = ""


@dataclass
class Member(Expr):
    obj: Optional[Expr] = None
    name: str = ""


@dataclass
class Arg(Node):
    value: Optional[Expr] = None
    name: Optional[str] = None


@dataclass
class Call(Expr):
    callee: Optional[Expr] = None
    args: list[Arg] = field(default_factory=list)


@dataclass
class Unary(Expr):
    op: str = ""
    operand: Optional[Expr] = None


@dataclass
class Binary(Expr):
    op: str = ""
    left: Optional[Expr] = None
    right: Optional[Expr] = None


@dataclass
class NewExpr(Expr):
    """Screen instantiation: pushes a screen (cascading on wide layouts)."""

    call: Optional[Call] = None


@dataclass
class BlockExpr(Expr):
    """Braced statement list used as an argument value (event handlers)."""

    stmts: list["Stmt"] = field(default_factory=list)


# --- statements ----------------------------------------------------------


@dataclass
class Stmt(Node):
    pass


@dataclass
class VarDecl(Stmt):
    name: str = ""
    init: Optional[Expr] = None


@dataclass
class Assign(Stmt):
    target: Optional[Expr] = None
    value: Optional[Expr] = None


@dataclass
class Foreach(Stmt):
    """Loop body holds statements; inside a screen it may also hold UI items."""

    var: str = ""
    iterable: Optional[Expr] = None
    body: list = field(default_factory=list)


@dataclass
class IfStmt(Stmt):
    branches: list[tuple[Expr, list[Stmt]]] = field(default_factory=list)
    else_body: Optional[list[Stmt]] = None


@dataclass
class ReturnStmt(Stmt):
    value: Optional[Expr] = None


@dataclass
class ExprStmt(Stmt):
    expr: Optional[Expr] = None


# --- screen content ------------------------------------------------------


@dataclass
class ScreenItem(Node):
    pass


@dataclass
class HeaderItem(ScreenItem):
    title: Optional[Expr] = None
    items: list["ScreenItemOrStmt"] = field(default_factory=list)


@dataclass
class ImportItem(ScreenItem):
    """Pulls declared widgets into the screen layout."""

    args: list[Expr] = field(default_factory=list)


@dataclass
class ElementItem(ScreenItem):
    callee: Optional[Expr] = None
    args: list[Arg] = field(default_factory=list)
    brace_form: bool = False


@dataclass
class HandlerItem(ScreenItem):
    items: list[ElementItem] = field(default_factory=list)


@dataclass
class RuleClause(Node):
    kind: str = "when"  # "when" or "where"
    cond: Optional[Expr] = None
    items: list["ScreenItemOrStmt"] = field(default_factory=list)


@dataclass
class RuleItem(ScreenItem):
    """Context-adaptation rule; clauses are tried in order, first match wins."""

    clauses: list[RuleClause] = field(default_factory=list)
    else_items: Optional[list["ScreenItemOrStmt"]] = None


@dataclass
class MarkupAttr(Node):
    name: str = ""
    value: Optional[Expr] = None


@dataclass
class MarkupItem(ScreenItem):
    """Inline HTML element embedded directly in a screen or widget body."""

    tag: str = ""
    attrs: list[MarkupAttr] = field(default_factory=list)
    children: list["MarkupItem"] = field(default_factory=list)
    self_closing: bool = True


ScreenItemOrStmt = Union[ScreenItem, Stmt]


# --- declarations --------------------------------------------------------


@dataclass
class TypeRef(Node):
    name: str = ""
    arg: Optional["TypeRef"] = None


@dataclass
class Param(Node):
    name: str = ""
    type_ref: Optional[TypeRef] = None


@dataclass
class PropertyDecl(Node):
    name: str = ""
    declared: Optional[TypeRef] = None
    default: Optional[Expr] = None
    tags: list[str] = field(default_factory=list)
    colon_form: bool = False


@dataclass
class Decl(Node):
    pass


@dataclass
class EntityDecl(Decl):
    name: str = ""
    properties: list[PropertyDecl] = field(default_factory=list)


@dataclass
class OperationDecl(Decl):
    name: str = ""
    params: list[Param] = field(default_factory=list)
    body: list[Stmt] = field(default_factory=list)
    is_async: bool = False


@dataclass
class ScreenDecl(Decl):
    name: str = ""
    params: list[Param] = field(default_factory=list)
    cached: bool = False
    items: list[ScreenItemOrStmt] = field(default_factory=list)


@dataclass
class WidgetDecl(Decl):
    kind: str = ""
    name: str = ""
    params: list[Param] = field(default_factory=list)
    items: list[ScreenItemOrStmt] = field(default_factory=list)


@dataclass
class TouchDecl(Decl):
    kind: str = ""
    name: str = ""
    params: list[Param] = field(default_factory=list)
    body: list[Stmt] = field(default_factory=list)


@dataclass
class ModuleVar(Decl):
    decl: Optional[VarDecl] = None


@dataclass
class Module(Node):
    decls: list[Decl] = field(default_factory=list)

    @property
    def entities(self) -> list[EntityDecl]:
        return [d for d in self.decls if isinstance(d, EntityDecl)]

    @property
    def operations(self) -> list[OperationDecl]:
        return [d for d in self.decls if isinstance(d, OperationDecl)]

    @property
    def screens(self) -> list[ScreenDecl]:
        return [d for d in self.decls if isinstance(d, ScreenDecl)]

    @property
    def widgets(self) -> list[WidgetDecl]:
        return [d for d in self.decls if isinstance(d, WidgetDecl)]

    @property
    def touches(self) -> list[TouchDecl]:
        return [d for d in self.decls if isinstance(d, TouchDecl)]

    @property
    def module_vars(self) -> list[ModuleVar]:
        return [d for d in self.decls if isinstance(d, ModuleVar)]

    def entity(self, name: str) -> Optional[EntityDecl]:
        for e in self.entities:
            if e.name == name:
                return e
        return None

    def operation(self, name: str) -> Optional[OperationDecl]:
        for o in self.operations:
            if o.name == name:
                return o
        return None

    def screen(self, name: str) -> Optional[ScreenDecl]:
        for s in self.screens:
            if s.name == name:
                return s
        return None
