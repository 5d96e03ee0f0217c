"""Canonical source formatter.

print_module(parse(src)) reparses to a structurally equal tree, which
the round-trip tests rely on.  Binary expressions are printed fully
parenthesized so precedence never has to be reconstructed.
"""

from . import nodes as N

_INDENT = "  "


def _quote(text: str) -> str:
    escaped = (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\t", "\\t")
    )
    return f'"{escaped}"'


def print_expr(expr: N.Expr | None) -> str:
    if expr is None:
        return ""
    if isinstance(expr, N.StringLit):
        return _quote(expr.value)
    if isinstance(expr, N.IntLit):
        return str(expr.value)
    if isinstance(expr, N.BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, N.Name):
        return expr.ident
    if isinstance(expr, N.Member):
        return f"{print_expr(expr.obj)}.{expr.name}"
    if isinstance(expr, N.Call):
        args = ", ".join(print_arg(a) for a in expr.args)
        return f"{print_expr(expr.callee)}({args})"
    if isinstance(expr, N.Unary):
        return f"({expr.op}{print_expr(expr.operand)})"
    if isinstance(expr, N.Binary):
        return f"({print_expr(expr.left)} {expr.op} {print_expr(expr.right)})"
    if isinstance(expr, N.NewExpr):
        return f"new {print_expr(expr.call)}"
    if isinstance(expr, N.BlockExpr):
        inner = " ".join(print_stmt(s, 0).strip() for s in expr.stmts)
        return "{ " + inner + " }" if inner else "{ }"
    raise TypeError(f"unprintable expression {type(expr).__name__}")


def print_arg(arg: N.Arg) -> str:
    rendered = print_expr(arg.value)
    if arg.name is not None:
        return f"{arg.name} = {rendered}"
    return rendered


def print_type_ref(ref: N.TypeRef | None) -> str:
    if ref is None:
        return ""
    if ref.arg is not None and ref.name == "list":
        return f"list<{print_type_ref(ref.arg)}>"
    if ref.arg is not None:
        return f"{ref.name}<{print_type_ref(ref.arg)}>"
    return ref.name


def print_param(param: N.Param) -> str:
    if param.type_ref is not None:
        return f"{print_type_ref(param.type_ref)} {param.name}"
    return param.name


def print_stmt(stmt: N.Stmt, depth: int) -> str:
    pad = _INDENT * depth
    if isinstance(stmt, N.VarDecl):
        return f"{pad}var {stmt.name} = {print_expr(stmt.init)};"
    if isinstance(stmt, N.Assign):
        return f"{pad}{print_expr(stmt.target)} = {print_expr(stmt.value)};"
    if isinstance(stmt, N.Foreach):
        lines = [f"{pad}foreach ({stmt.var} in {print_expr(stmt.iterable)}) {{"]
        lines += [print_screen_item(s, depth + 1) for s in stmt.body]
        lines.append(f"{pad}}}")
        return "\n".join(lines)
    if isinstance(stmt, N.IfStmt):
        lines: list[str] = []
        for i, (cond, body) in enumerate(stmt.branches):
            kw = "if" if i == 0 else "elseif"
            prefix = pad if i == 0 else pad
            lines.append(f"{prefix}{kw} ({print_expr(cond)}) {{")
            lines += [print_stmt(s, depth + 1) for s in body]
            lines.append(f"{pad}}}")
        if stmt.else_body is not None:
            lines.append(f"{pad}else {{")
            lines += [print_stmt(s, depth + 1) for s in stmt.else_body]
            lines.append(f"{pad}}}")
        return "\n".join(lines)
    if isinstance(stmt, N.ReturnStmt):
        if stmt.value is None:
            return f"{pad}return;"
        return f"{pad}return {print_expr(stmt.value)};"
    if isinstance(stmt, N.ExprStmt):
        return f"{pad}{print_expr(stmt.expr)};"
    raise TypeError(f"unprintable statement {type(stmt).__name__}")


def print_screen_item(item: N.ScreenItemOrStmt, depth: int) -> str:
    pad = _INDENT * depth
    if isinstance(item, N.HeaderItem):
        head = f"{pad}header({print_expr(item.title) if item.title else ''})"
        if item.items:
            lines = [head + " {"]
            lines += [print_screen_item(i, depth + 1) for i in item.items]
            lines.append(f"{pad}}}")
            return "\n".join(lines)
        return head + ";"
    if isinstance(item, N.ImportItem):
        args = ", ".join(print_expr(a) for a in item.args)
        return f"{pad}import({args});"
    if isinstance(item, N.HandlerItem):
        lines = [f"{pad}handler {{"]
        lines += [print_screen_item(i, depth + 1) for i in item.items]
        lines.append(f"{pad}}}")
        return "\n".join(lines)
    if isinstance(item, N.RuleItem):
        lines = []
        for i, clause in enumerate(item.clauses):
            if i == 0:
                lines.append(f"{pad}{clause.kind} ({print_expr(clause.cond)}) {{")
            elif clause.kind == "where":
                lines.append(f"{pad}elseif where ({print_expr(clause.cond)}) {{")
            else:
                lines.append(f"{pad}elseif ({print_expr(clause.cond)}) {{")
            lines += [print_screen_item(x, depth + 1) for x in clause.items]
            lines.append(f"{pad}}}")
        if item.else_items is not None:
            lines.append(f"{pad}else {{")
            lines += [print_screen_item(x, depth + 1) for x in item.else_items]
            lines.append(f"{pad}}}")
        return "\n".join(lines)
    if isinstance(item, N.ElementItem):
        args = ", ".join(print_arg(a) for a in item.args)
        callee = print_expr(item.callee)
        if item.brace_form:
            return f"{pad}{callee} {{{args}}};"
        return f"{pad}{callee}({args});"
    if isinstance(item, N.MarkupItem):
        return print_markup(item, depth)
    if isinstance(item, N.Stmt):
        return print_stmt(item, depth)
    raise TypeError(f"unprintable screen item {type(item).__name__}")


def print_markup(item: N.MarkupItem, depth: int) -> str:
    pad = _INDENT * depth
    attrs: list[str] = []
    for attr in item.attrs:
        if attr.value is None:
            attrs.append(attr.name)
        else:
            attrs.append(f"{attr.name} = {print_expr(attr.value)}")
    head = f"{pad}<{item.tag}" + (" " + ", ".join(attrs) if attrs else "")
    if item.self_closing:
        return head + "/>"
    lines = [head + ">"]
    lines += [print_markup(c, depth + 1) for c in item.children]
    lines.append(f"{pad}</{item.tag}>")
    return "\n".join(lines)


def print_property(prop: N.PropertyDecl, depth: int) -> str:
    pad = _INDENT * depth
    if prop.tags:
        return f"{pad}{prop.name}: {', '.join(prop.tags)};"
    if prop.colon_form:
        declared = prop.declared
        if declared is not None and declared.name == "list" and declared.arg is not None:
            text = f"{pad}{prop.name}: {declared.arg.name}<list>"
        else:
            text = f"{pad}{prop.name}: {print_type_ref(declared)}"
        if prop.default is not None:
            text += f": {print_expr(prop.default)}"
        return text + ";"
    text = f"{pad}{print_type_ref(prop.declared)} {prop.name}"
    if prop.default is not None:
        text += f": {print_expr(prop.default)}"
    return text + ";"


def print_decl(decl: N.Decl) -> str:
    if isinstance(decl, N.EntityDecl):
        lines = [f"entity {decl.name} {{"]
        lines += [print_property(p, 1) for p in decl.properties]
        lines.append("}")
        return "\n".join(lines)
    if isinstance(decl, N.OperationDecl):
        params = ", ".join(print_param(p) for p in decl.params)
        prefix = "async " if decl.is_async else ""
        lines = [f"{prefix}operation {decl.name}({params}) {{"]
        lines += [print_stmt(s, 1) for s in decl.body]
        lines.append("}")
        return "\n".join(lines)
    if isinstance(decl, N.ScreenDecl):
        params = ", ".join(print_param(p) for p in decl.params)
        suffix = " cached" if decl.cached else ""
        lines = [f"screen {decl.name}({params}){suffix} {{"]
        lines += [print_screen_item(i, 1) for i in decl.items]
        lines.append("}")
        return "\n".join(lines)
    if isinstance(decl, N.WidgetDecl):
        params = ", ".join(print_param(p) for p in decl.params)
        lines = [f"widget {decl.kind} {decl.name}({params}) {{"]
        lines += [print_screen_item(i, 1) for i in decl.items]
        lines.append("}")
        return "\n".join(lines)
    if isinstance(decl, N.TouchDecl):
        params = ", ".join(print_param(p) for p in decl.params)
        lines = [f"touch {decl.kind} {decl.name}({params}) {{"]
        lines += [print_stmt(s, 1) for s in decl.body]
        lines.append("}")
        return "\n".join(lines)
    if isinstance(decl, N.ModuleVar):
        return print_stmt(decl.decl, 0)
    raise TypeError(f"unprintable declaration {type(decl).__name__}")


def print_module(module: N.Module) -> str:
    return "\n\n".join(print_decl(d) for d in module.decls) + "\n"
