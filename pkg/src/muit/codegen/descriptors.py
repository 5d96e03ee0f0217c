"""JSON descriptors for expressions and statements.

The compiled bundle carries behavior (rule conditions, event actions,
operation bodies) as plain data trees rather than generated JavaScript
source.  The browser runtime interprets them; keeping the format a
data contract lets the server-side evaluator and the client agree on
semantics through shared test vectors.

Every descriptor is a map with a "k" discriminator:

    {"k": "str", "v": "..."}            string literal
    {"k": "int", "v": 5}                integer literal
    {"k": "bool", "v": true}            boolean literal
    {"k": "name", "v": "taskname"}      variable reference
    {"k": "member", "obj": E, "name": "status"}
    {"k": "call", "fn": E, "args": [E, ...]}
    {"k": "un", "op": "!", "e": E}
    {"k": "bin", "op": "&&", "l": E, "r": E}
    {"k": "new", "screen": "detail", "args": [E, ...]}
    {"k": "block", "body": [S, ...]}

    {"k": "var", "name": "t", "init": E | null}
    {"k": "assign", "target": E, "value": E}
    {"k": "expr", "e": E}
    {"k": "if", "branches": [{"cond": E, "body": [S...]}...], "else": [S...] | null}
    {"k": "foreach", "var": "t", "iter": E, "body": [S, ...]}
    {"k": "return", "e": E | null}
"""

from __future__ import annotations

from muit.dsl import nodes as N


class DescriptorError(Exception):
    """A construct that has no data representation reached serialization."""


def expr_descriptor(expr: N.Expr) -> dict:
    if isinstance(expr, N.StringLit):
        return {"k": "str", "v": expr.value}
    if isinstance(expr, N.IntLit):
        return {"k": "int", "v": expr.value}
    if isinstance(expr, N.BoolLit):
        return {"k": "bool", "v": expr.value}
    if isinstance(expr, N.Name):
        return {"k": "name", "v": expr.ident}
    if isinstance(expr, N.Member):
        return {"k": "member", "obj": expr_descriptor(expr.obj), "name": expr.name}
    if isinstance(expr, N.Call):
        # Named arguments belong to layout elements, which are lowered to
        # markup, never serialized as calls.
        for arg in expr.args:
            if arg.name is not None:
                raise DescriptorError(f"named argument {arg.name!r} in expression position")
        return {
            "k": "call",
            "fn": expr_descriptor(expr.callee),
            "args": [expr_descriptor(a.value) for a in expr.args],
        }
    if isinstance(expr, N.Unary):
        return {"k": "un", "op": expr.op, "e": expr_descriptor(expr.operand)}
    if isinstance(expr, N.Binary):
        return {
            "k": "bin",
            "op": expr.op,
            "l": expr_descriptor(expr.left),
            "r": expr_descriptor(expr.right),
        }
    if isinstance(expr, N.NewExpr):
        call = expr.call
        screen = call.callee.ident if isinstance(call.callee, N.Name) else None
        if screen is None:
            raise DescriptorError("new-expression target is not a plain name")
        return {
            "k": "new",
            "screen": screen,
            "args": [expr_descriptor(a.value) for a in call.args],
        }
    if isinstance(expr, N.BlockExpr):
        return {"k": "block", "body": [stmt_descriptor(s) for s in expr.stmts]}
    raise DescriptorError(f"unsupported expression node {type(expr).__name__}")


def stmt_descriptor(stmt: N.Stmt) -> dict:
    if isinstance(stmt, N.VarDecl):
        return {
            "k": "var",
            "name": stmt.name,
            "init": expr_descriptor(stmt.init) if stmt.init is not None else None,
        }
    if isinstance(stmt, N.Assign):
        return {
            "k": "assign",
            "target": expr_descriptor(stmt.target),
            "value": expr_descriptor(stmt.value),
        }
    if isinstance(stmt, N.ExprStmt):
        return {"k": "expr", "e": expr_descriptor(stmt.expr)}
    if isinstance(stmt, N.IfStmt):
        return {
            "k": "if",
            "branches": [
                {"cond": expr_descriptor(cond), "body": [stmt_descriptor(s) for s in body]}
                for cond, body in stmt.branches
            ],
            "else": (
                [stmt_descriptor(s) for s in stmt.else_body]
                if stmt.else_body is not None
                else None
            ),
        }
    if isinstance(stmt, N.Foreach):
        body = []
        for item in stmt.body:
            if not isinstance(item, N.Stmt):
                raise DescriptorError("foreach body holds layout items; lower via markup")
            body.append(stmt_descriptor(item))
        return {
            "k": "foreach",
            "var": stmt.var,
            "iter": expr_descriptor(stmt.iterable),
            "body": body,
        }
    if isinstance(stmt, N.ReturnStmt):
        return {
            "k": "return",
            "e": expr_descriptor(stmt.value) if stmt.value is not None else None,
        }
    raise DescriptorError(f"unsupported statement node {type(stmt).__name__}")


def block_descriptor(stmts: list[N.Stmt]) -> list[dict]:
    return [stmt_descriptor(s) for s in stmts]


def descriptor_to_expr(tree: dict) -> N.Expr:
    """Inverse of expr_descriptor, used to replay shared test vectors
    through the server-side evaluator."""
    kind = tree["k"]
    if kind == "str":
        return N.StringLit(tree["v"])
    if kind == "int":
        return N.IntLit(tree["v"])
    if kind == "bool":
        return N.BoolLit(tree["v"])
    if kind == "name":
        return N.Name(tree["v"])
    if kind == "member":
        return N.Member(descriptor_to_expr(tree["obj"]), tree["name"])
    if kind == "call":
        return N.Call(
            descriptor_to_expr(tree["fn"]),
            [N.Arg(descriptor_to_expr(a)) for a in tree["args"]],
        )
    if kind == "un":
        return N.Unary(tree["op"], descriptor_to_expr(tree["e"]))
    if kind == "bin":
        return N.Binary(tree["op"], descriptor_to_expr(tree["l"]), descriptor_to_expr(tree["r"]))
    if kind == "new":
        return N.NewExpr(
            N.Call(N.Name(tree["screen"]), [N.Arg(descriptor_to_expr(a)) for a in tree["args"]])
        )
    raise DescriptorError(f"unsupported descriptor kind {kind!r}")
