"""Recursive-descent parser with error recovery.

A syntax error inside a declaration is reported once, then the parser
skips ahead to the next declaration keyword at brace depth zero and
continues.  Parsing any input, however malformed, terminates and
returns a module plus diagnostics; it never raises.
"""

from . import nodes as N
from .builtins import ELEMENT_NAMES
from .diagnostics import DiagnosticSink
from .lexer import tokenize
from .tokens import NAME_LIKE_KEYWORDS, Token, TokenType

_TOP_LEVEL_STARTS = {
    TokenType.KW_ENTITY,
    TokenType.KW_OPERATION,
    TokenType.KW_SCREEN,
    TokenType.KW_WIDGET,
    TokenType.KW_TOUCH,
    TokenType.KW_ASYNC,
    TokenType.KW_VAR,
}

_STMT_SYNC = {TokenType.SEMICOLON, TokenType.RBRACE, TokenType.EOF}


class ParseError(Exception):
    """Internal signal; always caught inside the parser."""


class Parser:
    def __init__(self, tokens: list[Token], sink: DiagnosticSink):
        self.tokens = tokens
        self.pos = 0
        self.sink = sink

    # --- token plumbing ---------------------------------------------------

    @property
    def current_token(self) -> Token:
        return self.tokens[self.pos]

    def peek_token(self, offset: int = 1) -> Token:
        pos = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[pos]

    def advance(self) -> Token:
        token = self.current_token
        if token.type != TokenType.EOF:
            self.pos += 1
        return token

    def at(self, *types: TokenType) -> bool:
        return self.current_token.type in types

    def error(self, code: str, message: str, token: Token | None = None) -> ParseError:
        token = token or self.current_token
        self.sink.error(code, message, token.line, token.column, token.length)
        return ParseError(message)

    def expect(self, ttype: TokenType, what: str) -> Token:
        if self.current_token.type == ttype:
            return self.advance()
        got = self.current_token.value or self.current_token.type.name.lower()
        raise self.error("E1001", f"expected {what}, found {got!r}")

    def name_token(self, what: str = "name") -> Token:
        """Accept an identifier, or a keyword that may double as a name."""
        tok = self.current_token
        if tok.type == TokenType.IDENT or tok.type in NAME_LIKE_KEYWORDS:
            return self.advance()
        got = tok.value or tok.type.name.lower()
        raise self.error("E1002", f"expected {what}, found {got!r}")

    def at_name(self) -> bool:
        return (
            self.current_token.type == TokenType.IDENT
            or self.current_token.type in NAME_LIKE_KEYWORDS
        )

    # --- recovery ---------------------------------------------------------

    def at_decl_boundary(self) -> bool:
        """True when the current token can only start a new declaration;
        used to bail out of an unclosed body instead of consuming it."""
        t = self.current_token.type
        if t in (
            TokenType.KW_ENTITY,
            TokenType.KW_OPERATION,
            TokenType.KW_WIDGET,
            TokenType.KW_TOUCH,
            TokenType.KW_ASYNC,
        ):
            return True
        if t == TokenType.KW_SCREEN:
            nxt = self.peek_token().type
            return nxt == TokenType.IDENT or nxt in NAME_LIKE_KEYWORDS
        return False

    def soft_rbrace(self) -> None:
        if self.at(TokenType.RBRACE):
            self.advance()
            return
        got = self.current_token.value or self.current_token.type.name.lower()
        self.sink.error(
            "E1001",
            f"expected '}}', found {got!r}",
            self.current_token.line,
            self.current_token.column,
            self.current_token.length,
        )

    def sync_to_top_level(self) -> None:
        depth = 0
        while not self.at(TokenType.EOF):
            t = self.current_token.type
            if t == TokenType.LBRACE:
                depth += 1
            elif t == TokenType.RBRACE:
                depth = max(0, depth - 1)
            elif depth == 0 and t in _TOP_LEVEL_STARTS:
                return
            self.advance()

    def sync_statement(self) -> None:
        depth = 0
        while not self.at(TokenType.EOF):
            t = self.current_token.type
            if depth == 0 and t in _STMT_SYNC:
                if t == TokenType.SEMICOLON:
                    self.advance()
                return
            if t == TokenType.LBRACE:
                depth += 1
            elif t == TokenType.RBRACE:
                depth -= 1
                if depth < 0:
                    return
            self.advance()

    # --- module -----------------------------------------------------------

    def parse_module(self) -> N.Module:
        module = N.Module(line=1, column=1)
        while not self.at(TokenType.EOF):
            try:
                decl = self.parse_decl()
            except ParseError:
                self.sync_to_top_level()
                continue
            if decl is not None:
                module.decls.append(decl)
        return module

    def parse_decl(self) -> N.Decl | None:
        tok = self.current_token
        if tok.type == TokenType.KW_ENTITY:
            return self.parse_entity()
        if tok.type in (TokenType.KW_OPERATION, TokenType.KW_ASYNC):
            return self.parse_operation()
        if tok.type == TokenType.KW_SCREEN:
            return self.parse_screen()
        if tok.type == TokenType.KW_WIDGET:
            return self.parse_widget()
        if tok.type == TokenType.KW_TOUCH:
            return self.parse_touch()
        if tok.type == TokenType.KW_VAR:
            var = self.parse_var_decl()
            return N.ModuleVar(decl=var, line=var.line, column=var.column)
        if tok.type == TokenType.SEMICOLON:
            self.advance()
            return None
        raise self.error(
            "E1003",
            f"expected a declaration, found {tok.value or tok.type.name.lower()!r}",
        )

    # --- entities ---------------------------------------------------------

    def parse_entity(self) -> N.EntityDecl:
        kw = self.expect(TokenType.KW_ENTITY, "'entity'")
        name = self.name_token("entity name")
        decl = N.EntityDecl(name=name.value, line=kw.line, column=kw.column)
        self.expect(TokenType.LBRACE, "'{'")
        while not self.at(TokenType.RBRACE, TokenType.EOF):
            if self.at_decl_boundary():
                break
            try:
                decl.properties.append(self.parse_property())
            except ParseError:
                self.sync_statement()
        self.soft_rbrace()
        return decl

    def parse_property(self) -> N.PropertyDecl:
        first = self.name_token("property or type name")
        prop = N.PropertyDecl(line=first.line, column=first.column)

        if self.at(TokenType.LT):
            # list<T> name
            type_ref = self.finish_generic_type(first)
            prop.declared = type_ref
            prop.name = self.name_token("property name").value
        elif self.at_name():
            # TYPE name
            prop.declared = N.TypeRef(name=first.value, line=first.line, column=first.column)
            prop.name = self.name_token("property name").value
        elif self.at(TokenType.COLON):
            # name : <target or tag list>
            self.advance()
            prop.name = first.value
            prop.colon_form = True
            target = self.name_token("type or tag name")
            if self.at(TokenType.LT):
                # name: Entity<list>
                marker = self.advance()
                inner = self.name_token("collection marker")
                self.expect(TokenType.GT, "'>'")
                if inner.value != "list":
                    self.sink.error(
                        "E1004",
                        f"unknown collection marker {inner.value!r}",
                        marker.line,
                        marker.column,
                    )
                prop.declared = N.TypeRef(
                    name="list",
                    arg=N.TypeRef(name=target.value, line=target.line, column=target.column),
                    line=target.line,
                    column=target.column,
                )
            elif self.at(TokenType.COMMA):
                prop.tags.append(target.value)
                while self.at(TokenType.COMMA):
                    self.advance()
                    prop.tags.append(self.name_token("tag name").value)
            else:
                prop.declared = N.TypeRef(
                    name=target.value, line=target.line, column=target.column
                )
        else:
            raise self.error("E1005", "malformed property declaration", first)

        if not prop.tags and self.at(TokenType.COLON):
            self.advance()
            prop.default = self.parse_default_value()
        self.expect(TokenType.SEMICOLON, "';'")
        return prop

    def parse_default_value(self) -> N.Expr:
        # Bare calendar dates (2014-07-21) are folded into a string literal.
        if (
            self.at(TokenType.INT)
            and self.peek_token().type == TokenType.MINUS
            and self.peek_token(2).type == TokenType.INT
            and self.peek_token(3).type == TokenType.MINUS
            and self.peek_token(4).type == TokenType.INT
        ):
            y = self.advance()
            self.advance()
            m = self.advance()
            self.advance()
            d = self.advance()
            text = f"{int(y.value):04d}-{int(m.value):02d}-{int(d.value):02d}"
            return N.StringLit(value=text, line=y.line, column=y.column)
        return self.parse_expression()

    def finish_generic_type(self, head: Token) -> N.TypeRef:
        self.expect(TokenType.LT, "'<'")
        inner = self.name_token("type name")
        self.expect(TokenType.GT, "'>'")
        return N.TypeRef(
            name=head.value,
            arg=N.TypeRef(name=inner.value, line=inner.line, column=inner.column),
            line=head.line,
            column=head.column,
        )

    # --- operations -------------------------------------------------------

    def parse_operation(self) -> N.OperationDecl:
        is_async = False
        start = self.current_token
        if self.at(TokenType.KW_ASYNC):
            self.advance()
            is_async = True
        self.expect(TokenType.KW_OPERATION, "'operation'")
        name = self.name_token("operation name")
        decl = N.OperationDecl(
            name=name.value, is_async=is_async, line=start.line, column=start.column
        )
        self.expect(TokenType.LPAREN, "'('")
        decl.params = self.parse_params()
        self.expect(TokenType.RPAREN, "')'")
        self.expect(TokenType.LBRACE, "'{'")
        decl.body = self.parse_statements_until(TokenType.RBRACE)
        self.soft_rbrace()
        return decl

    def parse_params(self) -> list[N.Param]:
        params: list[N.Param] = []
        if self.at(TokenType.RPAREN):
            return params
        while True:
            params.append(self.parse_param())
            if self.at(TokenType.COMMA):
                self.advance()
                continue
            return params

    def parse_param(self) -> N.Param:
        first = self.name_token("parameter")
        if self.at(TokenType.LT):
            type_ref = self.finish_generic_type(first)
            name = self.name_token("parameter name")
            return N.Param(
                name=name.value, type_ref=type_ref, line=first.line, column=first.column
            )
        if self.at_name():
            name = self.name_token("parameter name")
            return N.Param(
                name=name.value,
                type_ref=N.TypeRef(name=first.value, line=first.line, column=first.column),
                line=first.line,
                column=first.column,
            )
        return N.Param(name=first.value, line=first.line, column=first.column)

    # --- screens ----------------------------------------------------------

    def parse_screen(self) -> N.ScreenDecl:
        kw = self.expect(TokenType.KW_SCREEN, "'screen'")
        name = self.name_token("screen name")
        decl = N.ScreenDecl(name=name.value, line=kw.line, column=kw.column)
        if self.at(TokenType.LPAREN):
            self.advance()
            decl.params = self.parse_params()
            self.expect(TokenType.RPAREN, "')'")
        if self.at(TokenType.KW_CACHED):
            self.advance()
            decl.cached = True
        self.expect(TokenType.LBRACE, "'{'")
        decl.items = self.parse_screen_items_until(TokenType.RBRACE)
        self.soft_rbrace()
        return decl

    def parse_screen_items_until(self, end: TokenType) -> list[N.ScreenItemOrStmt]:
        items: list[N.ScreenItemOrStmt] = []
        while not self.at(end, TokenType.EOF):
            if self.at(TokenType.SEMICOLON):
                self.advance()
                continue
            if self.at_decl_boundary():
                break
            try:
                item = self.parse_screen_item()
            except ParseError:
                self.sync_statement()
                continue
            if item is not None:
                items.append(item)
        return items

    def parse_screen_item(self) -> N.ScreenItemOrStmt | None:
        tok = self.current_token
        t = tok.type

        if t == TokenType.KW_HEADER and self.peek_token().type == TokenType.LPAREN:
            return self.parse_header()
        if t == TokenType.KW_IMPORT and self.peek_token().type == TokenType.LPAREN:
            return self.parse_import_item()
        if t == TokenType.KW_HANDLER:
            return self.parse_handler()
        if t in (TokenType.KW_WHEN, TokenType.KW_WHERE) and (
            self.peek_token().type == TokenType.LPAREN
        ):
            return self.parse_rule(leading_if=False)
        if t == TokenType.KW_IF and self.peek_token().type in (
            TokenType.KW_WHEN,
            TokenType.KW_WHERE,
        ):
            return self.parse_rule(leading_if=True)
        if t == TokenType.LT and self.peek_token().type in (
            TokenType.IDENT,
            *NAME_LIKE_KEYWORDS,
        ):
            return self.parse_markup()
        if t == TokenType.KW_FOREACH:
            return self.parse_foreach(screen_context=True)
        if t in (TokenType.KW_VAR, TokenType.KW_IF, TokenType.KW_RETURN):
            return self.parse_statement()
        # Remaining forms start with an expression: element items,
        # assignments and bare calls.
        return self.parse_element_or_statement()

    def parse_header(self) -> N.HeaderItem:
        kw = self.advance()
        item = N.HeaderItem(line=kw.line, column=kw.column)
        self.expect(TokenType.LPAREN, "'('")
        if not self.at(TokenType.RPAREN):
            item.title = self.parse_expression()
        self.expect(TokenType.RPAREN, "')'")
        if self.at(TokenType.LBRACE):
            self.advance()
            item.items = self.parse_screen_items_until(TokenType.RBRACE)
            self.expect(TokenType.RBRACE, "'}'")
        if self.at(TokenType.SEMICOLON):
            self.advance()
        return item

    def parse_import_item(self) -> N.ImportItem:
        kw = self.advance()
        item = N.ImportItem(line=kw.line, column=kw.column)
        self.expect(TokenType.LPAREN, "'('")
        if not self.at(TokenType.RPAREN):
            item.args.append(self.parse_expression())
            while self.at(TokenType.COMMA):
                self.advance()
                item.args.append(self.parse_expression())
        self.expect(TokenType.RPAREN, "')'")
        if self.at(TokenType.SEMICOLON):
            self.advance()
        return item

    def parse_handler(self) -> N.HandlerItem:
        kw = self.advance()
        item = N.HandlerItem(line=kw.line, column=kw.column)
        self.expect(TokenType.LBRACE, "'{'")
        while not self.at(TokenType.RBRACE, TokenType.EOF):
            if self.at(TokenType.SEMICOLON):
                self.advance()
                continue
            try:
                sub = self.parse_element_or_statement()
            except ParseError:
                self.sync_statement()
                continue
            if isinstance(sub, N.ElementItem):
                item.items.append(sub)
            else:
                self.sink.error(
                    "E1006",
                    "handler blocks may only contain element bindings",
                    kw.line,
                    kw.column,
                )
        self.expect(TokenType.RBRACE, "'}'")
        return item

    def parse_rule(self, leading_if: bool) -> N.RuleItem:
        start = self.current_token
        if leading_if:
            self.advance()
        rule = N.RuleItem(line=start.line, column=start.column)
        rule.clauses.append(self.parse_rule_clause(require_kind=True))
        while True:
            if self.at(TokenType.KW_ELSEIF):
                self.advance()
                rule.clauses.append(self.parse_rule_clause(require_kind=False))
            elif self.at(TokenType.KW_ELSE):
                self.advance()
                self.expect(TokenType.LBRACE, "'{'")
                rule.else_items = self.parse_screen_items_until(TokenType.RBRACE)
                self.expect(TokenType.RBRACE, "'}'")
                return rule
            else:
                return rule

    def parse_rule_clause(self, require_kind: bool = True) -> N.RuleClause:
        tok = self.current_token
        if tok.type in (TokenType.KW_WHEN, TokenType.KW_WHERE):
            self.advance()
            kind = tok.value
        elif require_kind:
            raise self.error("E1007", "expected 'when' or 'where' clause")
        else:
            kind = "when"
        clause = N.RuleClause(kind=kind, line=tok.line, column=tok.column)
        self.expect(TokenType.LPAREN, "'('")
        clause.cond = self.parse_expression()
        self.expect(TokenType.RPAREN, "')'")
        self.expect(TokenType.LBRACE, "'{'")
        clause.items = self.parse_screen_items_until(TokenType.RBRACE)
        self.expect(TokenType.RBRACE, "'}'")
        return clause

    def parse_markup(self) -> N.MarkupItem:
        lt = self.expect(TokenType.LT, "'<'")
        tag = self.name_token("tag name")
        item = N.MarkupItem(tag=tag.value, line=lt.line, column=lt.column)
        while self.at_name():
            attr_name = self.name_token("attribute name")
            attr = N.MarkupAttr(
                name=attr_name.value, line=attr_name.line, column=attr_name.column
            )
            if self.at(TokenType.ASSIGN):
                self.advance()
                attr.value = self.parse_unary()
            item.attrs.append(attr)
            if self.at(TokenType.COMMA):
                self.advance()
        if self.at(TokenType.SLASH):
            self.advance()
            self.expect(TokenType.GT, "'>'")
            item.self_closing = True
            return item
        self.expect(TokenType.GT, "'>'")
        item.self_closing = False
        while not self.at(TokenType.EOF):
            if self.at(TokenType.LT) and self.peek_token().type == TokenType.SLASH:
                break
            if self.at(TokenType.LT):
                item.children.append(self.parse_markup())
            else:
                raise self.error("E1008", "expected child element or closing tag")
        self.expect(TokenType.LT, "'<'")
        self.expect(TokenType.SLASH, "'/'")
        closing = self.name_token("closing tag name")
        if closing.value != item.tag:
            self.sink.error(
                "E1009",
                f"closing tag {closing.value!r} does not match {item.tag!r}",
                closing.line,
                closing.column,
                closing.length,
            )
        self.expect(TokenType.GT, "'>'")
        return item

    def parse_element_or_statement(self) -> N.ScreenItemOrStmt:
        expr = self.parse_expression()
        if self.at(TokenType.LBRACE):
            lb = self.advance()
            args = self.parse_element_args(TokenType.RBRACE)
            self.expect(TokenType.RBRACE, "'}'")
            if self.at(TokenType.SEMICOLON):
                self.advance()
            return N.ElementItem(
                callee=expr, args=args, brace_form=True, line=lb.line, column=lb.column
            )
        if self.at(TokenType.ASSIGN):
            self.advance()
            if not isinstance(expr, (N.Name, N.Member)):
                raise self.error("E1010", "assignment target must be a name or member path")
            value = self.parse_expression()
            self.expect(TokenType.SEMICOLON, "';'")
            return N.Assign(target=expr, value=value, line=expr.line, column=expr.column)
        if isinstance(expr, N.Call) and self.is_element_call(expr):
            if self.at(TokenType.SEMICOLON):
                self.advance()
            return N.ElementItem(
                callee=expr.callee,
                args=expr.args,
                brace_form=False,
                line=expr.line,
                column=expr.column,
            )
        self.expect(TokenType.SEMICOLON, "';'")
        return N.ExprStmt(expr=expr, line=expr.line, column=expr.column)

    @staticmethod
    def is_element_call(expr: N.Call) -> bool:
        """Calls naming a layout element, or carrying named attributes,
        declare UI content; anything else is an ordinary invocation."""
        if any(a.name is not None for a in expr.args):
            return True
        callee = expr.callee
        return isinstance(callee, N.Name) and callee.ident in ELEMENT_NAMES

    def parse_element_args(self, end: TokenType) -> list[N.Arg]:
        args: list[N.Arg] = []
        while not self.at(end, TokenType.EOF):
            if self.at(TokenType.COMMA, TokenType.SEMICOLON):
                self.advance()
                continue
            args.append(self.parse_arg())
        return args

    def parse_arg(self) -> N.Arg:
        tok = self.current_token
        if self.at_name() and self.peek_token().type == TokenType.ASSIGN:
            name = self.name_token("argument name")
            self.advance()
            value = self.parse_arg_value()
            return N.Arg(name=name.value, value=value, line=tok.line, column=tok.column)
        value = self.parse_arg_value()
        return N.Arg(value=value, line=tok.line, column=tok.column)

    def parse_arg_value(self) -> N.Expr:
        if self.at(TokenType.LBRACE):
            lb = self.advance()
            stmts = self.parse_statements_until(TokenType.RBRACE)
            self.expect(TokenType.RBRACE, "'}'")
            return N.BlockExpr(stmts=stmts, line=lb.line, column=lb.column)
        expr = self.parse_expression()
        # A bare action call like history.go(-1) used as an argument is a
        # one-statement handler body.
        if isinstance(expr, N.Call) and self.at(TokenType.SEMICOLON):
            stmt = N.ExprStmt(expr=expr, line=expr.line, column=expr.column)
            return N.BlockExpr(stmts=[stmt], line=expr.line, column=expr.column)
        return expr

    # --- widgets and gestures --------------------------------------------

    def parse_widget(self) -> N.WidgetDecl:
        kw = self.expect(TokenType.KW_WIDGET, "'widget'")
        kind = self.name_token("widget kind")
        name = self.name_token("widget name")
        decl = N.WidgetDecl(
            kind=kind.value, name=name.value, line=kw.line, column=kw.column
        )
        if self.at(TokenType.LPAREN):
            self.advance()
            decl.params = self.parse_params()
            self.expect(TokenType.RPAREN, "')'")
        self.expect(TokenType.LBRACE, "'{'")
        decl.items = self.parse_screen_items_until(TokenType.RBRACE)
        self.soft_rbrace()
        return decl

    def parse_touch(self) -> N.TouchDecl:
        kw = self.expect(TokenType.KW_TOUCH, "'touch'")
        kind = self.name_token("gesture kind")
        name = self.name_token("gesture name")
        decl = N.TouchDecl(
            kind=kind.value, name=name.value, line=kw.line, column=kw.column
        )
        if self.at(TokenType.LPAREN):
            self.advance()
            decl.params = self.parse_params()
            self.expect(TokenType.RPAREN, "')'")
        self.expect(TokenType.LBRACE, "'{'")
        decl.body = self.parse_statements_until(TokenType.RBRACE)
        self.soft_rbrace()
        return decl

    # --- statements -------------------------------------------------------

    def parse_statements_until(self, end: TokenType) -> list[N.Stmt]:
        stmts: list[N.Stmt] = []
        while not self.at(end, TokenType.EOF):
            if self.at(TokenType.SEMICOLON):
                self.advance()
                continue
            if self.at_decl_boundary():
                break
            try:
                stmts.append(self.parse_statement())
            except ParseError:
                self.sync_statement()
        return stmts

    def parse_statement(self) -> N.Stmt:
        tok = self.current_token
        if tok.type == TokenType.KW_VAR:
            return self.parse_var_decl()
        if tok.type == TokenType.KW_FOREACH:
            return self.parse_foreach()
        if tok.type == TokenType.KW_IF:
            return self.parse_if()
        if tok.type == TokenType.KW_RETURN:
            self.advance()
            stmt = N.ReturnStmt(line=tok.line, column=tok.column)
            if not self.at(TokenType.SEMICOLON):
                stmt.value = self.parse_expression()
            self.expect(TokenType.SEMICOLON, "';'")
            return stmt
        expr = self.parse_expression()
        if self.at(TokenType.ASSIGN):
            self.advance()
            if not isinstance(expr, (N.Name, N.Member)):
                raise self.error("E1010", "assignment target must be a name or member path")
            value = self.parse_expression()
            self.expect(TokenType.SEMICOLON, "';'")
            return N.Assign(target=expr, value=value, line=expr.line, column=expr.column)
        self.expect(TokenType.SEMICOLON, "';'")
        return N.ExprStmt(expr=expr, line=expr.line, column=expr.column)

    def parse_var_decl(self) -> N.VarDecl:
        kw = self.expect(TokenType.KW_VAR, "'var'")
        name = self.name_token("variable name")
        self.expect(TokenType.ASSIGN, "'='")
        init = self.parse_expression()
        self.expect(TokenType.SEMICOLON, "';'")
        return N.VarDecl(name=name.value, init=init, line=kw.line, column=kw.column)

    def parse_foreach(self, screen_context: bool = False) -> N.Foreach:
        kw = self.expect(TokenType.KW_FOREACH, "'foreach'")
        self.expect(TokenType.LPAREN, "'('")
        var = self.name_token("loop variable")
        self.expect(TokenType.KW_IN, "'in'")
        iterable = self.parse_expression()
        self.expect(TokenType.RPAREN, "')'")
        self.expect(TokenType.LBRACE, "'{'")
        if screen_context:
            body = self.parse_screen_items_until(TokenType.RBRACE)
        else:
            body = self.parse_statements_until(TokenType.RBRACE)
        self.expect(TokenType.RBRACE, "'}'")
        return N.Foreach(
            var=var.value, iterable=iterable, body=body, line=kw.line, column=kw.column
        )

    def parse_if(self) -> N.IfStmt:
        kw = self.expect(TokenType.KW_IF, "'if'")
        stmt = N.IfStmt(line=kw.line, column=kw.column)
        stmt.branches.append(self.parse_if_branch())
        while True:
            if self.at(TokenType.KW_ELSEIF):
                self.advance()
                stmt.branches.append(self.parse_if_branch())
            elif self.at(TokenType.KW_ELSE):
                self.advance()
                self.expect(TokenType.LBRACE, "'{'")
                stmt.else_body = self.parse_statements_until(TokenType.RBRACE)
                self.expect(TokenType.RBRACE, "'}'")
                return stmt
            else:
                return stmt

    def parse_if_branch(self) -> tuple[N.Expr, list[N.Stmt]]:
        self.expect(TokenType.LPAREN, "'('")
        cond = self.parse_expression()
        self.expect(TokenType.RPAREN, "')'")
        self.expect(TokenType.LBRACE, "'{'")
        body = self.parse_statements_until(TokenType.RBRACE)
        self.expect(TokenType.RBRACE, "'}'")
        return (cond, body)

    # --- expressions ------------------------------------------------------

    def parse_expression(self) -> N.Expr:
        return self.parse_or()

    def parse_or(self) -> N.Expr:
        left = self.parse_and()
        while self.at(TokenType.OR):
            op = self.advance()
            right = self.parse_and()
            left = N.Binary(op="||", left=left, right=right, line=op.line, column=op.column)
        return left

    def parse_and(self) -> N.Expr:
        left = self.parse_comparison()
        while self.at(TokenType.AND):
            op = self.advance()
            right = self.parse_comparison()
            left = N.Binary(op="&&", left=left, right=right, line=op.line, column=op.column)
        return left

    _CMP = {
        TokenType.EQ: "==",
        TokenType.NEQ: "!=",
        TokenType.LT: "<",
        TokenType.GT: ">",
        TokenType.LTE: "<=",
        TokenType.GTE: ">=",
        TokenType.KW_IN: "in",
    }

    def parse_comparison(self) -> N.Expr:
        left = self.parse_additive()
        if self.current_token.type in self._CMP:
            op = self.advance()
            right = self.parse_additive()
            return N.Binary(
                op=self._CMP[op.type], left=left, right=right, line=op.line, column=op.column
            )
        return left

    def parse_additive(self) -> N.Expr:
        left = self.parse_multiplicative()
        while self.at(TokenType.PLUS, TokenType.MINUS):
            op = self.advance()
            right = self.parse_multiplicative()
            left = N.Binary(
                op=op.value, left=left, right=right, line=op.line, column=op.column
            )
        return left

    def parse_multiplicative(self) -> N.Expr:
        left = self.parse_unary()
        while self.at(TokenType.STAR, TokenType.PERCENT):
            op = self.advance()
            right = self.parse_unary()
            left = N.Binary(
                op=op.value, left=left, right=right, line=op.line, column=op.column
            )
        return left

    def parse_unary(self) -> N.Expr:
        tok = self.current_token
        if tok.type in (TokenType.NOT, TokenType.MINUS):
            self.advance()
            operand = self.parse_unary()
            return N.Unary(op=tok.value, operand=operand, line=tok.line, column=tok.column)
        if tok.type == TokenType.KW_NEW:
            self.advance()
            target = self.parse_postfix()
            if not isinstance(target, N.Call):
                self.sink.error(
                    "E1011",
                    "'new' must be followed by a screen call",
                    tok.line,
                    tok.column,
                )
                target = N.Call(callee=target, line=tok.line, column=tok.column)
            return N.NewExpr(call=target, line=tok.line, column=tok.column)
        return self.parse_postfix()

    def parse_postfix(self) -> N.Expr:
        expr = self.parse_primary()
        while True:
            if self.at(TokenType.DOT):
                self.advance()
                name = self.name_token("member name")
                expr = N.Member(
                    obj=expr, name=name.value, line=name.line, column=name.column
                )
            elif self.at(TokenType.LPAREN):
                lp = self.advance()
                args: list[N.Arg] = []
                while not self.at(TokenType.RPAREN, TokenType.EOF):
                    if self.at(TokenType.COMMA, TokenType.SEMICOLON):
                        self.advance()
                        continue
                    args.append(self.parse_arg())
                self.expect(TokenType.RPAREN, "')'")
                expr = N.Call(callee=expr, args=args, line=lp.line, column=lp.column)
            else:
                return expr

    def parse_primary(self) -> N.Expr:
        tok = self.current_token
        if tok.type == TokenType.STRING:
            self.advance()
            return N.StringLit(value=tok.value, line=tok.line, column=tok.column)
        if tok.type == TokenType.INT:
            self.advance()
            return N.IntLit(value=int(tok.value), line=tok.line, column=tok.column)
        if tok.type == TokenType.KW_TRUE:
            self.advance()
            return N.BoolLit(value=True, line=tok.line, column=tok.column)
        if tok.type == TokenType.KW_FALSE:
            self.advance()
            return N.BoolLit(value=False, line=tok.line, column=tok.column)
        if tok.type == TokenType.LPAREN:
            self.advance()
            expr = self.parse_expression()
            self.expect(TokenType.RPAREN, "')'")
            return expr
        if self.at_name():
            self.advance()
            return N.Name(ident=tok.value, line=tok.line, column=tok.column)
        got = tok.value or tok.type.name.lower()
        raise self.error("E1012", f"expected an expression, found {got!r}")


def parse(source: str, sink: DiagnosticSink | None = None) -> tuple[N.Module, DiagnosticSink]:
    """Parse a complete module.  Never raises."""
    sink = sink if sink is not None else DiagnosticSink()
    tokens = tokenize(source, sink)
    tokens = [t for t in tokens if t.type != TokenType.ERROR]
    module = Parser(tokens, sink).parse_module()
    return module, sink
