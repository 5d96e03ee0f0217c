"""Parser structure, disambiguation and error recovery."""

from muit.dsl import DiagnosticSink, parse, print_module
from muit.dsl import nodes as N


def parse_clean(source: str) -> N.Module:
    module, sink = parse(source)
    assert not sink.has_errors(), [d.format() for d in sink.errors]
    return module


def first_screen_items(source: str):
    return parse_clean(source).screens[0].items


def test_entity_property_forms():
    module = parse_clean(
        """
        entity Task {
          String task_name: "Approval";
          DateTime createDate: 2014-07-21;
          int priority;
          list<Role> reviewers;
          role: Role;
          subtasks: Task<list>;
          category: travel, finance;
        }
        entity Role { String name; }
        """
    )
    props = {p.name: p for p in module.entities[0].properties}
    assert props["task_name"].default == N.StringLit(value="Approval")
    # Bare calendar dates fold into string literals.
    assert props["createDate"].default == N.StringLit(value="2014-07-21")
    assert props["priority"].declared and props["priority"].declared.name == "int"
    assert props["reviewers"].declared.name == "list"
    assert props["reviewers"].declared.arg.name == "Role"
    assert props["role"].colon_form and props["role"].declared.name == "Role"
    assert props["subtasks"].declared.name == "list"
    assert props["subtasks"].declared.arg.name == "Task"
    assert props["category"].tags == ["travel", "finance"]


def test_operation_named_import():
    module = parse_clean(
        'operation import(String WSDLUrl, String user, String pwd) { return httpRequest(WSDLUrl); }'
    )
    op = module.operations[0]
    assert op.name == "import"
    assert [p.name for p in op.params] == ["WSDLUrl", "user", "pwd"]
    assert all(p.type_ref.name == "String" for p in op.params)


def test_precedence_shape():
    module = parse_clean("operation f() { return a + b * c == d && e || f; }")
    expr = module.operations[0].body[0].value
    # ((((a + (b * c)) == d) && e) || f)
    assert expr.op == "||"
    assert expr.left.op == "&&"
    assert expr.left.left.op == "=="
    assert expr.left.left.left.op == "+"
    assert expr.left.left.left.right.op == "*"


def test_membership_operator():
    module = parse_clean('operation f(String k) { if (k in "abc") { add(k); } }')
    cond = module.operations[0].body[0].branches[0][0]
    assert cond.op == "in"


def test_element_brace_form_with_action():
    items = first_screen_items(
        'screen s() { button {"back", history.go(-1);}; }'
    )
    element = items[0]
    assert isinstance(element, N.ElementItem)
    assert element.brace_form
    assert element.args[0].value == N.StringLit(value="back")
    action = element.args[1].value
    assert isinstance(action, N.BlockExpr)
    call = action.stmts[0].expr
    assert isinstance(call, N.Call)
    assert call.callee == N.Member(obj=N.Name(ident="history"), name="go")


def test_element_call_vs_plain_invocation():
    items = first_screen_items(
        "screen s(Task t) { t(onClick = { approve(t); }); t.refresh(); }"
    )
    assert isinstance(items[0], N.ElementItem)
    assert isinstance(items[1], N.ExprStmt)


def test_named_element_paren_form():
    items = first_screen_items('screen s() { label("hi"); }')
    element = items[0]
    assert isinstance(element, N.ElementItem)
    assert not element.brace_form


def test_rule_with_else():
    items = first_screen_items(
        """
        screen s() {
          when (screen.deviceos == "iOS") { label("a"); }
          elseif (screen.deviceos == "android") { label("b"); }
          else { label("c"); }
        }
        """
    )
    rule = items[0]
    assert isinstance(rule, N.RuleItem)
    assert [c.kind for c in rule.clauses] == ["when", "when"]
    assert rule.else_items is not None


def test_where_clause():
    items = first_screen_items('screen s(Task t) { where (t.status == "open") { text(t.status); } }')
    rule = items[0]
    assert rule.clauses[0].kind == "where"


def test_new_screen_expression():
    items = first_screen_items(
        "screen detail(Task t) { }\nscreen s(Task t) { t(onClick = { new detail(t); }); }"
    )


def test_markup_item():
    module = parse_clean(
        'widget textInput tx1() { <input type = "text", value = reason/> }'
    )
    markup = module.widgets[0].items[0]
    assert isinstance(markup, N.MarkupItem)
    assert markup.tag == "input"
    assert markup.self_closing
    assert markup.attrs[0].name == "type"
    assert markup.attrs[1].value == N.Name(ident="reason")


def test_nested_markup():
    module = parse_clean("screen s() { <div class = \"row\"><span/></div> }")
    markup = module.screens[0].items[0]
    assert not markup.self_closing
    assert markup.children[0].tag == "span"


def test_screen_foreach_renders_items():
    items = first_screen_items(
        "screen s() { foreach (t in getTaskInfo()) { t(onClick = { new s(t); }); } }"
    )
    loop = items[0]
    assert isinstance(loop, N.Foreach)
    assert isinstance(loop.body[0], N.ElementItem)


def test_cached_screen_and_params():
    module = parse_clean("screen detail(Task t) cached { header(t.name); }")
    screen = module.screens[0]
    assert screen.cached
    assert screen.params[0].type_ref.name == "Task"


def test_recovery_skips_to_next_declaration():
    source = """
    entity Broken {
    operation ok() { return 1; }
    screen also_ok() { header("x"); }
    """
    module, sink = parse(source)
    assert sink.has_errors()
    names = [getattr(d, "name", None) for d in module.decls]
    assert "ok" in names or "also_ok" in names


def test_recovery_yields_all_following_declarations():
    source = "entity A { String x }\nentity B { String y; }\noperation f() { }"
    module, sink = parse(source)
    assert sink.has_errors()
    assert module.operation("f") is not None


def test_parse_is_total_on_garbage():
    for source in ("{{{{", "entity", "screen s() {", ")))", "var =;", "touch"):
        module, sink = parse(source)
        assert isinstance(module, N.Module)


def test_error_position_reported():
    _, sink = parse("entity T {\n  String;\n}")
    assert sink.has_errors()
    diag = sink.errors[0]
    assert diag.line == 2


def test_corpus_round_trip(corpus_sources):
    for name, source in corpus_sources.items():
        module, sink = parse(source)
        assert not sink.has_errors(), name
        printed = print_module(module)
        module2, sink2 = parse(printed)
        assert not sink2.has_errors(), (name, [d.format() for d in sink2.errors])
        assert module2 == module, name


def test_printer_idempotent(corpus_sources):
    for name, source in corpus_sources.items():
        module, _ = parse(source)
        once = print_module(module)
        twice = print_module(parse(once)[0])
        assert once == twice, name
