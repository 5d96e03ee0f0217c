"""Emits UI-language source from a derived UI model.

The output is ordinary compiler input: it must parse and check with no
diagnostics, which the test suite enforces on every fixture.
"""

import re

from .model import UiModel, UiOperation, UiView
from .parser import parse_wsdl
from .transform import derive_ui_model

_FORM_INPUT_TYPES = {
    "String": "text",
    "int": "number",
    "boolean": "checkbox",
    "DateTime": "date",
}


def _ident(name: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9_]", "_", name)
    if not cleaned or cleaned[0].isdigit():
        cleaned = "_" + cleaned
    return cleaned


def _form_var(op: UiOperation, param_name: str) -> str:
    return f"f_{_ident(op.name)}_{_ident(param_name)}"


def _form_var_init(type_text: str) -> str:
    if type_text == "String":
        return '""'
    if type_text == "int":
        return "0"
    if type_text == "boolean":
        return "false"
    if type_text == "DateTime" or type_text.startswith("list<"):
        return "select(option.value)"
    # Entity-typed parameters start from a defaults-initialized instance.
    return f"{_ident(type_text)}.fromForm()"


def emit_dsl(model: UiModel) -> str:
    lines: list[str] = []
    out = lines.append

    out(f"// Generated from the {model.service_name or 'imported'} service contract.")
    out("")
    out(f'var service_url = "{model.service_url}";')

    form_ops = [op for op in model.operations if op.params]
    for op in form_ops:
        for param in op.params:
            out(f"var {_form_var(op, param.name)} = {_form_var_init(param.type_text)};")
    out("")

    for entity in model.entities:
        out(f"entity {_ident(entity.name)} {{")
        for prop in entity.properties:
            out(f"  {prop.type_text} {_ident(prop.name)};")
        out("}")
        out("")

    out("operation import(String WSDLUrl, String user, String pwd) {")
    out("  return httpRequest(WSDLUrl);")
    out("}")
    out("")

    for op in model.operations:
        params = ", ".join(f"{p.type_text} {_ident(p.name)}" for p in op.params)
        out(f"operation {_ident(op.name)}({params}) {{")
        request = f'httpRequest(service_url + "?op={_ident(op.name)}")'
        if op.is_event:
            out(f"  {request};")
        else:
            out(f"  return {request};")
        out("}")
        out("")

    ordered = sorted(
        model.views, key=lambda v: {"list": 0, "detail": 1, "form": 2, "action": 3}[v.kind]
    )
    for view in ordered:
        _emit_view(out, model, view)

    return "\n".join(lines).rstrip() + "\n"


def _emit_view(out, model: UiModel, view: UiView) -> None:
    if view.kind == "list":
        out(f"screen {_ident(view.name)}() {{")
        out(f'  header("{view.operation}");')
        out(f"  foreach (item in {_ident(view.operation)}()) {{")
        out(f"    item(onClick = {{ new {_ident(view.entity)}_detail(item); }});")
        out("  }")
        out("}")
        out("")
    elif view.kind == "detail":
        entity = model.entity(view.entity)
        out(f"screen {_ident(view.name)}({_ident(view.entity)} item) {{")
        out(f'  header("{view.entity}");')
        if entity is not None:
            for prop in entity.properties:
                out(f"  text(item.{_ident(prop.name)});")
        out("}")
        out("")
    elif view.kind == "form":
        op = next(o for o in model.operations if o.name == view.operation)
        out(f"screen {_ident(view.name)}() {{")
        out(f'  header("{view.operation}");')
        for param in op.params:
            input_type = _FORM_INPUT_TYPES.get(param.type_text)
            if input_type is not None:
                out(f'  <input type = "{input_type}", value = {_form_var(op, param.name)}/>')
        args = ", ".join(_form_var(op, p.name) for p in op.params)
        out("  handler {")
        out(f'    button {{ "submit", onClick = {{ {_ident(op.name)}({args}); }} }};')
        out("  }")
        out("}")
        out("")
    elif view.kind == "action":
        out(f"screen {_ident(view.name)}() {{")
        out(f'  header("{view.operation}");')
        out("  handler {")
        out(f'    button {{ "{view.operation}", onClick = {{ {_ident(view.operation)}(); }} }};')
        out("  }")
        out("}")
        out("")


def import_wsdl(text: str) -> tuple[UiModel, str]:
    """Full pipeline: contract text in, (UI model, DSL source) out."""
    service = parse_wsdl(text)
    model = derive_ui_model(service)
    return model, emit_dsl(model)
