"""Bundle assembly: screens, stylesheets, script payload, manifest.

Output is a flat path->bytes map so callers can write it to disk or
serve it directly.  Byte determinism is a contract: the same module
and options always produce identical files.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from muit.dsl import DiagnosticSink, check
from muit.dsl import nodes as N
from muit.dsl.printer import print_type_ref

from .descriptors import block_descriptor, expr_descriptor
from .html import CompileError, NavEdge, lower_screen
from .runtime_js import RUNTIME_JS
from .styles import STYLESHEETS

DEEP_LINK_TEMPLATE = "/task/{instance}/ui#{screen}"

MANIFEST_VERSION = 1


@dataclass
class CompileOptions:
    app_name: str = "app"


@dataclass
class PageBundle:
    files: dict[str, bytes]
    manifest: dict
    payload: dict

    def binding_table(self, screen: str) -> list[dict]:
        return self.payload["screens"][screen]["bindings"]

    @property
    def entry(self) -> str:
        return self.manifest["entry"]


def _sha256(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _json_bytes(value, pretty: bool = False) -> bytes:
    if pretty:
        text = json.dumps(value, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    else:
        text = json.dumps(value, separators=(",", ":"), sort_keys=True, ensure_ascii=False)
    return text.encode("utf-8")


def _service_url(module: N.Module) -> str | None:
    for mv in module.module_vars:
        decl = mv.decl
        if decl is not None and decl.name == "service_url" and isinstance(decl.init, N.StringLit):
            return decl.init.value
    return None


def build_navigation(module: N.Module, edges: list[NavEdge]) -> dict:
    nodes = [s.name for s in module.screens]
    declared = set(nodes)
    for edge in edges:
        if edge.target is not None and edge.target not in declared:
            raise CompileError(f"navigation to undeclared screen {edge.target!r}")
    ordered = sorted(
        (e.as_json() for e in edges),
        key=lambda e: (e["from"], e["kind"], e["to"] or "", e["via"]),
    )
    deduped = []
    for edge in ordered:
        if edge not in deduped:
            deduped.append(edge)
    return {"nodes": nodes, "edges": deduped}


def compile_bundle(module: N.Module, options: CompileOptions | None = None) -> PageBundle:
    options = options or CompileOptions()
    sink = DiagnosticSink()
    analysis = check(module, sink)
    if sink.has_errors():
        listing = "; ".join(d.format() for d in sink.errors[:5])
        raise CompileError(f"module has {len(sink.errors)} error(s): {listing}")
    if not module.screens:
        raise CompileError("module declares no screens")

    files: dict[str, bytes] = {}
    screens_payload: dict[str, dict] = {}
    edges: list[NavEdge] = []

    for screen in module.screens:
        lowering = lower_screen(module, screen)
        path = f"screens/{screen.name}.html"
        files[path] = lowering.html.encode("utf-8")
        edges.extend(lowering.edges)
        screens_payload[screen.name] = {
            "path": path,
            "cached": screen.cached,
            "params": [
                {"name": p.name, "type": print_type_ref(p.type_ref) if p.type_ref else "any"}
                for p in screen.params
            ],
            "setup": lowering.setup,
            "exprs": lowering.exprs,
            "rules": lowering.rules,
            "bindings": lowering.bindings,
            "foreach": lowering.foreach,
            "widgets": lowering.widgets,
            "touches": lowering.touches,
        }

    for path, css in STYLESHEETS.items():
        files[path] = css.encode("utf-8")

    navigation = build_navigation(module, edges)
    entry = module.screens[0].name

    entities_payload = {}
    for entity in module.entities:
        props = analysis.entity_props.get(entity.name, {})
        defaults = analysis.entity_defaults.get(entity.name, {})
        tags = analysis.entity_tags.get(entity.name, {})
        entities_payload[entity.name] = {
            "props": [
                {
                    "name": prop.name,
                    "type": str(props.get(prop.name, "any")),
                    "default": defaults.get(prop.name),
                    "tags": tags.get(prop.name),
                }
                for prop in entity.properties
            ]
        }

    operations_payload = {}
    for op in module.operations:
        operations_payload[op.name] = {
            "params": [
                {"name": p.name, "type": print_type_ref(p.type_ref) if p.type_ref else "any"}
                for p in op.params
            ],
            "remote": op.name in analysis.remote_operations,
            "async": op.is_async,
            "body": block_descriptor(op.body),
        }

    widgets_payload = {
        w.name: {
            "kind": w.kind,
            "behavior": block_descriptor([i for i in w.items if isinstance(i, N.Stmt)]),
        }
        for w in module.widgets
    }
    touches_payload = {
        t.name: {"kind": t.kind, "action": block_descriptor(t.body)} for t in module.touches
    }
    vars_payload = {
        mv.decl.name: expr_descriptor(mv.decl.init) if mv.decl.init is not None else None
        for mv in module.module_vars
        if mv.decl is not None
    }

    payload = {
        "app": options.app_name,
        "entry": entry,
        "service_url": _service_url(module),
        "deep_link_template": DEEP_LINK_TEMPLATE,
        "vars": vars_payload,
        "screens": screens_payload,
        "entities": entities_payload,
        "operations": operations_payload,
        "widgets": widgets_payload,
        "touches": touches_payload,
        "navigation": navigation,
    }

    app_js = (
        "/* Generated task-UI payload and bootstrap. */\n"
        "window.MUIT_APP = " + _json_bytes(payload).decode("utf-8") + ";\n" + RUNTIME_JS
    )
    files["app.js"] = app_js.encode("utf-8")

    shared_assets = sorted(STYLESHEETS) + ["app.js"]
    cached_screens = [s.name for s in module.screens if s.cached]
    cache_assets: list[str] = []
    if cached_screens:
        cache_assets = sorted(
            set(shared_assets) | {f"screens/{name}.html" for name in cached_screens}
        )

    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "app": options.app_name,
        "entry": entry,
        "deep_link_template": DEEP_LINK_TEMPLATE,
        "service_url": _service_url(module),
        "screens": [
            {
                "name": s.name,
                "path": f"screens/{s.name}.html",
                "cached": s.cached,
                "params": screens_payload[s.name]["params"],
            }
            for s in module.screens
        ],
        "navigation": navigation,
        "stack": {"push": "item-select", "pop": "back"},
        "assets": {path: _sha256(data) for path, data in sorted(files.items())},
        "cache_assets": cache_assets,
    }
    files["manifest.json"] = _json_bytes(manifest, pretty=True)

    return PageBundle(files=files, manifest=manifest, payload=payload)


def write_bundle(bundle: PageBundle, out_dir) -> None:
    from pathlib import Path

    root = Path(out_dir)
    for path, data in sorted(bundle.files.items()):
        target = root / path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
