#!/usr/bin/env python3
"""Regenerate tests/fixtures/rule_vectors.json.

Each vector pairs a rule-condition descriptor with a device context
and the boolean the reference evaluator produces.  The browser runtime
replays the same file, which keeps the two evaluators in agreement
without sharing code.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from muit.codegen import expr_descriptor  # noqa: E402
from muit.dsl import analyze, evaluate_condition  # noqa: E402
from muit.dsl import nodes as N  # noqa: E402

CONTEXTS = {
    "ios_phone_portrait": {
        "screen.deviceos": "iOS",
        "screen.devicetype": "phone",
        "screen.window.innerWidth": 375,
        "screen.window.innerHeight": 667,
        "screen.device.orientation": "vertical",
        "network.online": True,
    },
    "android_phone_portrait": {
        "screen.deviceos": "Android",
        "screen.devicetype": "phone",
        "screen.window.innerWidth": 360,
        "screen.window.innerHeight": 640,
        "screen.device.orientation": "vertical",
        "network.online": True,
    },
    "android_tablet_landscape": {
        "screen.deviceos": "Android",
        "screen.devicetype": "tablet",
        "screen.window.innerWidth": 1024,
        "screen.window.innerHeight": 768,
        "screen.device.orientation": "horizontal",
        "network.online": True,
    },
    "ios_phone_landscape_offline": {
        "screen.deviceos": "iOS",
        "screen.devicetype": "phone",
        "screen.window.innerWidth": 667,
        "screen.window.innerHeight": 375,
        "screen.device.orientation": "horizontal",
        "network.online": False,
    },
    "desktop_wide": {
        "screen.deviceos": "desktop",
        "screen.devicetype": "tablet",
        "screen.window.innerWidth": 1280,
        "screen.window.innerHeight": 800,
        "screen.device.orientation": "horizontal",
        "network.online": True,
    },
    "narrow_offline": {
        "screen.deviceos": "Android",
        "screen.devicetype": "phone",
        "screen.window.innerWidth": 320,
        "screen.window.innerHeight": 480,
        "screen.device.orientation": "vertical",
        "network.online": False,
    },
}

# Beyond the corpus rules: operator coverage over context variables.
SYNTHETIC_CONDITIONS = [
    'screen.deviceos == "iOS"',
    'screen.deviceos != "iOS"',
    "screen.window.innerWidth > 500",
    "screen.window.innerWidth <= 360",
    '(screen.window.innerWidth > 500) || (screen.device.orientation == "horizontal")',
    '(screen.deviceos == "Android") && (screen.devicetype == "phone")',
    "!network.online",
    "network.online && (screen.window.innerHeight >= 600)",
    '(screen.devicetype == "tablet") || !network.online',
    "screen.window.innerWidth % 2 == 0",
    "screen.window.innerWidth + screen.window.innerHeight > 1000",
    '"i" in screen.deviceos',
    'screen.deviceos == "windows"',
    "screen.window.innerWidth < screen.window.innerHeight",
]


def corpus_conditions() -> list[tuple[str, N.Expr]]:
    found: list[tuple[str, N.Expr]] = []
    for path in sorted((ROOT / "corpus").glob("*.muit")):
        result = analyze(path.read_text())
        for screen in result.module.screens:
            for cond in _walk_rules(screen.items):
                found.append((f"{path.stem}/{screen.name}", cond))
    return found


def _walk_rules(items) -> list[N.Expr]:
    conds: list[N.Expr] = []
    for item in items:
        if isinstance(item, N.RuleItem):
            for clause in item.clauses:
                if clause.cond is not None:
                    conds.append(clause.cond)
                conds.extend(_walk_rules(clause.items))
            if item.else_items:
                conds.extend(_walk_rules(item.else_items))
        elif isinstance(item, (N.HeaderItem, N.HandlerItem)):
            conds.extend(_walk_rules(item.items))
        elif isinstance(item, N.Foreach):
            conds.extend(_walk_rules(item.body))
    return conds


def parse_condition(source: str) -> N.Expr:
    probe = "screen probe() { when (%s) { label(\"x\"); } }" % source
    result = analyze(probe)
    assert result.ok, f"condition does not parse: {source}"
    rule = result.module.screens[0].items[0]
    return rule.clauses[0].cond


def build_vectors() -> dict:
    conditions: list[tuple[str, N.Expr]] = corpus_conditions()
    for index, source in enumerate(SYNTHETIC_CONDITIONS):
        conditions.append((f"synthetic/{index}", parse_condition(source)))
    vectors = []
    for name, cond in conditions:
        descriptor = expr_descriptor(cond)
        for ctx_name, context in CONTEXTS.items():
            vectors.append(
                {
                    "name": f"{name}@{ctx_name}",
                    "expr": descriptor,
                    "context": context,
                    "expected": evaluate_condition(cond, context),
                }
            )
    return {"version": 1, "vectors": vectors}


def render() -> str:
    return json.dumps(build_vectors(), indent=1, sort_keys=True, ensure_ascii=False) + "\n"


if __name__ == "__main__":
    out = ROOT / "tests" / "fixtures" / "rule_vectors.json"
    out.write_text(render())
    data = build_vectors()
    trues = sum(1 for v in data["vectors"] if v["expected"])
    print(f"wrote {out} ({len(data['vectors'])} vectors, {trues} true)")
