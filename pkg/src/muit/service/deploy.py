"""Deployments: a compiled task UI plus the contract for its results.

A deployment owns one page bundle, the per-operation field schema the
device must satisfy when submitting, and a result handler per
operation that turns the submitted fields into the response payload
sent back to the process engine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date, timedelta

from muit.bridge import WireFormatError
from muit.codegen import CompileOptions, PageBundle, compile_bundle
from muit.dsl import analyze

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}(?:[T ].*)?$")


class DeploymentError(Exception):
    pass


@dataclass
class Deployment:
    name: str
    bundle: PageBundle
    # operation -> {field -> DSL type spelling}; the accepted fields
    # are the operation's parameters plus any declared result fields.
    schema: dict[str, dict[str, str]]
    assignee: str = ""
    handlers: dict = field(default_factory=dict)

    @property
    def entry_screen(self) -> str:
        entry = self.bundle.manifest["entry"]
        return entry.rsplit("/", 1)[-1].rsplit(".", 1)[0]

    def operations(self) -> list[str]:
        return sorted(self.schema)

    def validate_submission(self, operation: str, data) -> dict:
        if operation not in self.schema:
            raise WireFormatError(f"unknown operation {operation!r}", "$.data")
        if not isinstance(data, dict):
            raise WireFormatError("submission must be an object", "$.data")
        allowed = self.schema[operation]
        out = {}
        for key, value in data.items():
            path = f"$.data.{key}"
            if key not in allowed:
                raise WireFormatError(f"unknown field for {operation}", path)
            out[key] = _check_type(value, allowed[key], path)
        return out

    def handle_result(self, operation: str, request_payload: dict, data: dict) -> dict:
        handler = self.handlers.get(operation)
        if handler is None:
            return data
        return handler(request_payload, data)


def _check_type(value, type_name: str, path: str):
    if type_name in ("String", "text"):
        if not isinstance(value, str):
            raise WireFormatError(f"expected a string, got {type(value).__name__}", path)
        return value
    if type_name == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, str) and re.fullmatch(r"-?\d+", value):
                return int(value)
            raise WireFormatError(f"expected an integer, got {value!r}", path)
        return value
    if type_name == "boolean":
        if not isinstance(value, bool):
            raise WireFormatError(f"expected a boolean, got {value!r}", path)
        return value
    if type_name == "DateTime":
        if not isinstance(value, str) or not _DATE_RE.match(value):
            raise WireFormatError(f"expected an ISO date, got {value!r}", path)
        return value
    if type_name.startswith("list<"):
        if not isinstance(value, list):
            raise WireFormatError(f"expected a list, got {type(value).__name__}", path)
        return value
    # Entity-typed fields travel as a record or as the entity's key.
    if not isinstance(value, (str, dict)):
        raise WireFormatError(
            f"expected a record or key string, got {type(value).__name__}", path
        )
    return value


def find_due_date(payload: dict) -> str | None:
    """The task's due date from a request payload, wherever it sits."""
    for key in ("dueDate", "due_date"):
        value = payload.get(key)
        if isinstance(value, str) and _DATE_RE.match(value):
            return value[:10]
    for value in payload.values():
        if isinstance(value, dict):
            found = find_due_date(value)
            if found:
                return found
    return None


def approve_result(request_payload: dict, data: dict) -> dict:
    return {"status": "approved"}


def delay_result(request_payload: dict, data: dict) -> dict:
    """Push the due date out by the submitted number of days."""
    days = data.get("days", 0)
    if isinstance(days, str):
        days = int(days)
    out = {"status": "delay"}
    due = find_due_date(request_payload)
    if due is not None:
        shifted = date.fromisoformat(due) + timedelta(days=days)
        out["dueDate"] = shifted.isoformat()
    return out


# Handlers for the task-approval operation family; other operations
# echo the submitted fields back as the response payload.
APPROVAL_HANDLERS = {
    "approveTask": approve_result,
    "delayTask": delay_result,
}

# Result fields the device may submit in addition to the operation's
# own parameters (the outcome-style submission shape).
APPROVAL_RESULT_FIELDS = {
    "approveTask": {"status": "String"},
    "delayTask": {"status": "String", "dueDate": "DateTime"},
}


def build_deployment(name: str, source: str, assignee: str = "",
                     handlers: dict | None = None,
                     result_fields: dict | None = None) -> Deployment:
    result = analyze(source)
    if not result.ok:
        messages = "; ".join(str(e) for e in result.errors[:3])
        raise DeploymentError(f"source for {name!r} does not compile: {messages}")
    bundle = compile_bundle(result.module, CompileOptions(app_name=name))

    schema: dict[str, dict[str, str]] = {}
    for op_name, op in bundle.payload["operations"].items():
        fields = {p["name"]: p["type"] for p in op["params"]}
        schema[op_name] = fields
    if handlers is None:
        handlers = {op: fn for op, fn in APPROVAL_HANDLERS.items() if op in schema}
    if result_fields is None:
        result_fields = APPROVAL_RESULT_FIELDS
    for op_name, extra in result_fields.items():
        if op_name in schema:
            for key, type_name in extra.items():
                schema[op_name].setdefault(key, type_name)
    return Deployment(
        name=name, bundle=bundle, schema=schema, assignee=assignee, handlers=handlers
    )
