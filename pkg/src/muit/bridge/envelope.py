"""Canonical task envelope: the pivot between SOAP and JSON wire forms.

The payload tree is restricted to JSON primitives (strings, ints,
booleans) plus maps and arrays.  Dates travel as ISO-8601 strings;
floats are rejected outright so no value changes precision crossing
the bridge.  XML attributes survive as "@"-prefixed keys.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime

REQUEST = "request"
RESPONSE = "response"


class BridgeError(Exception):
    pass


class SoapFormatError(BridgeError):
    """The XML side is malformed or outside the document/literal subset."""


class WireFormatError(BridgeError):
    """The JSON side violates the wire schema; `path` names the spot."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


def normalize_value(value, path: str = "$"):
    if isinstance(value, bool) or isinstance(value, int):
        return value
    if isinstance(value, str):
        return value
    if isinstance(value, datetime):
        return value.isoformat()
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, float):
        raise WireFormatError("floating point values are not representable", path)
    if isinstance(value, dict):
        out = {}
        for key, item in value.items():
            if not isinstance(key, str) or not key:
                raise WireFormatError("keys must be non-empty strings", path)
            out[key] = normalize_value(item, f"{path}.{key}")
        return out
    if isinstance(value, list):
        return [normalize_value(item, f"{path}[{i}]") for i, item in enumerate(value)]
    raise WireFormatError(f"unsupported value type {type(value).__name__}", path)


@dataclass
class TaskEnvelope:
    operation: str
    correlation_id: str
    payload: dict
    direction: str = REQUEST
    # The body namespace from the SOAP side; device-side JSON never
    # carries it, the engine restores it from the deployed schema.
    namespace: str | None = field(default=None, compare=False)
    # Transport metadata from the callback-address header; present on
    # requests that want the response POSTed back asynchronously.
    callback_address: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.direction not in (REQUEST, RESPONSE):
            raise WireFormatError(f"unknown direction {self.direction!r}", "$.dir")
        if not isinstance(self.payload, dict):
            raise WireFormatError("payload must be a map", "$.data")
        self.payload = normalize_value(self.payload, "$.data")

    def validated(self) -> "TaskEnvelope":
        if self.direction == REQUEST and not self.correlation_id:
            raise WireFormatError("requests require a correlation id", "$.cid")
        return self

    def reply(self, payload: dict) -> "TaskEnvelope":
        return TaskEnvelope(
            operation=self.operation,
            correlation_id=self.correlation_id,
            payload=payload,
            direction=RESPONSE,
            namespace=self.namespace,
        )
